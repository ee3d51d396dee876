use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "qkdforge", version, about = "Classical codes, CSS codes and BB84 simulation")]
#[command(arg_required_else_help = true)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone, Serialize)]
pub struct GlobalOpts {
    /// RNG seed for randomized subcommands.
    #[arg(long, global = true, env = "QKDFORGE_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Include wall-clock timing in the report (makes output non-reproducible).
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classical linear codes.
    #[command(subcommand)]
    Codes(CodesCmd),
    /// Three- and nine-qubit error-correction demos.
    #[command(subcommand)]
    Qec(QecCmd),
    /// CSS quantum codes.
    #[command(subcommand)]
    Css(CssCmd),
    /// EPR-pair distillation with a CSS code.
    Distill(DistillArgs),
    /// BB84 key distribution.
    #[command(subcommand)]
    Bb84(Bb84Cmd),
    /// Re-run every worked example and report pass/fail per check.
    Reproduce,
}

/// A code is a built-in name (parity4, hamming74, rep3), a path to a
/// generator-matrix file, or `check:<path>` for a check-matrix file.
#[derive(Debug, Subcommand)]
pub enum CodesCmd {
    /// Matrices, parameters and codewords.
    Show {
        code: String,
        /// Describe the dual code instead.
        #[arg(long)]
        dual: bool,
    },
    /// Syndrome table for all errors up to weight t.
    Table {
        code: String,
        #[arg(long)]
        t: Option<usize>,
    },
    /// Syndrome-decode a received word.
    Decode {
        code: String,
        word: String,
        #[arg(long)]
        t: Option<usize>,
    },
    /// Coset labels of C1/C2 and one representative each.
    Cosets {
        c1: String,
        #[arg(long, default_value = "dual")]
        c2: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorKind {
    None,
    X,
    Y,
    Z,
    /// Haar-random single-qubit unitary.
    Random,
}

#[derive(Debug, Args, Serialize)]
pub struct QecArgs {
    /// Qubit (1-based) the error hits.
    #[arg(long, default_value_t = 1)]
    pub qubit: usize,
    #[arg(long, value_enum)]
    pub error: Option<ErrorKind>,
    /// Logical amplitudes a|0⟩ + b|1⟩ (real, normalised on input).
    #[arg(long, default_value_t = 0.6)]
    pub a: f64,
    #[arg(long, default_value_t = 0.8)]
    pub b: f64,
    /// Measure with the four syndrome projectors instead of the two observables.
    #[arg(long)]
    pub projective: bool,
}

#[derive(Debug, Subcommand)]
pub enum QecCmd {
    Bitflip(QecArgs),
    Phaseflip(QecArgs),
    Shor(QecArgs),
}

#[derive(Debug, Args, Clone, Serialize)]
pub struct CssCodeArgs {
    #[arg(long, default_value = "hamming74")]
    pub c1: String,
    /// `dual` means the dual of C1.
    #[arg(long, default_value = "dual")]
    pub c2: String,
    /// Correction capacity; the largest valid value by default.
    #[arg(long)]
    pub t: Option<usize>,
}

#[derive(Debug, Args, Clone, Serialize)]
pub struct CodewordArgs {
    #[command(flatten)]
    pub code: CssCodeArgs,
    /// Coset key (k1 − k2 bits).
    #[arg(long, conflicts_with = "v")]
    pub key: Option<String>,
    /// A word of C1 naming the coset, as an alternative to --key.
    #[arg(long)]
    pub v: Option<String>,
    #[arg(long)]
    pub x: Option<String>,
    #[arg(long)]
    pub z: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    PauliX,
    Hadamard,
}

#[derive(Debug, Subcommand)]
pub enum CssCmd {
    /// Check matrices and syndrome tables.
    Build(CssCodeArgs),
    /// Amplitudes of a codeword.
    Encode(CodewordArgs),
    /// Apply X on e1 and Z on e2 to a codeword and report the syndromes.
    Inject {
        #[command(flatten)]
        word: CodewordArgs,
        #[arg(long)]
        e1: Option<String>,
        #[arg(long)]
        e2: Option<String>,
    },
    /// Inject, measure syndromes, correct, and report the fidelity.
    Correct {
        #[command(flatten)]
        word: CodewordArgs,
        #[arg(long)]
        e1: Option<String>,
        #[arg(long)]
        e2: Option<String>,
        #[arg(long, value_enum, default_value_t = Route::PauliX)]
        route: Route,
    },
    /// Orthonormality, completeness and Bell-sum identities of the shifted basis.
    Verify(CssCodeArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct DistillArgs {
    #[arg(long, default_value = "hamming74")]
    pub code: String,
    #[arg(long, default_value = "dual")]
    pub c2: String,
    /// Bit flips on Bob's halves.
    #[arg(long)]
    pub e1: Option<String>,
    /// Phase flips on Bob's halves.
    #[arg(long)]
    pub e2: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    Standard,
    ShorPreskill,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EveArg {
    None,
    Intercept,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyArg {
    Uniform,
    Z,
    X,
}

#[derive(Debug, Args, Clone, Serialize)]
pub struct SessionArgs {
    #[arg(long, value_enum, default_value_t = ModeArg::Standard)]
    pub mode: ModeArg,
    /// Key-block length; defaults to the code length in shor-preskill mode.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 0.25)]
    pub delta: f64,
    #[arg(long, value_enum, default_value_t = EveArg::None)]
    pub eve: EveArg,
    #[arg(long, value_enum, default_value_t = PolicyArg::Uniform)]
    pub eve_basis: PolicyArg,
    #[arg(long, value_enum, default_value_t = PolicyArg::Uniform)]
    pub alice_basis: PolicyArg,
    #[arg(long, default_value_t = 0.0)]
    pub px: f64,
    #[arg(long, default_value_t = 0.0)]
    pub pz: f64,
    #[arg(long, default_value = "hamming74")]
    pub c1: String,
    #[arg(long, default_value = "dual")]
    pub c2: String,
    /// Shor–Preskill abort threshold on check mismatches.
    #[arg(long, default_value_t = 1)]
    pub t_abort: usize,
    /// Standard-mode abort threshold on the check error rate.
    #[arg(long, default_value_t = 0.11)]
    pub max_qber: f64,
    /// Privacy amplification: bits assumed known to Eve.
    #[arg(long, default_value_t = 0)]
    pub r: usize,
    /// Privacy amplification: extra bits sacrificed.
    #[arg(long, default_value_t = 0)]
    pub s: usize,
}

#[derive(Debug, Subcommand)]
pub enum Bb84Cmd {
    /// One session; prints the transcript.
    Run(SessionArgs),
    /// Many sessions with derived seeds; one summary row each.
    Sweep {
        #[command(flatten)]
        session: SessionArgs,
        #[arg(long, default_value_t = 100)]
        runs: u64,
    },
}
