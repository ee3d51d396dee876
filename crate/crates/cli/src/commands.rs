//! One function per subcommand. Each returns the config it actually ran with
//! and its outputs; `main` wraps them in a report.

use std::fs;

use num_complex::Complex64;
use qkdforge::bb84::{
    self, BasisPolicy, ChannelModel, CodePair, EveKind, EveStrategy, Mode, PrivacyParams,
    SessionConfig,
};
use qkdforge::codes::{named, CosetQuotient, LinearCode, SyndromeTable};
use qkdforge::css::{inject, CodewordParams, CssCode, PhaseRoute};
use qkdforge::distill::{run_distillation, EprSession};
use qkdforge::gf2::{BitMatrix, BitVector};
use qkdforge::parallel::derive_seed;
use qkdforge::qec3::{self, ArbitraryError};
use qkdforge::qsim::{rng_from_seed, Pauli, StateVector};
use qkdforge::reproduce::reproduce_all;
use serde_json::{json, Value};

use crate::args::*;

#[derive(Debug)]
pub enum Failure {
    /// Bad arguments: exit 2.
    Usage(String),
    /// The request was well formed but could not be carried out: exit 1.
    Domain(String),
}

impl From<qkdforge::Error> for Failure {
    fn from(e: qkdforge::Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

pub type CmdResult = Result<Outcome, Failure>;

pub struct Outcome {
    pub config: Value,
    pub outputs: Value,
    pub csv: Option<String>,
    /// Set when the run completed but reports failed checks.
    pub failed: bool,
}

impl Outcome {
    fn json(config: Value, outputs: Value) -> Self {
        Self {
            config,
            outputs,
            csv: None,
            failed: false,
        }
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialise")
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn bits(s: &str, what: &str) -> Result<BitVector, Failure> {
    s.parse()
        .map_err(|_| usage(format!("{what}: expected a string of 0s and 1s, got '{s}'")))
}

fn bits_or_zero(s: &Option<String>, n: usize, what: &str) -> Result<BitVector, Failure> {
    let v = match s {
        Some(s) => bits(s, what)?,
        None => return Ok(BitVector::zeros(n)),
    };
    if v.len() != n {
        return Err(usage(format!("{what}: expected {n} bits, got {}", v.len())));
    }
    Ok(v)
}

/// A built-in name, a generator-matrix file, or `check:<file>`.
pub fn load_code(arg: &str) -> Result<LinearCode, Failure> {
    if let Ok(c) = named::by_name(arg) {
        return Ok(c);
    }
    let (is_check, path) = match arg.strip_prefix("check:") {
        Some(p) => (true, p),
        None => (false, arg.strip_prefix("gen:").unwrap_or(arg)),
    };
    let text = fs::read_to_string(path).map_err(|e| {
        usage(format!(
            "'{arg}' is neither a built-in code ({}) nor a readable file: {e}",
            named::NAMES.join(", ")
        ))
    })?;
    let m = BitMatrix::parse(&text)?;
    Ok(if is_check {
        LinearCode::from_check(m)?
    } else {
        LinearCode::from_generator(m)?
    })
}

fn load_pair(c1: &str, c2: &str) -> Result<(LinearCode, LinearCode), Failure> {
    let c1 = load_code(c1)?;
    let c2 = if c2 == "dual" { c1.dual() } else { load_code(c2)? };
    Ok((c1, c2))
}

fn css_code(a: &CssCodeArgs) -> Result<CssCode, Failure> {
    let (c1, c2) = load_pair(&a.c1, &a.c2)?;
    Ok(match a.t {
        Some(t) => CssCode::new(c1, c2, t)?,
        None => CssCode::with_full_capacity(c1, c2)?,
    })
}

fn code_summary(code: &LinearCode) -> Result<Value, Failure> {
    Ok(json!({
        "n": code.n(),
        "k": code.k(),
        "generator": code.generator(),
        "check": code.check(),
        "capacities": code.capacities()?,
        "codewords": code.codewords()?,
    }))
}

fn table_json(t: &SyndromeTable) -> Value {
    t.entries()
        .iter()
        .map(|(e, s)| json!({"syndrome": s, "error": e}))
        .collect()
}

pub fn codes(cmd: &CodesCmd) -> CmdResult {
    match cmd {
        CodesCmd::Show { code, dual } => {
            let mut c = load_code(code)?;
            if *dual {
                c = c.dual();
            }
            Ok(Outcome::json(
                json!({"code": code, "dual": dual}),
                code_summary(&c)?,
            ))
        }
        CodesCmd::Table { code, t } => {
            let c = load_code(code)?;
            let t = match t {
                Some(t) => *t,
                None => c.capacities()?.t,
            };
            let table = SyndromeTable::build(&c, t)?;
            let mut csv = String::from("syndrome,error\n");
            for (e, s) in table.entries() {
                csv.push_str(&format!("{s},{e}\n"));
            }
            Ok(Outcome {
                csv: Some(csv),
                ..Outcome::json(json!({"code": code, "t": t}), json!({"table": table_json(&table)}))
            })
        }
        CodesCmd::Decode { code, word, t } => {
            let c = load_code(code)?;
            let r = bits(word, "word")?;
            let t = match t {
                Some(t) => *t,
                None => c.capacities()?.t,
            };
            let d = SyndromeTable::build(&c, t)?.decode(&c, &r)?;
            Ok(Outcome::json(
                json!({"code": code, "word": word, "t": t}),
                to_value(&d),
            ))
        }
        CodesCmd::Cosets { c1, c2 } => {
            let (a, b) = load_pair(c1, c2)?;
            let q = CosetQuotient::new(&a, &b)?;
            let mut rows = Vec::new();
            let mut csv = String::from("key,representative\n");
            for (key, rep) in q.representatives()? {
                csv.push_str(&format!("{key},{rep}\n"));
                rows.push(json!({"key": key, "representative": rep, "coset": b.coset(&rep)?}));
            }
            Ok(Outcome {
                csv: Some(csv),
                ..Outcome::json(
                    json!({"c1": c1, "c2": c2}),
                    json!({"key_len": q.key_len(), "cosets": rows}),
                )
            })
        }
    }
}

fn error_json(kind: ErrorKind, qubit: usize, e: &Option<ArbitraryError>) -> Value {
    let matrix = e.map(|e| {
        e.matrix()
            .iter()
            .map(|row| row.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>())
            .collect::<Vec<_>>()
    });
    json!({"kind": kind, "qubit": qubit, "matrix": matrix})
}

pub fn qec(cmd: &QecCmd, seed: u64) -> CmdResult {
    let (name, args) = match cmd {
        QecCmd::Bitflip(a) => ("bitflip", a),
        QecCmd::Phaseflip(a) => ("phaseflip", a),
        QecCmd::Shor(a) => ("shor", a),
    };
    let norm = args.a.hypot(args.b);
    if !(norm.is_finite() && norm > 0.0) {
        return Err(usage("amplitudes a and b must not both be zero"));
    }
    let (a, b) = (
        Complex64::new(args.a / norm, 0.0),
        Complex64::new(args.b / norm, 0.0),
    );
    let clean = match name {
        "bitflip" => qec3::bitflip_encode(a, b)?,
        "phaseflip" => qec3::phaseflip_encode(a, b)?,
        _ => qec3::shor_encode(a, b)?,
    };
    let n = clean.n_qubits();
    if !(1..=n).contains(&args.qubit) {
        return Err(usage(format!("--qubit must lie in 1..={n}")));
    }
    if name == "shor" && args.projective {
        return Err(usage("--projective applies to the three-qubit codes only"));
    }
    let kind = args.error.unwrap_or(match name {
        "bitflip" => ErrorKind::X,
        "phaseflip" => ErrorKind::Z,
        _ => ErrorKind::Random,
    });
    let mut rng = rng_from_seed(seed);
    let err = match kind {
        ErrorKind::None => None,
        ErrorKind::X => Some(ArbitraryError::pauli(Pauli::X)),
        ErrorKind::Y => Some(ArbitraryError::pauli(Pauli::Y)),
        ErrorKind::Z => Some(ArbitraryError::pauli(Pauli::Z)),
        ErrorKind::Random => Some(ArbitraryError::random(&mut rng)),
    };
    let mut s = clean.clone();
    if let Some(e) = &err {
        e.apply(&mut s, args.qubit)?;
    }
    let (syndrome, correction, fixed) = match name {
        "shor" => {
            let (r, fixed) = qec3::shor_correct(&s, &mut rng)?;
            let c = json!({"x_on": r.bit_flips.iter().filter(|&&q| q > 0).collect::<Vec<_>>(),
                           "z_on": (r.phase_block > 0).then(|| 3 * r.phase_block - 2)});
            (to_value(&r), c, fixed)
        }
        _ if args.projective => {
            let (outcome, fixed) = qec3::correct_projective(&s, name == "phaseflip", &mut rng)?;
            (json!({"projector": outcome}), json!((outcome > 0).then_some(outcome)), fixed)
        }
        _ => {
            let (r, fixed) = if name == "bitflip" {
                qec3::bitflip_correct(&s, &mut rng)?
            } else {
                qec3::phaseflip_correct(&s, &mut rng)?
            };
            (to_value(&r), json!((r.flagged > 0).then_some(r.flagged)), fixed)
        }
    };
    Ok(Outcome::json(
        json!({"code": name, "args": args}),
        json!({
            "error": error_json(kind, args.qubit, &err),
            "syndrome": syndrome,
            "correction": correction,
            "fidelity": fixed.fidelity(&clean)?,
        }),
    ))
}

fn codeword_params(code: &CssCode, w: &CodewordArgs) -> Result<(BitVector, CodewordParams), Failure> {
    let n = code.n();
    let v = match (&w.v, &w.key) {
        (Some(v), _) => bits_or_zero(&Some(v.clone()), n, "--v")?,
        (None, key) => {
            let key = bits_or_zero(key, code.k(), "--key")?;
            code.quotient().representative(&key)?
        }
    };
    let p = CodewordParams {
        x: bits_or_zero(&w.x, n, "--x")?,
        z: bits_or_zero(&w.z, n, "--z")?,
    };
    Ok((v, p))
}

fn amplitudes(s: &StateVector) -> Value {
    s.debug_dump()
        .into_iter()
        .map(|(ket, re, im)| json!({"ket": ket, "re": re, "im": im}))
        .collect()
}

pub fn css(cmd: &CssCmd, seed: u64) -> CmdResult {
    let mut rng = rng_from_seed(seed);
    match cmd {
        CssCmd::Build(a) => {
            let code = css_code(a)?;
            Ok(Outcome::json(
                to_value(a),
                json!({
                    "n": code.n(), "k": code.k(), "t": code.t(),
                    "h1": code.h1(), "h2": code.h2(),
                    "bit_table": table_json(code.bit_table()),
                    "phase_table": table_json(code.phase_table()),
                }),
            ))
        }
        CssCmd::Encode(w) => {
            let code = css_code(&w.code)?;
            let (v, p) = codeword_params(&code, w)?;
            let s = code.codeword(&v, &p)?;
            Ok(Outcome::json(
                to_value(w),
                json!({"v": v, "x": p.x, "z": p.z, "key": code.quotient().key_from_coset(&v)?,
                       "amplitudes": amplitudes(&s)}),
            ))
        }
        CssCmd::Inject { word, e1, e2 } => {
            let code = css_code(&word.code)?;
            let (v, p) = codeword_params(&code, word)?;
            let e1 = bits_or_zero(e1, code.n(), "--e1")?;
            let e2 = bits_or_zero(e2, code.n(), "--e2")?;
            let mut s = inject(&code.codeword(&v, &p)?, &e1, &e2)?;
            let sx = code.bit_syndrome(&mut s, &mut rng)?;
            let sz = code.phase_syndrome(&mut s, &mut rng)?;
            Ok(Outcome::json(
                json!({"word": word, "e1": e1, "e2": e2}),
                json!({
                    "bit_syndrome": sx,
                    "phase_syndrome": sz,
                    "shifted_bit_syndrome": sx.add(&code.h1().mul_vec(&p.x)?)?,
                    "shifted_phase_syndrome": sz.add(&code.h2().mul_vec(&p.z)?)?,
                }),
            ))
        }
        CssCmd::Correct { word, e1, e2, route } => {
            let code = css_code(&word.code)?;
            let (v, p) = codeword_params(&code, word)?;
            let e1 = bits_or_zero(e1, code.n(), "--e1")?;
            let e2 = bits_or_zero(e2, code.n(), "--e2")?;
            let clean = code.codeword(&v, &p)?;
            let route_ = match route {
                Route::PauliX => PhaseRoute::PauliX,
                Route::Hadamard => PhaseRoute::Hadamard,
            };
            let fix = code.correct_via(&inject(&clean, &e1, &e2)?, &p, route_, &mut rng)?;
            Ok(Outcome::json(
                json!({"word": word, "e1": e1, "e2": e2, "route": route}),
                json!({
                    "bit_syndrome": fix.bit_syndrome,
                    "phase_syndrome": fix.phase_syndrome,
                    "x_correction": fix.e1,
                    "z_correction": fix.e2,
                    "status": fix.status,
                    "fidelity": fix.state.fidelity(&clean)?,
                    "key": code.quotient().key_from_coset(&v)?,
                    "identified_key": code.identify(&fix.state, &p).ok(),
                }),
            ))
        }
        CssCmd::Verify(a) => {
            let code = css_code(a)?;
            let xs = code.default_x_set()?;
            let zs = code.default_z_set()?;
            let r = code.verify_basis_identities(&xs, &zs)?;
            Ok(Outcome::json(
                json!({"code": a, "x_set": xs, "z_set": zs}),
                to_value(&r),
            ))
        }
    }
}

pub fn distill(a: &DistillArgs, seed: u64) -> CmdResult {
    let (c1, c2) = load_pair(&a.code, &a.c2)?;
    let code = CssCode::with_full_capacity(c1, c2)?;
    let e1 = bits_or_zero(&a.e1, code.n(), "--e1")?;
    let e2 = bits_or_zero(&a.e2, code.n(), "--e2")?;
    let mut session = EprSession::new(code)?;
    session.inject_bob_errors(&e1, &e2)?;
    let r = run_distillation(&mut session, &mut rng_from_seed(seed))?;
    Ok(Outcome::json(to_value(a), to_value(&r)))
}

fn policy(p: PolicyArg) -> BasisPolicy {
    match p {
        PolicyArg::Uniform => BasisPolicy::UniformRandom,
        PolicyArg::Z => BasisPolicy::AlwaysZ,
        PolicyArg::X => BasisPolicy::AlwaysX,
    }
}

pub fn session_config(a: &SessionArgs, seed: u64) -> Result<SessionConfig, Failure> {
    let (mode, codes) = match a.mode {
        ModeArg::Standard => (Mode::Standard, None),
        ModeArg::ShorPreskill => {
            let (c1, c2) = load_pair(&a.c1, &a.c2)?;
            (Mode::ShorPreskill, Some(CodePair { c1, c2 }))
        }
    };
    let n = a
        .n
        .or_else(|| codes.as_ref().map(|c| c.c1.n()))
        .unwrap_or(SessionConfig::default().n);
    let cfg = SessionConfig {
        n,
        delta: a.delta,
        t_abort: a.t_abort,
        max_qber: a.max_qber,
        seed,
        mode,
        channel: ChannelModel { px: a.px, pz: a.pz },
        eve: EveStrategy {
            kind: match a.eve {
                EveArg::None => EveKind::None,
                EveArg::Intercept => EveKind::InterceptResend,
            },
            basis_policy: policy(a.eve_basis),
        },
        alice_basis: policy(a.alice_basis),
        codes,
        privacy: PrivacyParams { r: a.r, s: a.s },
    };
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    Ok(cfg)
}

pub fn bb84_cmd(cmd: &Bb84Cmd, seed: u64) -> CmdResult {
    match cmd {
        Bb84Cmd::Run(a) => {
            let cfg = session_config(a, seed)?;
            let t = bb84::run(&cfg)?;
            let row = bb84::SweepRow::from_transcript(seed, &t);
            Ok(Outcome {
                csv: Some(bb84::sweep_csv(&[row])),
                ..Outcome::json(to_value(&cfg), to_value(&t))
            })
        }
        Bb84Cmd::Sweep { session, runs } => {
            let cfg = session_config(session, seed)?;
            let seeds: Vec<u64> = (0..*runs).map(|i| derive_seed(seed, i)).collect();
            let rows: Vec<_> = bb84::sweep(&cfg, &seeds)?.into_iter().map(|(r, _)| r).collect();
            let done: Vec<_> = rows.iter().filter(|r| !r.aborted).collect();
            let qbers: Vec<f64> = rows.iter().filter_map(|r| r.qber).collect();
            let summary = json!({
                "runs": rows.len(),
                "aborted": rows.len() - done.len(),
                "mean_qber": (!qbers.is_empty()).then(|| qbers.iter().sum::<f64>() / qbers.len() as f64),
                "keys_matched": done.iter().filter(|r| r.keys_match == Some(true)).count(),
            });
            Ok(Outcome {
                csv: Some(bb84::sweep_csv(&rows)),
                ..Outcome::json(
                    json!({"session": to_value(&cfg), "runs": runs}),
                    json!({"summary": summary, "rows": rows}),
                )
            })
        }
    }
}

pub fn reproduce(seed: u64) -> CmdResult {
    let r = reproduce_all(seed);
    let mut csv = String::from("check,passed\n");
    for c in &r.checks {
        csv.push_str(&format!("{},{}\n", c.name, c.passed));
    }
    Ok(Outcome {
        csv: Some(csv),
        failed: !r.all_passed(),
        ..Outcome::json(json!({}), to_value(&r))
    })
}
