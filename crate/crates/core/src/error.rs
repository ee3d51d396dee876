use thiserror::Error;

/// Everything that can go wrong across the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("generator rows are linearly dependent")]
    DependentRows,

    #[error("check matrix does not annihilate the generator (H·Gᵀ ≠ 0)")]
    InvalidCheckMatrix,

    #[error("invalid code dimensions n={n}, k={k}")]
    InvalidDimension { n: usize, k: usize },

    #[error("refusing to enumerate 2^{k} codewords (limit 2^{limit})")]
    EnumerationTooLarge { k: usize, limit: usize },

    #[error("syndrome {syndrome} produced by both {first} and {second}")]
    SyndromeCollision {
        syndrome: String,
        first: String,
        second: String,
    },

    #[error("linear system has no solution")]
    NoSolution,

    #[error("word {0} is not a codeword")]
    NotInCode(String),

    #[error("inner code is not contained in outer code")]
    NotSubcode,

    #[error("nesting must be proper: k1={k1}, k2={k2}")]
    ImproperNesting { k1: usize, k2: usize },

    #[error("t={t} exceeds correction capacity (C1: {c1}, C2 dual: {c2_dual})")]
    InsufficientCapacity { t: usize, c1: usize, c2_dual: usize },

    #[error("qubit {index} out of range 1..={n}")]
    QubitIndex { index: usize, n: usize },

    #[error("{n} qubits exceeds the simulator limit of {max}")]
    QubitLimit { n: usize, max: usize },

    #[error("state is not normalised (norm² = {0})")]
    NotNormalized(f64),

    #[error("invalid measurement: {0}")]
    InvalidProjectors(String),

    #[error("state is not a codeword of the code")]
    NotACodeword,

    #[error("identity violated: {0}")]
    IdentityViolated(String),

    #[error("invalid parameter set: {0}")]
    InvalidParameterSet(String),

    #[error("syndrome {0} is not in the decoding table")]
    Uncorrectable(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unknown code '{0}'")]
    UnknownCode(String),
}

pub type Result<T> = std::result::Result<T, Error>;
