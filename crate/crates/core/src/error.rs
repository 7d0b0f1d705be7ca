use thiserror::Error;

/// Errors raised by the label-level engines and their file formats.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("binary vector of length {0} exceeds the 64-bit packing limit")]
    VectorTooLong(usize),

    #[error("matrix is {rows}x{cols}, expected a square matrix of even dimension")]
    NotSquareEven { rows: usize, cols: usize },

    #[error("matrix is not symplectic (A^T P A != P); the relabeling is not locally realizable")]
    NotSymplectic,

    #[error("generators are linearly dependent over GF(2)")]
    DependentGenerators,

    #[error("generators {0} and {1} do not commute (non-zero symplectic inner product)")]
    NonCommutingGenerators(usize, usize),

    #[error("linear system over GF(2) has no solution")]
    Inconsistent,

    #[error("invalid pair counts: n = {n}, m = {m}")]
    InvalidPairCounts { n: usize, m: usize },

    #[error("pair count {0} exceeds the supported maximum of {max}", max = crate::MAX_PAIRS)]
    TooManyPairs(usize),

    #[error("negative weight {value} at label {label}")]
    NegativeWeight { label: usize, value: f64 },

    #[error("weights sum to {0}, not 1")]
    NotNormalized(f64),

    #[error("fidelity {0} outside [0, 1]")]
    InvalidFidelity(f64),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("branch {0} has zero probability")]
    ImpossibleBranch(String),

    #[error("invalid bit string {0:?}")]
    InvalidBitString(String),

    #[error("invalid Pauli character {0:?} (expected one of I, X, Y, Z)")]
    InvalidPauli(char),

    #[error("recurrence mode needs a protocol with one output pair, got m = {0}")]
    RecurrenceNeedsSinglePair(usize),

    #[error("dense oracle limited to n <= {max} pairs, got {0}", max = crate::oracle::MAX_ORACLE_PAIRS)]
    OracleTooLarge(usize),

    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
