use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u32, u32),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("division by zero in Q(w_{0})")]
    DivisionByZero(u32),

    #[error("duplicate node {0}")]
    DuplicateNode(String),

    #[error("residue {residue} out of range for modulus {m}")]
    ResidueOutOfRange { residue: u32, m: u32 },

    #[error("design must contain at least one node")]
    EmptyDesign,

    #[error("monomial basis must not be empty")]
    EmptyBasis,

    #[error("duplicate monomial {0} in basis")]
    DuplicateMonomial(String),

    #[error("monomial {0} is not reduced modulo {1}")]
    NotReduced(String, u32),

    #[error("not a correct pair: {rows}x{cols} evaluation matrix has rank {rank} (defect {defect})")]
    IncorrectPair {
        rows: usize,
        cols: usize,
        rank: usize,
        defect: usize,
    },

    #[error("singular matrix: rank {rank} of {size}")]
    SingularMatrix { rank: usize, size: usize },

    #[error("blocks must partition 1..={p}: {reason}")]
    MalformedPartition { p: usize, reason: String },

    #[error("covariance is not Hermitian positive definite ({0})")]
    NotPositiveDefinite(String),

    #[error("measure modulus {measure_m} does not match requested modulus {rule_m}")]
    MeasureModulusMismatch { measure_m: u32, rule_m: u32 },

    #[error("operation requires an equal-weight rule")]
    UnequalWeights,

    #[error("mixed-moment hypothesis not established for this provider")]
    MixedHypothesisUnknown,

    #[error("candidate list exhausted after {accepted} of {needed} basis monomials")]
    CandidatesExhausted { accepted: usize, needed: usize },

    #[error("class count m^k = {0} exceeds the supported enumeration bound {1}")]
    TooManyClasses(u64, u64),

    #[error("no moment available for exponent {0}")]
    MissingMoment(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid specification: {0}")]
    Invalid(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
