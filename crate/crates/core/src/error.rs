use thiserror::Error;

/// Errors raised while constructing or operating on matrices, states and channels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),

    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("not Hermitian (max asymmetry {0:e})")]
    NotHermitian(f64),

    #[error("not positive semi-definite (min eigenvalue {0:e})")]
    NotPSD(f64),

    #[error("trace is not one (got {0})")]
    TraceNotOne(f64),

    #[error("eigendecomposition failed its residual check (residual {0:e})")]
    EigenResidual(f64),

    #[error("function undefined at eigenvalue {0}")]
    FunctionDomain(f64),

    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),

    #[error("dimension {dim} does not factor as {da}x{db}")]
    DimFactorizationMismatch { dim: usize, da: usize, db: usize },

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("order {order} out of range 0..={max}")]
    OrderOutOfRange { order: usize, max: usize },

    #[error("keep {keep} out of range 0..={len}")]
    KeepOutOfRange { keep: usize, len: usize },

    #[error("dimension {dim} too large for the brute-force oracle (max {max})")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("Plemelj series diverges: |z|*rho = {0} >= 1")]
    ConvergenceDomain(f64),

    #[error("spectral radius too close to one ({0})")]
    SpectralRadiusOne(f64),

    #[error("target is not majorized by the source (first violation at prefix {0})")]
    NotMajorized(usize),

    #[error("sequence sums differ: {0} vs {1}")]
    SumMismatch(f64, f64),

    #[error("invalid weights: {0}")]
    WeightsInvalid(String),

    #[error("operator {0} is not unitary (deviation {1:e})")]
    NotUnitary(usize, f64),

    #[error("Kraus operators are not trace non-increasing (min eigenvalue of I - sum A^dag A is {0:e})")]
    NotTraceNonIncreasing(f64),

    #[error("Kraus condition sum A A^dag <= I unmet (min eigenvalue of I - sum A A^dag is {0:e})")]
    KrausConditionUnmet(f64),

    #[error("pure state is not normalized (Frobenius norm {0})")]
    NormNotOne(f64),

    #[error("invalid sequence: {0}")]
    InvalidSequence(String),

    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),

    #[error("unknown claim: {0}")]
    UnknownClaim(String),

    #[error("malformed witness: {0}")]
    MalformedWitness(String),
}

pub type Result<T> = std::result::Result<T, Error>;
