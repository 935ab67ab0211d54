use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("unsupported characteristic {0}: need a prime p >= 5 below 2^32")]
    BadCharacteristic(u64),
    #[error("singular curve")]
    SingularCurve,
    #[error("no model with the required rational structure over the working field")]
    ModelNotRational,
    #[error("curve is not supersingular")]
    NotSupersingular,
    #[error("splitting is not rational over the working field")]
    SplittingNotRational,
    #[error("graph is not regular: vertex {vertex} has out-degree {found}, expected {expected}")]
    IrregularGraph {
        vertex: usize,
        found: u64,
        expected: u64,
    },
    #[error("detailed balance fails between vertices {0} and {1}")]
    NotReversible(usize, usize),
    #[error("eigenvalue iteration did not converge after {0} sweeps")]
    ConvergenceFailure(usize),
    #[error("dimension too small: g = {0}")]
    DimensionTooSmall(u32),
    #[error("parameters exceed the supported scale: {0}")]
    ScaleExceeded(String),
    #[error("index {index} out of range 0..{len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("graph is not bipartite")]
    NotBipartite,
    #[error("vertex is not special")]
    NotSpecialVertex,
    #[error("prime {0} is not supported by this walk")]
    BadPrime(u64),
    #[error("message of {0} bits is not a whole number of 3-bit chunks")]
    BadMessageLength(usize),
    #[error("walk left the Jacobian locus")]
    WalkLeftJacobianLocus,
}

pub type Result<T> = std::result::Result<T, Error>;
