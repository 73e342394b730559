use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the series, operator, subspace and verification layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("truncation mismatch: {0} vs {1}")]
    TruncationMismatch(usize, usize),

    #[error("point {0} is not inside the open unit disk")]
    OutsideDisk(Complex64),

    #[error("zero polynomial")]
    ZeroPolynomial,

    #[error("input is not a polynomial of degree below {0}")]
    NotPolynomial(usize),

    #[error("root {root} lies within {margin:e} of the unit circle (boundary-ambiguous)")]
    BoundaryAmbiguous { root: Complex64, margin: f64 },

    #[error("not invertible in H-infinity: root {0} inside or near the closed disk")]
    NotInvertible(Complex64),

    #[error("invalid Blaschke data: {0}")]
    InvalidBlaschke(String),

    #[error("perturbation invariant violated: {0}")]
    PerturbationInvariant(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("ill-conditioned direct sum: smallest principal angle {0:e}")]
    IllConditioned(f64),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("degenerate: {0}")]
    Degenerate(String),

    #[error("headroom: {0}")]
    Headroom(String),

    #[error("case mismatch: {0}")]
    CaseMismatch(String),

    #[error("schema: {0}")]
    Schema(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Input and schema problems, as opposed to numerical verification failures.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Degenerate(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
