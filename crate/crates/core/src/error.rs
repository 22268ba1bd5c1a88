use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("poles {0} and {1} are closer than the separation floor")]
    DegeneratePoles(usize, usize),
    #[error("numerator value at pole {0} is zero")]
    ZeroResidueValue(usize),
    #[error("evaluation at a pole: {0}")]
    PoleEvaluation(String),
    #[error("coincident spectral points")]
    CoincidentPoints,
    #[error("integration failed at x = {x}: {reason}")]
    IntegrationFailure { x: f64, reason: String },
    #[error("spectral parameter is within {floor:e} of the real axis (im = {im:e})")]
    TooCloseToCut { im: f64, floor: f64 },
    #[error("truncation did not converge within radius {radius}")]
    TruncationFailure { radius: f64 },
    #[error("Weyl function is infinite at the base point; the solution cannot be normalized")]
    NotNormalizable,
    #[error("quadrature did not converge: {0}")]
    QuadratureFailure(String),
    #[error("potential vanishes at the expansion point")]
    DegenerateExpansionPoint,
    #[error("invalid potential: {0}")]
    InvalidPotential(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
