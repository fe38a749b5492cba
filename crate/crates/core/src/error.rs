use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecialFnError {
    #[error("gamma has a pole at {0}")]
    Pole(f64),
    #[error("power kernel of order {beta} is singular at t = 0")]
    Singularity { beta: f64 },
    #[error("{name}: {detail}")]
    Domain { name: &'static str, detail: String },
    #[error("non-finite argument {0}")]
    NotFinite(f64),
    #[error("Mittag-Leffler series did not converge within {terms} terms at z = {z}")]
    NonConvergence { terms: usize, z: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("grid needs at least 2 intervals, got {0}")]
    TooFewIntervals(usize),
    #[error("horizon must be positive and finite, got {0}")]
    BadHorizon(f64),
    #[error("grading exponent must be >= 1, got {0}")]
    BadGrading(f64),
    #[error("grid must start at 0, got {0}")]
    BadOrigin(f64),
    #[error("grid nodes must be strictly increasing (node {index})")]
    NotIncreasing { index: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OperatorError {
    #[error("integral order must be positive and finite, got {0}")]
    BadOrder(f64),
    #[error("sampled function lives on a different grid than the operator")]
    GridMismatch,
    #[error("singular exponent {0} is outside [0, 1)")]
    NonIntegrable(f64),
    #[error("integral order {beta} does not exceed singular exponent {gamma}; result is not continuous at 0")]
    DiscontinuousResult { beta: f64, gamma: f64 },
    #[error("expected {expected} values for the grid, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("expected {expected} initial derivatives, got {found}")]
    InitialDerivativeCount { expected: usize, found: usize },
    #[error("grid with {intervals} intervals is too coarse for {order}-fold differencing")]
    GridTooCoarse { intervals: usize, order: usize },
    #[error("operation requires a regular sampled function (singular exponent {0})")]
    SingularInput(f64),
}
