use thiserror::Error;

/// Errors raised by grid construction, scenario validation and the solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain does not tile: left cell width {left_dx} differs from right cell width {right_dx}")]
    NonTilingDomain { left_dx: f64, right_dx: f64 },

    #[error("kernel support length must be positive, got {0}")]
    NonPositiveEta(f64),

    #[error("density {value} at index {index} lies outside [0, 1]")]
    OutOfRangeDensity { index: usize, value: f64 },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("time step {dt} exceeds the stability bound {max_dt}")]
    CflViolation { dt: f64, max_dt: f64 },

    #[error("unsupported Riemann configuration: {0}")]
    UnsupportedConfiguration(String),

    #[error("mollification width {eps} is smaller than the cell width {dx}")]
    EpsTooSmall { eps: f64, dx: f64 },

    #[error("insufficient snapshots: {0}")]
    InsufficientSnapshots(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
