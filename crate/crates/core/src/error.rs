use thiserror::Error;

/// Errors raised anywhere in the estimation pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid event stream: {0}")]
    InvalidStream(String),

    #[error("component {index} out of range for a {d}-dimensional process")]
    ComponentOutOfRange { index: usize, d: usize },

    #[error("model is not stationary: spectral radius of the kernel integral matrix is {spectral_radius}")]
    NonStationary { spectral_radius: f64 },

    #[error("linear system (I - K) p = nu is numerically singular")]
    SingularSystem,

    #[error("simulation exceeded the event budget of {max_events} events (model may be near-critical)")]
    EventBudgetExceeded { max_events: usize },

    #[error("kernel ({i}, {j}) is negative or increasing; thinning needs nonnegative nonincreasing kernels")]
    NonMonotoneKernel { i: usize, j: usize },

    #[error("invalid bin width {h} for observation window {horizon}")]
    InvalidBinWidth { h: f64, horizon: f64 },

    #[error("lag {lag} out of range for a series of {len} bins")]
    LagOutOfRange { lag: usize, len: usize },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("sample covariance matrix is numerically singular (condition estimate {condition:e})")]
    SingularCovariance { condition: f64 },

    #[error("position {position} is not an interior vertex of a path with {steps} steps")]
    PositionOutOfRange { position: usize, steps: usize },

    #[error("vertex sets overlap: {0}")]
    OverlappingSets(String),

    #[error("time {t} outside the observation window [0, {horizon}]")]
    TimeOutOfRange { t: f64, horizon: f64 },

    #[error("compensator of component {component} is not strictly increasing at event {index}")]
    NonMonotoneCompensator { component: usize, index: usize },

    #[error("component {component} has {count} events, at least {required} are needed")]
    TooFewEvents {
        component: usize,
        count: usize,
        required: usize,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
