use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot parse expression `{expr}`: {reason}")]
    Parse { expr: String, reason: String },

    #[error("expression `{expr}` is not finite at node {node} ({value})")]
    NonFinite {
        expr: String,
        node: usize,
        value: f64,
    },

    #[error("exponent must exceed 1: node {node} has value {value}")]
    ExponentTooSmall { node: usize, value: f64 },

    #[error("increasing schedule drops below the floor {floor}: node {node} would be {value}")]
    ScheduleFloor { node: usize, value: f64, floor: f64 },

    #[error("exponent ordering p <= q <= p + eps violated at node {node}")]
    ExponentOrdering { node: usize },

    #[error("degenerate domain: {0}")]
    DegenerateDomain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("solver did not converge after {iterations} iterations (residual {residual:e}, regularization {regularization:e})")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        regularization: f64,
        last_iterate: Vec<f64>,
    },

    #[error("schedule index {index}: {source}")]
    Schedule {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("config line {line}: {reason}")]
    Config { line: usize, reason: String },

    #[error("config is missing required key `{0}`")]
    MissingKey(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Short machine-readable tag used by the command line front end.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse",
            Error::NonFinite { .. } => "non_finite",
            Error::ExponentTooSmall { .. } => "exponent_too_small",
            Error::ScheduleFloor { .. } => "schedule_floor",
            Error::ExponentOrdering { .. } => "exponent_ordering",
            Error::DegenerateDomain(_) => "degenerate_domain",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::NonConvergence { .. } => "non_convergence",
            Error::Schedule { .. } => "schedule",
            Error::Config { .. } => "config",
            Error::MissingKey(_) => "missing_key",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
        }
    }
}
