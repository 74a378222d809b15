use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("unknown boundary component {id} (domain has {count})")]
    UnknownComponent { id: usize, count: usize },

    #[error("boundary parameter {param} outside component {component} range [0, {length}]")]
    ParameterOutOfRange {
        component: usize,
        param: f64,
        length: f64,
    },

    #[error("invalid boundary measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("unknown {kind} `{name}` (available: {available})")]
    UnknownName {
        kind: &'static str,
        name: String,
        available: String,
    },

    #[error("singular linear system at row {0}")]
    Singular(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
