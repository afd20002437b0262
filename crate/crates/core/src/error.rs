use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point {point:?} lies outside the domain of field `{field}`")]
    Domain { field: String, point: Vec<f64> },

    #[error("field `{field}` evaluates to {value} outside its declared range [{lo}, {hi}]")]
    Range {
        field: String,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("expression parse error at offset {offset}: {msg}")]
    Parse { offset: usize, msg: String },

    #[error("limit at infinity did not converge: successive sphere sups {prev} and {last}")]
    NonConvergence { prev: f64, last: f64 },

    #[error("normalization failed: {0}")]
    Normalization(String),

    #[error("integral diverges: {0}")]
    Divergent(String),

    #[error("no finite constants bound the sampled ratios ({0})")]
    NoFiniteConstants(String),

    #[error("modular is infinite for every probed scale; no finite norm")]
    NoFiniteNorm,

    #[error("configuration error at `{path}`: {msg}")]
    Config { path: String, msg: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
