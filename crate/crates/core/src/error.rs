use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("degenerate law: {0}")]
    Degenerate(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("numerical failure: {what} (residual {residual:e})")]
    NumericalFailure { what: String, residual: f64 },

    #[error("unknown model `{0}`")]
    UnknownModel(String),

    #[error("no bracket for a_n after {doublings} doublings of the upper bound")]
    BracketOverflow { doublings: u32 },

    #[error("n * l(x) / x^2 never reaches 1 for n = {n}; the infimum is 0")]
    NoCrossing { n: u64 },

    #[error("branch inapplicable: {0}")]
    BranchInapplicable(String),

    #[error("division domain: {0}")]
    DivisionDomain(String),

    #[error("resource limit: {0}")]
    ResourceLimit(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("statistic generation failed at n = {n}: {source}")]
    AtSampleSize {
        n: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn numerical(what: impl Into<String>, residual: f64) -> Self {
        Error::NumericalFailure {
            what: what.into(),
            residual,
        }
    }

    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Strips `AtSampleSize` wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtSampleSize { source, .. } => source.root(),
            e => e,
        }
    }

    /// Process exit status for the CLI: 2 config, 3 hypothesis, 4 numerical.
    pub fn exit_code(&self) -> i32 {
        match self.root() {
            Error::Config { .. } | Error::UnknownModel(_) | Error::InvalidParams(_) => 2,
            Error::Hypothesis(_) | Error::BranchInapplicable(_) => 3,
            Error::NumericalFailure { .. }
            | Error::BracketOverflow { .. }
            | Error::NoCrossing { .. }
            | Error::DivisionDomain(_)
            | Error::Degenerate(_)
            | Error::ResourceLimit(_) => 4,
            _ => 2,
        }
    }
}
