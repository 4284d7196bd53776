use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A computation would exceed a configured size limit.
    #[error("resource limit exceeded: {what} needs {required}, cap is {cap}")]
    Resource {
        what: &'static str,
        required: usize,
        cap: usize,
    },

    /// An operator term maps a basis state outside the subspace it was built on.
    #[error("operator term `{term}` maps outside the subspace")]
    SubspaceViolation { term: String },

    #[error("degenerate state: {0}")]
    Degenerate(String),

    #[error("unsupported construction: {0}")]
    Unsupported(String),

    #[error("tolerance not met: {0}")]
    Tolerance(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
