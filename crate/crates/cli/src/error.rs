use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error(transparent)]
    Core(#[from] nucmem_core::Error),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    /// The run completed but a requested check did not pass.
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn config(field: &str, message: impl Into<String>) -> Self {
        CliError::Config {
            field: field.to_string(),
            message: message.into(),
        }
    }

    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }

    /// 2 for anything the user can fix in the input, 3 for size caps.
    pub fn exit_code(&self) -> u8 {
        use nucmem_core::Error as E;
        match self {
            CliError::Config { .. } => 2,
            CliError::Core(E::Resource { .. }) => 3,
            CliError::Core(E::Io(_) | E::Internal(_)) => 1,
            CliError::Core(_) => 2,
            CliError::Io { .. } | CliError::Failed(_) => 1,
        }
    }
}
