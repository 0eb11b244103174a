use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("spec error: {0}")]
    Spec(String),

    #[error("io error at {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("snapshot format error at line {line}: {reason}")]
    Snapshot { line: usize, reason: String },

    #[error(transparent)]
    Model(#[from] ao_gibbs::Error),
}

impl CliError {
    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// Process exit code: 2 for bad input, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Spec(_) | CliError::Snapshot { .. } => 2,
            CliError::Model(ao_gibbs::Error::NotTempered { .. }) => 2,
            _ => 1,
        }
    }
}
