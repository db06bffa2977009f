use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("change {change} cannot be applied to `{lemma}`: it deletes more segments than the lemma has")]
    InapplicableChange { lemma: String, change: String },

    #[error("{source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("{source_name}:{line}: {message}")]
    Validation {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("correlation is undefined: {0}")]
    UndefinedCorrelation(&'static str),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
