use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("lookup error: unknown preset `{0}`")]
    UnknownPreset(String),

    /// `index` is the 1-based position of the offending token (0 for empty input).
    #[error("parse error at token {index}: {message}")]
    Parse { index: usize, message: String },

    #[error("config error: {field}: {message}")]
    Config { field: String, message: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("audit error: {0}")]
    Audit(String),

    #[error("budget error: {runs} runs requested, budget is {budget}")]
    Budget { runs: u64, budget: u64 },

    /// `row` is the 1-based line of the input, header included.
    #[error("ingestion error at row {row}: {message}")]
    Ingest { row: usize, message: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn parse(index: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            index,
            message: message.into(),
        }
    }

    /// Process exit status for the command-line tool, one per error category.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } => 3,
            Error::Parse { .. } => 4,
            Error::Geometry(_) | Error::Domain(_) => 5,
            Error::UnknownPreset(_) => 6,
            Error::Ingest { .. } => 7,
            Error::Budget { .. } => 8,
            Error::Audit(_) => 9,
            Error::Io(_) => 10,
        }
    }
}
