use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("required column `{0}` is missing from the header")]
    MissingColumn(String),

    #[error("{rejected} of {total} rows rejected (more than half); refusing to continue")]
    TooManyRejects { rejected: usize, total: usize },

    #[error("cause grouping line {line}: {reason}")]
    GroupingLine { line: usize, reason: String },

    #[error("event catalog line {line}: {reason}")]
    CatalogLine { line: usize, reason: String },

    #[error("no large events")]
    NoLargeEvents,

    #[error("insufficient event frequency: large-event frequency is zero")]
    InsufficientFrequency,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid tail model: {0}")]
    InvalidModel(String),

    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),

    #[error("window of {window} years exceeds the catalog span of {span} years")]
    WindowTooLong { window: u32, span: u32 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("series failed to converge: {0}")]
    NonConvergence(String),
}

impl Error {
    /// True for failures of the numerical machinery rather than of the data.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::Domain(_) | Error::NonConvergence(_))
    }
}
