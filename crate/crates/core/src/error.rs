use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Arguments outside an operation's domain (a > n, d > t, illegal triple, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A kernel or oracle refused to run past its configured resource guard.
    #[error("budget exhausted in {what}: {detail}")]
    Budget { what: &'static str, detail: String },

    /// The persistent term cache contains a malformed or contradictory record.
    #[error("term cache corrupt at line {line}: {reason}")]
    CacheCorrupt { line: usize, reason: String },

    /// A computed statistic fell outside the proven range of its kind.
    #[error("statistic {kind} at (d={d}, t={t}) out of range: {value}")]
    RangeViolation {
        kind: &'static str,
        d: u64,
        t: u64,
        value: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn budget(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Budget {
            what,
            detail: detail.into(),
        }
    }

    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget { .. })
    }
}
