//! Mining of review rounds from Gerrit and GitHub.

mod archive;
mod gerrit;
mod github;
pub mod transport;
mod types;

use thiserror::Error;

pub use archive::{load_rounds, persist_rounds, LoadMode, LoadReport, SkippedLine, SCHEMA_VERSION};
pub use gerrit::fetch_gerrit_rounds;
pub use github::fetch_github_rounds;
pub use transport::{ApiClient, FixtureTransport, HttpTransport, RetryPolicy, Transport};
pub use types::{is_java_path, FileVersion, HostKind, ProjectRef, ReviewComment, ReviewRound};

#[derive(Debug, Error)]
pub enum MinerError {
    #[error("invalid project: {reason}")]
    InvalidProject { reason: String },
    #[error("expected a {expected:?} project, got {found:?}")]
    WrongHost { expected: HostKind, found: HostKind },
    #[error("fetching {url} failed: {reason}")]
    Fetch { url: String, reason: String },
    #[error("{url} still rate limited after {attempts} attempts")]
    RateLimited { url: String, attempts: u32 },
    #[error("{url} not found")]
    NotFound { url: String },
    #[error("malformed {endpoint} payload at `{field}`: {reason}")]
    Parse {
        endpoint: String,
        field: String,
        reason: String,
    },
    #[error("archive line {line}: {reason}")]
    Archive { line: usize, reason: String },
    #[error("archive schema version {found} is not supported (expected {expected})")]
    SchemaVersion { found: u64, expected: u32 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl MinerError {
    /// Network and authentication failures may succeed on a later run.
    pub fn is_retryable(&self) -> bool {
        matches!(self, MinerError::Fetch { .. } | MinerError::RateLimited { .. })
    }
}

/// Mines `project` with the fetcher matching its host kind.
pub fn fetch_rounds(
    client: &ApiClient<'_>,
    project: &ProjectRef,
    limit: usize,
) -> Result<Vec<ReviewRound>, MinerError> {
    match project.host_kind {
        HostKind::Gerrit => fetch_gerrit_rounds(client, project, limit),
        HostKind::Github => fetch_github_rounds(client, project, limit),
    }
}
