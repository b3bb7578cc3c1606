use serde::{Deserialize, Serialize};
use url::Url;

use super::MinerError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HostKind {
    Gerrit,
    Github,
}

/// A project on a review host. For GitHub, `project_id` is `owner/repo` and
/// `base_url` is the API root (e.g. `https://api.github.com`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProjectRef {
    pub host_kind: HostKind,
    pub base_url: String,
    pub project_id: String,
}

impl ProjectRef {
    pub fn new(
        host_kind: HostKind,
        base_url: impl Into<String>,
        project_id: impl Into<String>,
    ) -> Result<Self, MinerError> {
        let project = Self {
            host_kind,
            base_url: base_url.into(),
            project_id: project_id.into(),
        };
        project.validate()?;
        Ok(project)
    }

    pub fn validate(&self) -> Result<(), MinerError> {
        Url::parse(&self.base_url).map_err(|e| MinerError::InvalidProject {
            reason: format!("base_url {:?} is not a valid URL: {e}", self.base_url),
        })?;
        if self.project_id.trim().is_empty() {
            return Err(MinerError::InvalidProject {
                reason: "project_id is empty".into(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileVersion {
    pub path: String,
    pub content: String,
    pub revision_id: String,
}

impl FileVersion {
    pub fn new(path: impl Into<String>, content: impl Into<String>, revision_id: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            content: content.into(),
            revision_id: revision_id.into(),
        }
    }

    pub fn is_java(&self) -> bool {
        is_java_path(&self.path)
    }
}

pub fn is_java_path(path: &str) -> bool {
    path.ends_with(".java")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReviewComment {
    pub author_id: String,
    pub is_contributor: bool,
    pub path: String,
    pub line_start: u32,
    pub line_end: u32,
    pub body: String,
    pub round_index: u32,
}

impl ReviewComment {
    pub fn is_well_formed(&self) -> bool {
        self.line_start >= 1 && self.line_start <= self.line_end && !self.body.trim().is_empty()
    }
}

/// One review iteration: the files submitted, the comments they received
/// and the files resubmitted in response. The last round of a change has an
/// empty `revised` set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReviewRound {
    pub project: ProjectRef,
    pub change_id: String,
    pub round_index: u32,
    pub submitted: Vec<FileVersion>,
    pub comments: Vec<ReviewComment>,
    pub revised: Vec<FileVersion>,
}

impl ReviewRound {
    pub fn submitted_file(&self, path: &str) -> Option<&FileVersion> {
        self.submitted.iter().find(|f| f.path == path)
    }

    /// Checks the per-round invariants: well-formed comments that anchor to
    /// submitted paths.
    pub fn check(&self) -> Result<(), String> {
        for c in &self.comments {
            if !c.is_well_formed() {
                return Err(format!(
                    "comment by {} on {} has invalid anchor {}-{} or empty body",
                    c.author_id, c.path, c.line_start, c.line_end
                ));
            }
            if self.submitted_file(&c.path).is_none() {
                return Err(format!("comment references {} which was not submitted", c.path));
            }
            if c.round_index != self.round_index {
                return Err(format!(
                    "comment carries round {} inside round {}",
                    c.round_index, self.round_index
                ));
            }
        }
        Ok(())
    }
}

/// Drops comments that violate the round invariants. Returns how many were
/// dropped.
pub(crate) fn retain_valid_comments(round: &mut ReviewRound) -> usize {
    let before = round.comments.len();
    let submitted: Vec<String> = round.submitted.iter().map(|f| f.path.clone()).collect();
    round
        .comments
        .retain(|c| c.is_well_formed() && submitted.contains(&c.path));
    before - round.comments.len()
}
