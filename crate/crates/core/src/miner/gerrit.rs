//! Gerrit miner.
//!
//! Gerrit cannot list review requests per project, so changes are listed for
//! the whole installation and filtered down to the requested project. Every
//! patch set of a change becomes one review round: its files are the
//! submitted set, the comments written on it are the round's comments, and
//! the next patch set is the revised set (empty for the last one).

use std::collections::BTreeMap;

use base64::Engine;
use percent_encoding::{utf8_percent_encode, NON_ALPHANUMERIC};
use serde::Deserialize;
use url::Url;

use super::transport::ApiClient;
use super::types::retain_valid_comments;
use super::{FileVersion, HostKind, MinerError, ProjectRef, ReviewComment, ReviewRound};

const PAGE_SIZE: usize = 100;

/// Paths Gerrit reports for every revision that are not repository files.
const MAGIC_PATHS: &[&str] = &["/COMMIT_MSG", "/MERGE_LIST", "/PATCHSET_LEVEL"];

#[derive(Debug, Deserialize)]
struct AccountInfo {
    #[serde(rename = "_account_id")]
    account_id: u64,
}

#[derive(Debug, Deserialize)]
struct FileInfo {
    #[serde(default)]
    status: Option<String>,
}

#[derive(Debug, Deserialize)]
struct RevisionInfo {
    #[serde(rename = "_number")]
    number: u32,
    #[serde(default)]
    files: BTreeMap<String, FileInfo>,
}

#[derive(Debug, Deserialize)]
struct ChangeInfo {
    project: String,
    #[serde(rename = "_number")]
    number: u64,
    owner: AccountInfo,
    #[serde(default)]
    revisions: BTreeMap<String, RevisionInfo>,
    #[serde(rename = "_more_changes", default)]
    more_changes: bool,
}

#[derive(Debug, Deserialize)]
struct CommentRange {
    start_line: u32,
    end_line: u32,
    #[serde(default)]
    end_character: u32,
}

#[derive(Debug, Deserialize)]
struct CommentInfo {
    #[serde(default)]
    author: Option<AccountInfo>,
    #[serde(default)]
    patch_set: Option<u32>,
    #[serde(default)]
    side: Option<String>,
    #[serde(default)]
    line: Option<u32>,
    #[serde(default)]
    range: Option<CommentRange>,
    #[serde(default)]
    message: String,
}

impl CommentRange {
    /// Line span of a character range. A range ending at column 0 of a later
    /// line does not touch that line.
    fn lines(&self) -> (u32, u32) {
        let end = if self.end_character == 0 && self.end_line > self.start_line {
            self.end_line - 1
        } else {
            self.end_line
        };
        (self.start_line, end)
    }
}

fn endpoint(project: &ProjectRef, path: &str) -> Result<Url, MinerError> {
    let base = project.base_url.trim_end_matches('/');
    Url::parse(&format!("{base}/{path}")).map_err(|e| MinerError::InvalidProject {
        reason: format!("cannot build URL for {path}: {e}"),
    })
}

/// Mines up to `limit` changes of `project` and expands each into its review
/// rounds.
pub fn fetch_gerrit_rounds(
    client: &ApiClient<'_>,
    project: &ProjectRef,
    limit: usize,
) -> Result<Vec<ReviewRound>, MinerError> {
    if project.host_kind != HostKind::Gerrit {
        return Err(MinerError::WrongHost {
            expected: HostKind::Gerrit,
            found: project.host_kind,
        });
    }
    project.validate()?;
    if limit == 0 {
        return Ok(Vec::new());
    }
    let changes = list_changes(client, project, limit)?;
    let mut rounds = Vec::new();
    for change in changes {
        rounds.extend(expand_change(client, project, change)?);
    }
    Ok(rounds)
}

fn list_changes(
    client: &ApiClient<'_>,
    project: &ProjectRef,
    limit: usize,
) -> Result<Vec<ChangeInfo>, MinerError> {
    let mut selected = Vec::new();
    let mut start = 0usize;
    loop {
        let url = endpoint(
            project,
            &format!(
                "changes/?q=status:merged&o=ALL_REVISIONS&o=ALL_FILES&n={PAGE_SIZE}&S={start}"
            ),
        )?;
        let page: Vec<ChangeInfo> = client.get_json(&url, "changes")?;
        let more = page.last().is_some_and(|c| c.more_changes);
        let fetched = page.len();
        for change in page {
            if change.project == project.project_id {
                selected.push(change);
                if selected.len() == limit {
                    return Ok(selected);
                }
            }
        }
        if !more || fetched == 0 {
            return Ok(selected);
        }
        start += fetched;
    }
}

fn expand_change(
    client: &ApiClient<'_>,
    project: &ProjectRef,
    change: ChangeInfo,
) -> Result<Vec<ReviewRound>, MinerError> {
    let change_id = change.number.to_string();
    let mut revisions: Vec<(String, RevisionInfo)> = change.revisions.into_iter().collect();
    revisions.sort_by_key(|(_, r)| r.number);

    let comments_url = endpoint(project, &format!("changes/{change_id}/comments"))?;
    let comments: BTreeMap<String, Vec<CommentInfo>> = client.get_json(&comments_url, "comments")?;

    let mut snapshots = Vec::with_capacity(revisions.len());
    for (sha, revision) in &revisions {
        snapshots.push(fetch_files(client, project, &change_id, sha, revision)?);
    }

    let mut rounds = Vec::with_capacity(revisions.len());
    for (index, (_, revision)) in revisions.iter().enumerate() {
        let round_index = index as u32;
        let mut round_comments = Vec::new();
        for (path, list) in &comments {
            if MAGIC_PATHS.contains(&path.as_str()) {
                continue;
            }
            for c in list {
                if c.patch_set != Some(revision.number) || c.side.as_deref() == Some("PARENT") {
                    continue;
                }
                let (line_start, line_end) = match (&c.range, c.line) {
                    (Some(range), _) => range.lines(),
                    (None, Some(line)) => (line, line),
                    (None, None) => continue,
                };
                let author = c.author.as_ref().map(|a| a.account_id);
                round_comments.push(ReviewComment {
                    author_id: author.map_or_else(|| "unknown".to_string(), |a| a.to_string()),
                    is_contributor: author == Some(change.owner.account_id),
                    path: path.clone(),
                    line_start,
                    line_end,
                    body: c.message.clone(),
                    round_index,
                });
            }
        }
        let mut round = ReviewRound {
            project: project.clone(),
            change_id: change_id.clone(),
            round_index,
            submitted: snapshots[index].clone(),
            comments: round_comments,
            revised: snapshots.get(index + 1).cloned().unwrap_or_default(),
        };
        let dropped = retain_valid_comments(&mut round);
        if dropped > 0 {
            log::debug!("change {change_id} round {round_index}: dropped {dropped} comments outside submitted files");
        }
        rounds.push(round);
    }
    Ok(rounds)
}

fn fetch_files(
    client: &ApiClient<'_>,
    project: &ProjectRef,
    change_id: &str,
    sha: &str,
    revision: &RevisionInfo,
) -> Result<Vec<FileVersion>, MinerError> {
    let mut files = Vec::new();
    for (path, info) in &revision.files {
        if MAGIC_PATHS.contains(&path.as_str())
            || info.status.as_deref() == Some("D")
            || !super::is_java_path(path)
        {
            continue;
        }
        let encoded = utf8_percent_encode(path, NON_ALPHANUMERIC).to_string();
        let url = endpoint(
            project,
            &format!("changes/{change_id}/revisions/{sha}/files/{encoded}/content"),
        )?;
        let Some(body) = client.get_text(&url)? else {
            continue;
        };
        let bytes = base64::engine::general_purpose::STANDARD
            .decode(body.trim())
            .map_err(|e| MinerError::Parse {
                endpoint: "content".into(),
                field: path.clone(),
                reason: format!("invalid base64: {e}"),
            })?;
        let content = String::from_utf8(bytes).map_err(|e| MinerError::Parse {
            endpoint: "content".into(),
            field: path.clone(),
            reason: format!("not UTF-8: {e}"),
        })?;
        files.push(FileVersion::new(path.clone(), content, sha));
    }
    Ok(files)
}
