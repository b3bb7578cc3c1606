//! GitHub miner.
//!
//! Pull requests have no explicit rounds. Commits and review comments are
//! merged into one timeline and a new round starts at each contributor push
//! that follows at least one reviewer comment. Consecutive commits with no
//! comment between them count as one push.

use base64::Engine;
use percent_encoding::{utf8_percent_encode, AsciiSet, CONTROLS};
use serde::Deserialize;
use url::Url;

use super::transport::ApiClient;
use super::types::retain_valid_comments;
use super::{FileVersion, HostKind, MinerError, ProjectRef, ReviewComment, ReviewRound};

const PER_PAGE: usize = 100;

// Path segments keep `/` but escape everything that would break the URL.
const PATH_SET: &AsciiSet = &CONTROLS
    .add(b' ')
    .add(b'"')
    .add(b'#')
    .add(b'%')
    .add(b'?')
    .add(b'<')
    .add(b'>')
    .add(b'`')
    .add(b'{')
    .add(b'}');

#[derive(Debug, Deserialize)]
struct User {
    login: String,
}

#[derive(Debug, Deserialize)]
struct PullInfo {
    number: u64,
    user: User,
}

#[derive(Debug, Deserialize)]
struct CommitPerson {
    date: String,
}

#[derive(Debug, Deserialize)]
struct CommitDetail {
    committer: CommitPerson,
}

#[derive(Debug, Deserialize)]
struct CommitInfo {
    sha: String,
    commit: CommitDetail,
}

#[derive(Debug, Deserialize)]
struct PullFile {
    filename: String,
    #[serde(default)]
    status: String,
}

#[derive(Debug, Deserialize)]
struct ReviewCommentInfo {
    #[serde(default)]
    user: Option<User>,
    path: String,
    #[serde(default)]
    line: Option<u32>,
    #[serde(default)]
    start_line: Option<u32>,
    #[serde(default)]
    original_line: Option<u32>,
    #[serde(default)]
    original_start_line: Option<u32>,
    body: String,
    created_at: String,
}

#[derive(Debug, Deserialize)]
struct ContentInfo {
    content: String,
    #[serde(default)]
    encoding: String,
}

impl ReviewCommentInfo {
    /// Anchor on the commit the comment was written against, falling back to
    /// the current diff position.
    fn anchor(&self) -> Option<(u32, u32)> {
        let (start, end) = match (self.original_line, self.line) {
            (Some(end), _) => (self.original_start_line, end),
            (None, Some(end)) => (self.start_line, end),
            (None, None) => return None,
        };
        let start = start.unwrap_or(end).min(end);
        Some((start, end))
    }
}

fn api_url(project: &ProjectRef, path: &str) -> Result<Url, MinerError> {
    let base = project.base_url.trim_end_matches('/');
    Url::parse(&format!("{base}/repos/{}/{path}", project.project_id)).map_err(|e| {
        MinerError::InvalidProject {
            reason: format!("cannot build URL for {path}: {e}"),
        }
    })
}

/// Mines up to `limit` pull requests of `project` and splits each into
/// review rounds.
pub fn fetch_github_rounds(
    client: &ApiClient<'_>,
    project: &ProjectRef,
    limit: usize,
) -> Result<Vec<ReviewRound>, MinerError> {
    if project.host_kind != HostKind::Github {
        return Err(MinerError::WrongHost {
            expected: HostKind::Github,
            found: project.host_kind,
        });
    }
    project.validate()?;
    if limit == 0 {
        return Ok(Vec::new());
    }
    let mut pulls = Vec::new();
    for page in 1.. {
        let url = api_url(project, &format!("pulls?state=all&per_page={PER_PAGE}&page={page}"))?;
        let batch: Vec<PullInfo> = client.get_json(&url, "pulls")?;
        let short = batch.len() < PER_PAGE;
        pulls.extend(batch);
        if short || pulls.len() >= limit {
            break;
        }
    }
    pulls.truncate(limit);
    let mut rounds = Vec::new();
    for pull in pulls {
        rounds.extend(expand_pull(client, project, &pull)?);
    }
    Ok(rounds)
}

fn get_all<T: for<'de> Deserialize<'de>>(
    client: &ApiClient<'_>,
    project: &ProjectRef,
    path: &str,
    endpoint: &str,
) -> Result<Vec<T>, MinerError> {
    let mut out = Vec::new();
    for page in 1.. {
        let url = api_url(project, &format!("{path}?per_page={PER_PAGE}&page={page}"))?;
        let batch: Vec<T> = client.get_json(&url, endpoint)?;
        let short = batch.len() < PER_PAGE;
        out.extend(batch);
        if short {
            break;
        }
    }
    Ok(out)
}

enum Event<'a> {
    Push(&'a str),
    Comment(&'a ReviewCommentInfo),
}

/// Commit range of one round: reviewed snapshot, its comments and the
/// snapshot pushed in response.
struct Segment<'a> {
    base: &'a str,
    comments: Vec<&'a ReviewCommentInfo>,
    revised: Option<&'a str>,
}

fn segment<'a>(
    commits: &'a [CommitInfo],
    comments: &'a [ReviewCommentInfo],
    author: &str,
) -> Vec<Segment<'a>> {
    let Some(first) = commits.first() else {
        return Vec::new();
    };
    let mut events: Vec<(&str, u8, Event<'a>)> = Vec::new();
    for c in commits {
        events.push((c.commit.committer.date.as_str(), 0, Event::Push(&c.sha)));
    }
    for c in comments {
        events.push((c.created_at.as_str(), 1, Event::Comment(c)));
    }
    // Timestamps are ISO-8601 UTC, so string order is time order. A commit
    // and a comment with the same timestamp: the commit comes first.
    events.sort_by(|a, b| a.0.cmp(b.0).then(a.1.cmp(&b.1)));

    let mut closed: Vec<Segment<'a>> = Vec::new();
    let mut current = Segment {
        base: &first.sha,
        comments: Vec::new(),
        revised: None,
    };
    let mut reviewer_commented = false;
    let mut extending_push = false;
    for (_, _, event) in events {
        match event {
            Event::Push(sha) => {
                if reviewer_commented {
                    let done = std::mem::replace(
                        &mut current,
                        Segment {
                            base: sha,
                            comments: Vec::new(),
                            revised: None,
                        },
                    );
                    closed.push(Segment {
                        revised: Some(sha),
                        ..done
                    });
                    reviewer_commented = false;
                    extending_push = true;
                } else {
                    if extending_push {
                        if let Some(last) = closed.last_mut() {
                            last.revised = Some(sha);
                        }
                    }
                    current.base = sha;
                }
            }
            Event::Comment(c) => {
                extending_push = false;
                let by_author = c.user.as_ref().is_some_and(|u| u.login == author);
                if !by_author {
                    reviewer_commented = true;
                }
                current.comments.push(c);
            }
        }
    }
    if !current.comments.is_empty() || closed.is_empty() {
        closed.push(current);
    }
    closed
}

fn expand_pull(
    client: &ApiClient<'_>,
    project: &ProjectRef,
    pull: &PullInfo,
) -> Result<Vec<ReviewRound>, MinerError> {
    let number = pull.number;
    let commits: Vec<CommitInfo> = get_all(client, project, &format!("pulls/{number}/commits"), "commits")?;
    let comments: Vec<ReviewCommentInfo> =
        get_all(client, project, &format!("pulls/{number}/comments"), "comments")?;
    let files: Vec<PullFile> = get_all(client, project, &format!("pulls/{number}/files"), "files")?;
    let paths: Vec<&str> = files
        .iter()
        .filter(|f| super::is_java_path(&f.filename) && f.status != "removed")
        .map(|f| f.filename.as_str())
        .collect();

    let mut rounds = Vec::new();
    for (index, seg) in segment(&commits, &comments, &pull.user.login).into_iter().enumerate() {
        let round_index = index as u32;
        let submitted = fetch_snapshot(client, project, &paths, seg.base)?;
        let revised = match seg.revised {
            Some(sha) => fetch_snapshot(client, project, &paths, sha)?,
            None => Vec::new(),
        };
        let round_comments = seg
            .comments
            .iter()
            .filter_map(|c| {
                let (line_start, line_end) = c.anchor()?;
                let login = c.user.as_ref().map_or("ghost", |u| u.login.as_str());
                Some(ReviewComment {
                    author_id: login.to_string(),
                    is_contributor: login == pull.user.login,
                    path: c.path.clone(),
                    line_start,
                    line_end,
                    body: c.body.clone(),
                    round_index,
                })
            })
            .collect();
        let mut round = ReviewRound {
            project: project.clone(),
            change_id: number.to_string(),
            round_index,
            submitted,
            comments: round_comments,
            revised,
        };
        retain_valid_comments(&mut round);
        rounds.push(round);
    }
    Ok(rounds)
}

fn fetch_snapshot(
    client: &ApiClient<'_>,
    project: &ProjectRef,
    paths: &[&str],
    sha: &str,
) -> Result<Vec<FileVersion>, MinerError> {
    let mut files = Vec::new();
    for path in paths {
        let encoded = utf8_percent_encode(path, PATH_SET);
        let url = api_url(project, &format!("contents/{encoded}?ref={sha}"))?;
        let Some(info) = client.get_json_opt::<ContentInfo>(&url, "contents")? else {
            continue;
        };
        if info.encoding != "base64" {
            return Err(MinerError::Parse {
                endpoint: "contents".into(),
                field: "encoding".into(),
                reason: format!("unsupported encoding {:?} for {path}", info.encoding),
            });
        }
        let packed: String = info.content.split_whitespace().collect();
        let bytes = base64::engine::general_purpose::STANDARD
            .decode(packed)
            .map_err(|e| MinerError::Parse {
                endpoint: "contents".into(),
                field: "content".into(),
                reason: format!("invalid base64 for {path}: {e}"),
            })?;
        let content = String::from_utf8(bytes).map_err(|e| MinerError::Parse {
            endpoint: "contents".into(),
            field: "content".into(),
            reason: format!("{path} is not UTF-8: {e}"),
        })?;
        files.push(FileVersion::new(*path, content, sha));
    }
    Ok(files)
}
