//! HTTP access for the miners, with a replay mode that serves responses from
//! files on disk.

use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Duration;

use serde::de::DeserializeOwned;
use url::Url;

use super::MinerError;

/// Environment variable holding a GitHub token, sent as a bearer token.
pub const GITHUB_TOKEN_ENV: &str = "GITHUB_TOKEN";
/// Environment variable holding Gerrit HTTP credentials as `user:password`.
pub const GERRIT_CREDENTIALS_ENV: &str = "GERRIT_HTTP_CREDENTIALS";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpResponse {
    pub status: u16,
    pub body: String,
    pub retry_after: Option<Duration>,
}

impl HttpResponse {
    pub fn ok(body: impl Into<String>) -> Self {
        Self {
            status: 200,
            body: body.into(),
            retry_after: None,
        }
    }

    pub fn status(status: u16) -> Self {
        Self {
            status,
            body: String::new(),
            retry_after: None,
        }
    }
}

pub trait Transport: Send + Sync {
    fn get(&self, url: &Url) -> Result<HttpResponse, MinerError>;
}

/// Live HTTP transport.
pub struct HttpTransport {
    agent: ureq::Agent,
    authorization: Option<String>,
}

impl HttpTransport {
    pub fn new(authorization: Option<String>) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(Duration::from_secs(60)))
            .user_agent(concat!("revise/", env!("CARGO_PKG_VERSION")))
            .build()
            .into();
        Self {
            agent,
            authorization,
        }
    }

    /// A transport authenticated from `GITHUB_TOKEN`, when set.
    pub fn github_from_env() -> Self {
        let auth = std::env::var(GITHUB_TOKEN_ENV)
            .ok()
            .filter(|t| !t.is_empty())
            .map(|t| format!("Bearer {t}"));
        Self::new(auth)
    }

    /// A transport authenticated from `GERRIT_HTTP_CREDENTIALS`, when set.
    pub fn gerrit_from_env() -> Self {
        use base64::Engine;
        let auth = std::env::var(GERRIT_CREDENTIALS_ENV)
            .ok()
            .filter(|c| c.contains(':'))
            .map(|c| format!("Basic {}", base64::engine::general_purpose::STANDARD.encode(c)));
        Self::new(auth)
    }

    pub fn is_authenticated(&self) -> bool {
        self.authorization.is_some()
    }
}

impl Transport for HttpTransport {
    fn get(&self, url: &Url) -> Result<HttpResponse, MinerError> {
        let mut request = self.agent.get(url.as_str());
        if let Some(auth) = &self.authorization {
            request = request.header("Authorization", auth);
        }
        let mut response = request.call().map_err(|e| MinerError::Fetch {
            url: url.to_string(),
            reason: e.to_string(),
        })?;
        let status = response.status().as_u16();
        let retry_after = response
            .headers()
            .get("retry-after")
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.trim().parse::<u64>().ok())
            .map(Duration::from_secs);
        let body = response
            .body_mut()
            .read_to_string()
            .map_err(|e| MinerError::Fetch {
                url: url.to_string(),
                reason: e.to_string(),
            })?;
        Ok(HttpResponse {
            status,
            body,
            retry_after,
        })
    }
}

/// Replays recorded API responses from a directory.
///
/// A request for `https://host/a/b/c?x=1` is served from `<root>/a/b/c@x=1.body`.
/// A trailing slash maps to an `index` file (`/changes/` becomes
/// `changes/index.body`). Slashes inside the query are written as `%2F`. A
/// missing file answers 404.
pub struct FixtureTransport {
    root: PathBuf,
}

impl FixtureTransport {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn fixture_path(&self, url: &Url) -> PathBuf {
        self.root.join(fixture_key(url))
    }
}

pub fn fixture_key(url: &Url) -> String {
    let mut key = url.path().trim_start_matches('/').to_string();
    if key.is_empty() || key.ends_with('/') {
        key.push_str("index");
    }
    if let Some(query) = url.query() {
        key.push('@');
        key.push_str(&query.replace('/', "%2F"));
    }
    key.push_str(".body");
    key
}

impl Transport for FixtureTransport {
    fn get(&self, url: &Url) -> Result<HttpResponse, MinerError> {
        let path = self.fixture_path(url);
        match std::fs::read_to_string(&path) {
            Ok(body) => Ok(HttpResponse::ok(body)),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(HttpResponse::status(404)),
            Err(e) => Err(MinerError::Fetch {
                url: url.to_string(),
                reason: format!("reading fixture {}: {e}", path.display()),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RetryPolicy {
    /// Retries after the first attempt for rate-limited or transient
    /// responses.
    pub max_retries: u32,
    /// Delay before the first retry; doubles on each further retry unless the
    /// server sent `Retry-After`.
    pub base_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            max_retries: 5,
            base_delay: Duration::from_secs(2),
        }
    }
}

/// JSON access on top of a [`Transport`] with backoff on rate limits.
pub struct ApiClient<'a> {
    transport: &'a dyn Transport,
    retry: RetryPolicy,
    /// Gerrit prefixes JSON bodies with `)]}'` to defeat XSSI.
    strip_xssi: bool,
}

const XSSI_PREFIX: &str = ")]}'";

impl<'a> ApiClient<'a> {
    pub fn new(transport: &'a dyn Transport, retry: RetryPolicy) -> Self {
        Self {
            transport,
            retry,
            strip_xssi: false,
        }
    }

    pub fn gerrit(transport: &'a dyn Transport, retry: RetryPolicy) -> Self {
        Self {
            strip_xssi: true,
            ..Self::new(transport, retry)
        }
    }

    /// Fetches `url`, returning `None` on 404.
    pub fn get_text(&self, url: &Url) -> Result<Option<String>, MinerError> {
        let mut attempt = 0u32;
        loop {
            let response = match self.transport.get(url) {
                Ok(r) => r,
                Err(e @ MinerError::Fetch { .. }) if attempt < self.retry.max_retries => {
                    log::warn!("{e}; retrying");
                    self.pause(attempt, None);
                    attempt += 1;
                    continue;
                }
                Err(e) => return Err(e),
            };
            match response.status {
                200..=299 => {
                    let body = if self.strip_xssi {
                        response
                            .body
                            .strip_prefix(XSSI_PREFIX)
                            .map(|b| b.trim_start_matches(['\r', '\n']).to_string())
                            .unwrap_or(response.body)
                    } else {
                        response.body
                    };
                    return Ok(Some(body));
                }
                404 => return Ok(None),
                429 | 502 | 503 | 504 => {
                    if attempt >= self.retry.max_retries {
                        return Err(MinerError::RateLimited {
                            url: url.to_string(),
                            attempts: attempt + 1,
                        });
                    }
                    log::warn!("{} answered {}; backing off", url, response.status);
                    self.pause(attempt, response.retry_after);
                    attempt += 1;
                }
                401 | 403 => {
                    return Err(MinerError::Fetch {
                        url: url.to_string(),
                        reason: format!("authentication failed with status {}", response.status),
                    })
                }
                status => {
                    return Err(MinerError::Fetch {
                        url: url.to_string(),
                        reason: format!("unexpected status {status}"),
                    })
                }
            }
        }
    }

    /// Fetches and decodes JSON. A 404 is an error here; use
    /// [`ApiClient::get_json_opt`] where absence is expected.
    pub fn get_json<T: DeserializeOwned>(&self, url: &Url, endpoint: &str) -> Result<T, MinerError> {
        self.get_json_opt(url, endpoint)?
            .ok_or_else(|| MinerError::NotFound { url: url.to_string() })
    }

    pub fn get_json_opt<T: DeserializeOwned>(
        &self,
        url: &Url,
        endpoint: &str,
    ) -> Result<Option<T>, MinerError> {
        let Some(body) = self.get_text(url)? else {
            return Ok(None);
        };
        let de = &mut serde_json::Deserializer::from_str(&body);
        serde_path_to_error::deserialize(de)
            .map(Some)
            .map_err(|e| MinerError::Parse {
                endpoint: endpoint.to_string(),
                field: e.path().to_string(),
                reason: e.inner().to_string(),
            })
    }

    fn pause(&self, attempt: u32, retry_after: Option<Duration>) {
        let delay = retry_after.unwrap_or_else(|| self.retry.base_delay * 2u32.saturating_pow(attempt));
        if !delay.is_zero() {
            std::thread::sleep(delay);
        }
    }
}

/// A transport answering from a fixed script, for tests.
pub struct ScriptedTransport {
    responses: Mutex<Vec<HttpResponse>>,
    requests: Mutex<Vec<String>>,
}

impl ScriptedTransport {
    /// Responses are served in order; once exhausted every request gets 404.
    pub fn new(responses: Vec<HttpResponse>) -> Self {
        let mut responses = responses;
        responses.reverse();
        Self {
            responses: Mutex::new(responses),
            requests: Mutex::new(Vec::new()),
        }
    }

    pub fn requests(&self) -> Vec<String> {
        self.requests.lock().expect("poisoned").clone()
    }
}

impl Transport for ScriptedTransport {
    fn get(&self, url: &Url) -> Result<HttpResponse, MinerError> {
        self.requests.lock().expect("poisoned").push(url.to_string());
        Ok(self
            .responses
            .lock()
            .expect("poisoned")
            .pop()
            .unwrap_or_else(|| HttpResponse::status(404)))
    }
}
