//! Text-completion client with two backends: file replay (default, fully
//! offline and byte-deterministic) and a blocking HTTP client.
//!
//! Fixtures are keyed by the SHA-256 of the prompt plus a sample index, so
//! logged HTTP completions can be replayed bit-for-bit later.

use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const DEFAULT_TEMPERATURE: f64 = 0.7;
pub const DEFAULT_MAX_TOKENS: usize = 1024;

#[derive(Clone, Debug, PartialEq)]
pub struct CompletionRequest {
    pub prompt: String,
    pub temperature: f64,
    pub max_tokens: usize,
    /// Which of the repeated samples for this prompt to fetch (0-based).
    pub sample_index: usize,
}

impl CompletionRequest {
    pub fn new(prompt: impl Into<String>, sample_index: usize) -> Self {
        Self {
            prompt: prompt.into(),
            temperature: DEFAULT_TEMPERATURE,
            max_tokens: DEFAULT_MAX_TOKENS,
            sample_index,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompletionResult {
    pub text: String,
    pub backend: String,
}

/// Completion backend selection.
#[derive(Clone, Debug)]
pub enum Backend {
    /// Read completions from `<dir>/<sha256(prompt)>_<sample>.txt`.
    Replay { dir: PathBuf },
    /// POST `{prompt, temperature, max_tokens}` and treat the response body
    /// as the completion. The credential is read from `api_key_env` (name is
    /// configurable and documented; the value is never logged). Completions
    /// are logged under `log_dir` so later runs can replay them.
    Http {
        endpoint: String,
        api_key_env: String,
        log_dir: Option<PathBuf>,
    },
}

/// Hex SHA-256 of a prompt, the fixture key.
pub fn prompt_hash(prompt: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(prompt.as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn fixture_path(dir: &Path, prompt: &str, sample_index: usize) -> PathBuf {
    dir.join(format!("{}_{sample_index}.txt", prompt_hash(prompt)))
}

fn replay(dir: &Path, request: &CompletionRequest) -> Result<CompletionResult> {
    let path = fixture_path(dir, &request.prompt, request.sample_index);
    match std::fs::read_to_string(&path) {
        Ok(text) => Ok(CompletionResult {
            text,
            backend: "replay".to_string(),
        }),
        Err(err) if err.kind() == std::io::ErrorKind::NotFound => Err(Error::MissingFixture {
            hash: prompt_hash(&request.prompt),
            sample: request.sample_index,
        }),
        Err(err) => Err(err.into()),
    }
}

fn http(
    endpoint: &str,
    api_key_env: &str,
    log_dir: Option<&Path>,
    request: &CompletionRequest,
) -> Result<CompletionResult> {
    let client = reqwest::blocking::Client::new();
    let mut builder = client.post(endpoint).json(&serde_json::json!({
        "prompt": request.prompt,
        "temperature": request.temperature,
        "max_tokens": request.max_tokens,
    }));
    if let Ok(key) = std::env::var(api_key_env) {
        builder = builder.bearer_auth(key);
    }
    let response = builder
        .send()
        .map_err(|e| Error::Transport(e.to_string()))?;
    let status = response.status();
    let body = response
        .text()
        .map_err(|e| Error::Transport(e.to_string()))?;
    if !status.is_success() {
        return Err(Error::HttpStatus {
            status: status.as_u16(),
            body,
        });
    }
    if let Some(dir) = log_dir {
        std::fs::create_dir_all(dir)?;
        std::fs::write(fixture_path(dir, &request.prompt, request.sample_index), &body)?;
    }
    Ok(CompletionResult {
        text: body,
        backend: "http".to_string(),
    })
}

/// Fetch one completion from the chosen backend.
pub fn complete(request: &CompletionRequest, backend: &Backend) -> Result<CompletionResult> {
    match backend {
        Backend::Replay { dir } => replay(dir, request),
        Backend::Http {
            endpoint,
            api_key_env,
            log_dir,
        } => http(endpoint, api_key_env, log_dir.as_deref(), request),
    }
}
