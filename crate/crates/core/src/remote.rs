//! HTTP client for a remote masked-LM scoring service.
//!
//! The service runs the whole left-to-right reveal loop for a sentence and
//! answers with per-token surprisals:
//!
//! ```text
//! POST {endpoint}/v1/score  {"text": "...", "mode": "sequential_score"}
//!   -> {"model_id": "...", "tokens": [{"text", "start", "end"}], "surprisal_bits": [...]}
//! POST {endpoint}/v1/score  {"text": "...", "mode": "tokenize"}
//!   -> same without "surprisal_bits"
//! GET  {endpoint}/v1/info
//!   -> {"model_id", "vocabulary_size", "max_text_len"}
//! ```
//!
//! 400 means a malformed request and 422 a text that is too long; neither is
//! retried. Transport failures, timeouts and 5xx are retried with jittered
//! exponential backoff.

use std::sync::{Condvar, Mutex};
use std::thread;
use std::time::Duration;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::scoring::{check_token_spans, ScoreError, ScoredToken, Scorer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FillMode {
    Tokenize,
    SequentialScore,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FillRequest {
    pub text: String,
    pub mode: FillMode,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireToken {
    pub text: String,
    /// Half-open character span.
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FillResponse {
    pub model_id: String,
    pub tokens: Vec<WireToken>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surprisal_bits: Option<Vec<f64>>,
}

impl FillResponse {
    /// Checks the response against the text it answers: spans ordered,
    /// non-overlapping and covering every non-whitespace character, and in
    /// scoring mode one finite non-negative surprisal per token.
    pub fn validate(&self, text: &str, mode: FillMode) -> Result<(), ScoreError> {
        check_token_spans(text, self.tokens.iter().map(|t| (t.start, t.end)))
            .map_err(|e| ScoreError::ProtocolViolation(e.to_string()))?;
        if mode == FillMode::SequentialScore {
            let bits = self
                .surprisal_bits
                .as_ref()
                .ok_or_else(|| ScoreError::ProtocolViolation("missing surprisal_bits".into()))?;
            if bits.len() != self.tokens.len() {
                return Err(ScoreError::ProtocolViolation(format!(
                    "{} surprisals for {} tokens",
                    bits.len(),
                    self.tokens.len()
                )));
            }
            if let Some((i, b)) = bits
                .iter()
                .enumerate()
                .find(|(_, b)| !b.is_finite() || **b < 0.0)
            {
                return Err(ScoreError::ProtocolViolation(format!(
                    "surprisal {i} is {b}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ServiceInfo {
    pub model_id: String,
    pub vocabulary_size: u64,
    pub max_text_len: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RetryPolicy {
    /// Per-attempt timeout.
    pub timeout: Duration,
    /// Attempts after the first.
    pub max_retries: u32,
    /// Requests this client may have outstanding at once.
    pub max_in_flight: usize,
    pub backoff_base: Duration,
    pub backoff_factor: f64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            timeout: Duration::from_secs(30),
            max_retries: 3,
            max_in_flight: 4,
            backoff_base: Duration::from_millis(250),
            backoff_factor: 2.0,
        }
    }
}

impl RetryPolicy {
    /// Delay before retry `attempt` (0-based), drawn from the upper half of
    /// the exponential step.
    pub fn backoff(&self, attempt: u32) -> Duration {
        let full = self.backoff_base.as_secs_f64() * self.backoff_factor.powi(attempt as i32);
        let jitter: f64 = rand::rng().random_range(0.5..=1.0);
        Duration::from_secs_f64(full * jitter)
    }
}

/// Counting semaphore bounding concurrent requests.
struct Gate {
    limit: usize,
    used: Mutex<usize>,
    freed: Condvar,
}

struct Permit<'a>(&'a Gate);

impl Gate {
    fn new(limit: usize) -> Self {
        Self {
            limit: limit.max(1),
            used: Mutex::new(0),
            freed: Condvar::new(),
        }
    }

    fn acquire(&self) -> Permit<'_> {
        let mut used = self.used.lock().unwrap_or_else(|e| e.into_inner());
        while *used >= self.limit {
            used = self.freed.wait(used).unwrap_or_else(|e| e.into_inner());
        }
        *used += 1;
        Permit(self)
    }
}

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        let mut used = self.0.used.lock().unwrap_or_else(|e| e.into_inner());
        *used -= 1;
        self.0.freed.notify_one();
    }
}

enum Failure {
    Retryable(ScoreError),
    Final(ScoreError),
}

/// Shareable client handle; every request passes through one in-flight gate.
pub struct RemoteClient {
    endpoint: String,
    policy: RetryPolicy,
    http: reqwest::blocking::Client,
    gate: Gate,
}

impl RemoteClient {
    pub fn new(endpoint: &str, policy: RetryPolicy) -> Result<Self, ScoreError> {
        let http = reqwest::blocking::Client::builder()
            .timeout(policy.timeout)
            .build()
            .map_err(|e| ScoreError::ScorerUnavailable(e.to_string()))?;
        Ok(Self {
            endpoint: endpoint.trim_end_matches('/').to_string(),
            gate: Gate::new(policy.max_in_flight),
            policy,
            http,
        })
    }

    pub fn endpoint(&self) -> &str {
        &self.endpoint
    }

    pub fn policy(&self) -> &RetryPolicy {
        &self.policy
    }

    fn with_retries<T>(
        &self,
        mut attempt: impl FnMut() -> Result<T, Failure>,
    ) -> Result<T, ScoreError> {
        let mut tries = 0;
        loop {
            let result = {
                let _permit = self.gate.acquire();
                attempt()
            };
            match result {
                Ok(v) => return Ok(v),
                Err(Failure::Final(e)) => return Err(e),
                Err(Failure::Retryable(e)) if tries >= self.policy.max_retries => {
                    return Err(match e {
                        ScoreError::ScorerUnavailable(m) => ScoreError::ScorerUnavailable(format!(
                            "{m} (after {} attempts)",
                            tries + 1
                        )),
                        other => other,
                    });
                }
                Err(Failure::Retryable(_)) => {
                    thread::sleep(self.policy.backoff(tries));
                    tries += 1;
                }
            }
        }
    }

    fn send(&self, request: reqwest::blocking::RequestBuilder) -> Result<String, Failure> {
        let response = request.send().map_err(transport)?;
        let status = response.status();
        let body = response.text().map_err(transport)?;
        if status.is_server_error() {
            return Err(Failure::Retryable(ScoreError::ScorerUnavailable(format!(
                "status {status}: {body}"
            ))));
        }
        if status.is_client_error() {
            return Err(Failure::Final(ScoreError::Rejected {
                status: status.as_u16(),
                message: body,
            }));
        }
        if !status.is_success() {
            return Err(Failure::Final(ScoreError::ProtocolViolation(format!(
                "unexpected status {status}"
            ))));
        }
        Ok(body)
    }

    /// Sends one `/v1/score` request and validates the answer against `text`.
    pub fn request_score(&self, text: &str, mode: FillMode) -> Result<FillResponse, ScoreError> {
        if text.trim().is_empty() {
            return Err(ScoreError::EmptyText);
        }
        let url = format!("{}/v1/score", self.endpoint);
        let body = FillRequest {
            text: text.to_string(),
            mode,
        };
        let raw = self.with_retries(|| self.send(self.http.post(&url).json(&body)))?;
        let response: FillResponse = serde_json::from_str(&raw)
            .map_err(|e| ScoreError::ProtocolViolation(format!("bad score body: {e}")))?;
        response.validate(text, mode)?;
        Ok(response)
    }

    pub fn probe(&self) -> Result<ServiceInfo, ScoreError> {
        let url = format!("{}/v1/info", self.endpoint);
        let raw = self.with_retries(|| self.send(self.http.get(&url)))?;
        serde_json::from_str(&raw)
            .map_err(|e| ScoreError::ProtocolViolation(format!("bad info body: {e}")))
    }
}

fn transport(e: reqwest::Error) -> Failure {
    Failure::Retryable(if e.is_timeout() {
        ScoreError::Timeout(e.to_string())
    } else {
        ScoreError::ScorerUnavailable(e.to_string())
    })
}

/// Scorer backed by a remote service; one round trip per sentence.
pub struct RemoteScorer {
    id: String,
    client: RemoteClient,
}

impl RemoteScorer {
    pub fn new(id: impl Into<String>, client: RemoteClient) -> Self {
        Self {
            id: id.into(),
            client,
        }
    }

    /// Probes the service and uses its model id as the scorer id.
    pub fn connect(endpoint: &str, policy: RetryPolicy) -> Result<Self, ScoreError> {
        let client = RemoteClient::new(endpoint, policy)?;
        let info = client.probe()?;
        Ok(Self::new(info.model_id, client))
    }

    pub fn client(&self) -> &RemoteClient {
        &self.client
    }

    pub fn into_client(self) -> RemoteClient {
        self.client
    }
}

impl Scorer for RemoteScorer {
    fn id(&self) -> &str {
        &self.id
    }

    fn score(&self, text: &str) -> Result<Vec<ScoredToken>, ScoreError> {
        let response = self.client.request_score(text, FillMode::SequentialScore)?;
        let bits = response.surprisal_bits.expect("validated");
        Ok(response
            .tokens
            .into_iter()
            .zip(bits)
            .map(|(t, b)| ScoredToken::new(t.text, t.start, t.end, b))
            .collect())
    }
}
