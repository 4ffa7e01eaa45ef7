use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::thread;
use std::time::Duration;

use serde_json::{json, Value};
use thiserror::Error;

/// Instruction sent ahead of every base text.
pub const REPHRASE_PROMPT: &str = "Rephrase the following description of a time-series signal \
into fluent prose without adding or removing characteristics:";

/// Default cap on concurrent rephrase requests.
pub const DEFAULT_IN_FLIGHT: usize = 4;

pub const ENDPOINT_ENV: &str = "TACO_LLM_ENDPOINT";
pub const MODEL_ENV: &str = "TACO_LLM_MODEL";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RephraseError {
    #[error("rephrase endpoint unavailable: {0}")]
    Unavailable(String),
    #[error("malformed rephrase response: {0}")]
    ProtocolError(String),
    #[error("rephrase endpoint returned an empty completion")]
    EmptyCompletion,
}

/// Client for a chat-completion style JSON endpoint.
#[derive(Debug, Clone)]
pub struct Rephraser {
    endpoint: String,
    model: String,
    seed: u64,
    timeout: Duration,
}

impl Rephraser {
    pub fn new(endpoint: impl Into<String>, model: impl Into<String>, seed: u64) -> Self {
        Self {
            endpoint: endpoint.into(),
            model: model.into(),
            seed,
            timeout: Duration::from_secs(60),
        }
    }

    /// Reads `TACO_LLM_ENDPOINT` and `TACO_LLM_MODEL`; `None` unless both are set.
    pub fn from_env(seed: u64) -> Option<Self> {
        let endpoint = std::env::var(ENDPOINT_ENV).ok()?;
        let model = std::env::var(MODEL_ENV).ok()?;
        Some(Self::new(endpoint, model, seed))
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    pub fn model(&self) -> &str {
        &self.model
    }

    pub fn endpoint(&self) -> &str {
        &self.endpoint
    }

    pub fn request_body(&self, text: &str) -> Value {
        json!({
            "model": self.model,
            "messages": [
                { "role": "user", "content": format!("{REPHRASE_PROMPT}\n\n{text}") }
            ],
            "temperature": 0,
            "seed": self.seed,
        })
    }

    pub fn rephrase(&self, text: &str) -> Result<String, RephraseError> {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(self.timeout))
            .build()
            .into();
        let response = agent
            .post(&self.endpoint)
            .send_json(self.request_body(text))
            .map_err(|e| match e {
                ureq::Error::Protocol(p) => RephraseError::ProtocolError(p.to_string()),
                other => RephraseError::Unavailable(other.to_string()),
            })?;
        let body = response
            .into_body()
            .read_to_string()
            .map_err(|e| RephraseError::Unavailable(e.to_string()))?;
        parse_completion(&body)
    }

    /// Rephrases every text with at most `in_flight` requests outstanding.
    /// Results are returned in input order.
    pub fn rephrase_many(&self, texts: &[String], in_flight: usize) -> Vec<Result<String, RephraseError>> {
        let mut results: Vec<Option<Result<String, RephraseError>>> = vec![None; texts.len()];
        let next = AtomicUsize::new(0);
        let (tx, rx) = mpsc::channel();
        thread::scope(|scope| {
            for _ in 0..in_flight.max(1).min(texts.len()) {
                let tx = tx.clone();
                let next = &next;
                scope.spawn(move || loop {
                    let id = next.fetch_add(1, Ordering::Relaxed);
                    let Some(text) = texts.get(id) else { break };
                    // the index is the correlation id
                    if tx.send((id, self.rephrase(text))).is_err() {
                        break;
                    }
                });
            }
            drop(tx);
            for (id, result) in rx {
                results[id] = Some(result);
            }
        });
        results
            .into_iter()
            .map(|r| r.expect("every request answered"))
            .collect()
    }
}

/// Extracts the first completion's text from a response body.
pub(crate) fn parse_completion(body: &str) -> Result<String, RephraseError> {
    let value: Value =
        serde_json::from_str(body).map_err(|e| RephraseError::ProtocolError(e.to_string()))?;
    let first = value
        .get("choices")
        .and_then(|c| c.get(0))
        .ok_or_else(|| RephraseError::ProtocolError("missing choices[0]".into()))?;
    let text = first
        .get("message")
        .and_then(|m| m.get("content"))
        .or_else(|| first.get("text"))
        .and_then(Value::as_str)
        .ok_or_else(|| RephraseError::ProtocolError("missing completion text".into()))?;
    let text = text.trim();
    if text.is_empty() {
        return Err(RephraseError::EmptyCompletion);
    }
    Ok(text.to_string())
}
