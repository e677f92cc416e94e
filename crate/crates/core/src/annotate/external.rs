//! Adapters for an external sentiment analyzer.
//!
//! The contract is deliberately small: send text, get back a score in
//! `[-1, 1]` and a non-negative magnitude.

use std::collections::HashMap;
use std::io::BufRead;
use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExternalSentiment {
    pub score: f64,
    pub magnitude: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum ExternalError {
    #[error("external sentiment service unavailable: {0}")]
    Unavailable(String),
    #[error("external sentiment response invalid: {0}")]
    InvalidResponse(String),
}

pub trait SentimentAdapter: Send + Sync {
    fn analyze(&self, text: &str) -> Result<ExternalSentiment, ExternalError>;
}

fn validate(s: ExternalSentiment) -> Result<ExternalSentiment, ExternalError> {
    if !(-1.0..=1.0).contains(&s.score) || s.magnitude < 0.0 || !s.magnitude.is_finite() {
        return Err(ExternalError::InvalidResponse(format!(
            "score {} magnitude {}",
            s.score, s.magnitude
        )));
    }
    Ok(s)
}

/// Returns fixed scores for known texts and a default score for the rest.
#[derive(Debug, Clone, Default)]
pub struct MockSentimentAdapter {
    scores: HashMap<String, ExternalSentiment>,
    default: Option<ExternalSentiment>,
}

#[derive(Debug, Deserialize)]
struct MockRecord {
    text: String,
    score: f64,
    #[serde(default)]
    magnitude: f64,
}

impl MockSentimentAdapter {
    /// Every text gets `score`.
    pub fn constant(score: f64) -> Self {
        Self {
            scores: HashMap::new(),
            default: Some(ExternalSentiment {
                score,
                magnitude: score.abs(),
            }),
        }
    }

    pub fn with(mut self, text: &str, score: f64) -> Self {
        self.scores.insert(
            text.to_string(),
            ExternalSentiment {
                score,
                magnitude: score.abs(),
            },
        );
        self
    }

    /// Loads `{"text", "score", "magnitude"}` records, one per line. Texts
    /// not in the file score `default_score`.
    pub fn from_jsonl(path: &Path, default_score: f64) -> std::io::Result<Self> {
        let file = std::io::BufReader::new(std::fs::File::open(path)?);
        let mut scores = HashMap::new();
        for (n, line) in file.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let r: MockRecord = serde_json::from_str(&line).map_err(|e| {
                std::io::Error::new(std::io::ErrorKind::InvalidData, format!("line {}: {e}", n + 1))
            })?;
            scores.insert(
                r.text,
                ExternalSentiment {
                    score: r.score,
                    magnitude: r.magnitude,
                },
            );
        }
        Ok(Self {
            scores,
            default: Some(ExternalSentiment {
                score: default_score,
                magnitude: default_score.abs(),
            }),
        })
    }
}

impl SentimentAdapter for MockSentimentAdapter {
    fn analyze(&self, text: &str) -> Result<ExternalSentiment, ExternalError> {
        match self.scores.get(text).copied().or(self.default) {
            Some(s) => validate(s),
            None => Err(ExternalError::Unavailable("no mock score".into())),
        }
    }
}

/// Always unavailable; the offline configuration.
#[derive(Debug, Clone, Copy, Default)]
pub struct UnavailableAdapter;

impl SentimentAdapter for UnavailableAdapter {
    fn analyze(&self, _text: &str) -> Result<ExternalSentiment, ExternalError> {
        Err(ExternalError::Unavailable("external sentiment disabled".into()))
    }
}

/// POSTs `{"text": ...}` to a configured endpoint and expects
/// `{"score": f, "magnitude": f}` back.
pub struct HttpSentimentAdapter {
    url: String,
    agent: ureq::Agent,
}

impl HttpSentimentAdapter {
    pub fn new(url: &str, timeout: Duration) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(true)
            .build()
            .into();
        Self {
            url: url.to_string(),
            agent,
        }
    }
}

impl SentimentAdapter for HttpSentimentAdapter {
    fn analyze(&self, text: &str) -> Result<ExternalSentiment, ExternalError> {
        let mut resp = self
            .agent
            .post(&self.url)
            .send_json(serde_json::json!({ "text": text }))
            .map_err(|e| ExternalError::Unavailable(e.to_string()))?;
        let s: ExternalSentiment = resp
            .body_mut()
            .read_json()
            .map_err(|e| ExternalError::InvalidResponse(e.to_string()))?;
        validate(s)
    }
}
