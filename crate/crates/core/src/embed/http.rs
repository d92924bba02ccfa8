//! HTTP embeddings client.
//!
//! Speaks the common embeddings endpoint shape:
//!
//! ```text
//! POST <url>
//! {"model": "<model>", "input": ["text", ...]}
//!
//! 200 OK
//! {"data": [{"index": 0, "embedding": [0.1, ...]}, ...]}
//! ```
//!
//! An auth token is read from the `REWARDLAB_EMBED_TOKEN` environment
//! variable and sent as `Authorization: Bearer <token>` when present.
//! Requests are retried up to 3 times with exponential backoff on network
//! failures, 429, and 5xx responses; other client errors fail fast.

use super::{EmbedError, EmbeddingProvider, EmbeddingVector};
use serde::Deserialize;
use std::sync::{Condvar, Mutex, OnceLock};
use std::time::Duration;

/// Environment variable holding the bearer token for the endpoint.
pub const AUTH_TOKEN_ENV: &str = "REWARDLAB_EMBED_TOKEN";

const MAX_RETRIES: u32 = 3;
const BASE_BACKOFF: Duration = Duration::from_millis(100);
const DEFAULT_TIMEOUT_SECS: u64 = 30;
const DEFAULT_BATCH_LIMIT: usize = 256;
const MAX_IN_FLIGHT: usize = 8;

/// Counting semaphore bounding concurrent requests across worker threads.
struct InFlightLimit {
    available: Mutex<usize>,
    signal: Condvar,
}

impl InFlightLimit {
    fn new(permits: usize) -> Self {
        Self {
            available: Mutex::new(permits),
            signal: Condvar::new(),
        }
    }

    fn acquire(&self) -> InFlightGuard<'_> {
        let mut available = self.available.lock().unwrap();
        while *available == 0 {
            available = self.signal.wait(available).unwrap();
        }
        *available -= 1;
        InFlightGuard { limit: self }
    }
}

struct InFlightGuard<'a> {
    limit: &'a InFlightLimit,
}

impl Drop for InFlightGuard<'_> {
    fn drop(&mut self) {
        *self.limit.available.lock().unwrap() += 1;
        self.limit.signal.notify_one();
    }
}

pub struct HttpProvider {
    url: String,
    model: String,
    client: reqwest::blocking::Client,
    token: Option<String>,
    batch_limit: usize,
    in_flight: InFlightLimit,
    // Learned from the first successful response; all later batches must agree.
    dimension: OnceLock<usize>,
}

#[derive(Deserialize)]
struct EmbeddingsResponse {
    data: Vec<EmbeddingRow>,
}

#[derive(Deserialize)]
struct EmbeddingRow {
    index: usize,
    embedding: Vec<f32>,
}

impl HttpProvider {
    pub fn new(url: String, model: String, timeout_secs: Option<u64>) -> Result<Self, EmbedError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(timeout_secs.unwrap_or(DEFAULT_TIMEOUT_SECS)))
            .build()
            .map_err(|e| EmbedError::Contract(format!("cannot build http client: {e}")))?;
        Ok(Self {
            url,
            model,
            client,
            token: std::env::var(AUTH_TOKEN_ENV).ok(),
            batch_limit: DEFAULT_BATCH_LIMIT,
            in_flight: InFlightLimit::new(MAX_IN_FLIGHT),
            dimension: OnceLock::new(),
        })
    }

    fn post_with_retries(&self, texts: &[&str]) -> Result<EmbeddingsResponse, EmbedError> {
        let _permit = self.in_flight.acquire();
        let body = serde_json::json!({ "model": self.model, "input": texts });
        let mut last_error = String::new();
        for attempt in 0..=MAX_RETRIES {
            if attempt > 0 {
                std::thread::sleep(BASE_BACKOFF * 2u32.pow(attempt - 1));
            }
            let mut req = self.client.post(&self.url).json(&body);
            if let Some(token) = &self.token {
                req = req.bearer_auth(token);
            }
            match req.send() {
                Ok(resp) => {
                    let status = resp.status();
                    if status.is_success() {
                        return resp.json::<EmbeddingsResponse>().map_err(|e| {
                            EmbedError::Contract(format!("unparseable response body: {e}"))
                        });
                    }
                    let retryable = status.as_u16() == 429 || status.is_server_error();
                    let text = resp.text().unwrap_or_default();
                    if !retryable {
                        return Err(EmbedError::Contract(format!(
                            "endpoint returned {status}: {text}"
                        )));
                    }
                    last_error = format!("{status}: {text}");
                }
                Err(e) => last_error = e.to_string(),
            }
        }
        Err(EmbedError::Transport {
            retries: MAX_RETRIES,
            message: last_error,
        })
    }

    fn embed_chunk(&self, texts: &[&str]) -> Result<Vec<EmbeddingVector>, EmbedError> {
        let resp = self.post_with_retries(texts)?;
        if resp.data.len() != texts.len() {
            return Err(EmbedError::Contract(format!(
                "asked for {} embeddings, got {}",
                texts.len(),
                resp.data.len()
            )));
        }
        let mut rows: Vec<EmbeddingRow> = resp.data;
        rows.sort_by_key(|r| r.index);
        let dim = rows[0].embedding.len();
        if dim == 0 {
            return Err(EmbedError::Contract("endpoint returned empty vectors".into()));
        }
        if rows.iter().any(|r| r.embedding.len() != dim) {
            return Err(EmbedError::Contract(
                "inconsistent embedding dimensions within one batch".into(),
            ));
        }
        let expected = *self.dimension.get_or_init(|| dim);
        if dim != expected {
            return Err(EmbedError::Contract(format!(
                "embedding dimension changed from {expected} to {dim}"
            )));
        }
        Ok(rows
            .into_iter()
            .map(|r| EmbeddingVector::normalized(r.embedding))
            .collect())
    }
}

impl EmbeddingProvider for HttpProvider {
    fn name(&self) -> &str {
        "http"
    }

    fn dimension(&self) -> usize {
        self.dimension.get().copied().unwrap_or(0)
    }

    fn batch_limit(&self) -> usize {
        self.batch_limit
    }

    fn embed_batch(&self, texts: &[&str]) -> Result<Vec<EmbeddingVector>, EmbedError> {
        if texts.is_empty() {
            return Err(EmbedError::Contract("embed_batch called with no texts".into()));
        }
        // Empty texts never hit the endpoint; they become zero vectors of
        // the learned dimension.
        let nonempty: Vec<&str> = texts.iter().copied().filter(|t| !t.is_empty()).collect();
        let mut fetched = Vec::with_capacity(nonempty.len());
        for chunk in nonempty.chunks(self.batch_limit) {
            fetched.extend(self.embed_chunk(chunk)?);
        }
        let dim = match self.dimension.get() {
            Some(d) => *d,
            None => {
                return Err(EmbedError::Contract(
                    "cannot size zero vectors: no non-empty text embedded yet".into(),
                ))
            }
        };
        let mut fetched = fetched.into_iter();
        Ok(texts
            .iter()
            .map(|t| {
                if t.is_empty() {
                    EmbeddingVector::zeros(dim)
                } else {
                    fetched.next().expect("one vector per non-empty text")
                }
            })
            .collect())
    }
}
