//! Embedding providers and vector math for the semantic reward and the
//! dataset redundancy filter.
//!
//! Two providers ship: [`OfflineProvider`], a deterministic hashed
//! character n-gram embedding with no dependencies or network, and
//! [`HttpProvider`], a client for a JSON-over-HTTP embeddings endpoint.
//! Both return L2-normalized vectors and map empty text to the zero vector.

mod cache;
mod http;
mod offline;

pub use cache::CachedProvider;
pub use http::{HttpProvider, AUTH_TOKEN_ENV};
pub use offline::OfflineProvider;

use crate::config::ProviderConfig;
use serde::{Deserialize, Serialize};

/// Errors from embedding providers and vector operations.
#[derive(Debug, thiserror::Error)]
pub enum EmbedError {
    /// The remote endpoint could not be reached or kept failing.
    #[error("transport error after {retries} retries: {message}")]
    Transport { retries: u32, message: String },

    /// The provider returned something that violates its contract
    /// (wrong count, inconsistent dimensions, unparseable body).
    #[error("provider contract error: {0}")]
    Contract(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
}

/// A fixed-length embedding. Providers normalize to unit L2 norm; the zero
/// vector is reserved for empty text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingVector {
    values: Vec<f32>,
}

impl EmbeddingVector {
    /// Build a vector from raw components, scaling to unit L2 norm.
    /// An all-zero input stays the zero vector.
    pub fn normalized(mut values: Vec<f32>) -> Self {
        let norm = l2_norm(&values);
        if norm > 0.0 {
            for v in &mut values {
                *v = (*v as f64 / norm) as f32;
            }
        }
        Self { values }
    }

    pub fn zeros(dimension: usize) -> Self {
        Self {
            values: vec![0.0; dimension],
        }
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn dimension(&self) -> usize {
        self.values.len()
    }

    pub fn l2_norm(&self) -> f64 {
        l2_norm(&self.values)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == 0.0)
    }
}

fn l2_norm(values: &[f32]) -> f64 {
    values
        .iter()
        .map(|v| {
            let v = *v as f64;
            v * v
        })
        .sum::<f64>()
        .sqrt()
}

/// Cosine similarity, accumulated in f64. Returns 0.0 when either vector
/// has zero norm; the result is clamped to [-1, 1] against rounding noise.
pub fn cosine(u: &EmbeddingVector, v: &EmbeddingVector) -> Result<f64, EmbedError> {
    if u.dimension() != v.dimension() {
        return Err(EmbedError::DimensionMismatch {
            left: u.dimension(),
            right: v.dimension(),
        });
    }
    let mut dot = 0.0f64;
    for (a, b) in u.values.iter().zip(&v.values) {
        dot += *a as f64 * *b as f64;
    }
    let nu = u.l2_norm();
    let nv = v.l2_norm();
    if nu == 0.0 || nv == 0.0 {
        return Ok(0.0);
    }
    Ok((dot / (nu * nv)).clamp(-1.0, 1.0))
}

/// A source of text embeddings. Implementations must be safe to share
/// across worker threads.
pub trait EmbeddingProvider: Send + Sync {
    fn name(&self) -> &str;

    /// Vector length. For remote providers this may be 0 until the first
    /// successful call establishes it.
    fn dimension(&self) -> usize;

    /// Largest batch the provider accepts per request; larger inputs are
    /// chunked internally by `embed_batch`.
    fn batch_limit(&self) -> usize;

    /// Embed every text, order-preserving, one L2-normalized vector per
    /// input. Empty text maps to the zero vector.
    fn embed_batch(&self, texts: &[&str]) -> Result<Vec<EmbeddingVector>, EmbedError>;

    fn embed(&self, text: &str) -> Result<EmbeddingVector, EmbedError> {
        let mut out = self.embed_batch(&[text])?;
        out.pop()
            .ok_or_else(|| EmbedError::Contract("provider returned no vector".into()))
    }
}

impl<P: EmbeddingProvider + ?Sized> EmbeddingProvider for &P {
    fn name(&self) -> &str {
        (**self).name()
    }
    fn dimension(&self) -> usize {
        (**self).dimension()
    }
    fn batch_limit(&self) -> usize {
        (**self).batch_limit()
    }
    fn embed_batch(&self, texts: &[&str]) -> Result<Vec<EmbeddingVector>, EmbedError> {
        (**self).embed_batch(texts)
    }
}

/// Build the configured provider, wrapped in the shared embedding cache.
pub fn provider_from_config(cfg: &ProviderConfig) -> Result<CachedProvider, EmbedError> {
    let inner: Box<dyn EmbeddingProvider> = match cfg {
        ProviderConfig::Offline => Box::new(OfflineProvider::default()),
        ProviderConfig::Http {
            url,
            model,
            timeout_secs,
        } => Box::new(HttpProvider::new(url.clone(), model.clone(), *timeout_secs)?),
    };
    Ok(CachedProvider::new(inner))
}
