//! Deterministic offline embeddings: hashed bag of character n-grams
//! (n = 2, 3) with signed hashing into a fixed number of buckets,
//! L2-normalized. Equal text always yields the same vector, on every
//! platform, which makes this provider usable as a test oracle. It makes
//! no quality claims relative to neural sentence embeddings.

use super::{EmbedError, EmbeddingProvider, EmbeddingVector};

pub const DEFAULT_DIMENSION: usize = 256;

#[derive(Debug, Clone)]
pub struct OfflineProvider {
    dimension: usize,
}

impl Default for OfflineProvider {
    fn default() -> Self {
        Self {
            dimension: DEFAULT_DIMENSION,
        }
    }
}

impl OfflineProvider {
    pub fn new(dimension: usize) -> Self {
        assert!(dimension >= 1, "embedding dimension must be at least 1");
        Self { dimension }
    }

    fn embed_one(&self, text: &str) -> EmbeddingVector {
        if text.is_empty() {
            return EmbeddingVector::zeros(self.dimension);
        }
        let chars: Vec<char> = text.chars().collect();
        let mut buckets = vec![0.0f32; self.dimension];
        let mut gram = String::new();
        let mut count = 0usize;
        for n in [2usize, 3] {
            if chars.len() < n {
                continue;
            }
            for window in chars.windows(n) {
                gram.clear();
                gram.extend(window.iter());
                self.add_gram(&mut buckets, &gram);
                count += 1;
            }
        }
        // Too short for any n-gram: hash the whole text so the zero vector
        // stays reserved for empty input.
        if count == 0 {
            self.add_gram(&mut buckets, text);
        }
        EmbeddingVector::normalized(buckets)
    }

    fn add_gram(&self, buckets: &mut [f32], gram: &str) {
        let h = fnv1a64(gram.as_bytes());
        let idx = (h % self.dimension as u64) as usize;
        // Take the sign from high bits so it is independent of the bucket.
        let sign = if (h >> 32) & 1 == 0 { 1.0 } else { -1.0 };
        buckets[idx] += sign;
    }
}

impl EmbeddingProvider for OfflineProvider {
    fn name(&self) -> &str {
        "offline-ngram"
    }

    fn dimension(&self) -> usize {
        self.dimension
    }

    fn batch_limit(&self) -> usize {
        usize::MAX
    }

    fn embed_batch(&self, texts: &[&str]) -> Result<Vec<EmbeddingVector>, EmbedError> {
        if texts.is_empty() {
            return Err(EmbedError::Contract("embed_batch called with no texts".into()));
        }
        Ok(texts.iter().map(|t| self.embed_one(t)).collect())
    }
}

/// FNV-1a, fixed here rather than taken from the standard library so the
/// hash (and therefore every embedding) is identical across runs and
/// toolchain versions.
fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}
