//! Bounded embedding cache.
//!
//! Keyed by the SHA-256 of the text (the provider name is fixed per cache
//! instance). The main win is re-use of the reference chain embedding
//! across the G completions of a group. Capacity is bounded so a long
//! scoring stream cannot grow memory without limit; when full, the cache
//! is cleared wholesale and refills.

use super::{EmbedError, EmbeddingProvider, EmbeddingVector};
use sha2::{Digest, Sha256};
use std::collections::HashMap;
use std::sync::RwLock;

pub const DEFAULT_CAPACITY: usize = 4096;

type Key = [u8; 32];

pub struct CachedProvider {
    inner: Box<dyn EmbeddingProvider>,
    entries: RwLock<HashMap<Key, EmbeddingVector>>,
    capacity: usize,
}

impl CachedProvider {
    pub fn new(inner: Box<dyn EmbeddingProvider>) -> Self {
        Self::with_capacity(inner, DEFAULT_CAPACITY)
    }

    pub fn with_capacity(inner: Box<dyn EmbeddingProvider>, capacity: usize) -> Self {
        Self {
            inner,
            entries: RwLock::new(HashMap::new()),
            capacity: capacity.max(1),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn key(text: &str) -> Key {
        Sha256::digest(text.as_bytes()).into()
    }
}

impl EmbeddingProvider for CachedProvider {
    fn name(&self) -> &str {
        self.inner.name()
    }

    fn dimension(&self) -> usize {
        self.inner.dimension()
    }

    fn batch_limit(&self) -> usize {
        self.inner.batch_limit()
    }

    fn embed_batch(&self, texts: &[&str]) -> Result<Vec<EmbeddingVector>, EmbedError> {
        if texts.is_empty() {
            return Err(EmbedError::Contract("embed_batch called with no texts".into()));
        }
        let keys: Vec<Key> = texts.iter().map(|t| Self::key(t)).collect();

        let mut out: Vec<Option<EmbeddingVector>> = vec![None; texts.len()];
        {
            let cache = self.entries.read().unwrap();
            for (i, key) in keys.iter().enumerate() {
                out[i] = cache.get(key).cloned();
            }
        }

        let miss_indices: Vec<usize> = (0..texts.len()).filter(|i| out[*i].is_none()).collect();
        if !miss_indices.is_empty() {
            let miss_texts: Vec<&str> = miss_indices.iter().map(|&i| texts[i]).collect();
            let fetched = self.inner.embed_batch(&miss_texts)?;
            let mut cache = self.entries.write().unwrap();
            for (&i, vector) in miss_indices.iter().zip(fetched) {
                if cache.len() >= self.capacity && !cache.contains_key(&keys[i]) {
                    cache.clear();
                }
                cache.insert(keys[i], vector.clone());
                out[i] = Some(vector);
            }
        }

        Ok(out.into_iter().map(|v| v.expect("filled above")).collect())
    }
}
