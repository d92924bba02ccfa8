//! Tabular toy policy: independent categorical distributions per position
//! over a small symbol vocabulary. Small enough that reward landscapes are
//! brute-force auditable, yet it exercises the full reward path end to end.

use rand::Rng;

/// Ordered symbol table. A symbol renders as its text; the designated EOS
/// symbol renders as nothing and terminates sampling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    symbols: Vec<String>,
    eos: Option<usize>,
}

impl Vocabulary {
    pub fn new(symbols: Vec<String>, eos: Option<usize>) -> Self {
        assert!(!symbols.is_empty(), "vocabulary must not be empty");
        if let Some(eos) = eos {
            assert!(eos < symbols.len(), "eos index out of range");
        }
        Self { symbols, eos }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbol(&self, id: usize) -> &str {
        &self.symbols[id]
    }

    pub fn eos(&self) -> Option<usize> {
        self.eos
    }

    pub fn id_of(&self, symbol: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s == symbol)
    }

    /// Concatenate the symbol texts, skipping EOS.
    pub fn render(&self, tokens: &[usize]) -> String {
        let mut out = String::new();
        for &t in tokens {
            if Some(t) == self.eos {
                continue;
            }
            out.push_str(&self.symbols[t]);
        }
        out
    }
}

/// Trainable policy π_θ plus its frozen reference snapshot π_ref.
///
/// `logits[t][v]` is the unnormalized score of symbol `v` at position `t`.
/// The reference snapshot is taken at construction and never mutated.
#[derive(Debug, Clone)]
pub struct ToyPolicy {
    vocab: Vocabulary,
    logits: Vec<Vec<f64>>,
    reference: Vec<Vec<f64>>,
    steps_taken: usize,
}

impl ToyPolicy {
    /// Initialize with small uniform noise in `[-init_scale, init_scale]`
    /// so top-k truncation has no exact ties to break.
    pub fn new(vocab: Vocabulary, max_len: usize, init_scale: f64, rng: &mut impl Rng) -> Self {
        let logits: Vec<Vec<f64>> = (0..max_len)
            .map(|_| {
                (0..vocab.len())
                    .map(|_| (rng.random::<f64>() * 2.0 - 1.0) * init_scale)
                    .collect()
            })
            .collect();
        let reference = logits.clone();
        Self {
            vocab,
            logits,
            reference,
            steps_taken: 0,
        }
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn max_len(&self) -> usize {
        self.logits.len()
    }

    pub fn steps_taken(&self) -> usize {
        self.steps_taken
    }

    pub fn logits_at(&self, position: usize) -> &[f64] {
        &self.logits[position]
    }

    /// log π_θ(token | position) under the raw softmax of the current table.
    pub fn logprob(&self, position: usize, token: usize) -> f64 {
        log_softmax_at(&self.logits[position], token)
    }

    /// log π_ref(token | position) under the frozen reference snapshot.
    pub fn ref_logprob(&self, position: usize, token: usize) -> f64 {
        log_softmax_at(&self.reference[position], token)
    }

    /// Sum of per-position log-probabilities of a sampled sequence.
    pub fn sequence_logprob(&self, tokens: &[usize]) -> f64 {
        tokens
            .iter()
            .enumerate()
            .map(|(t, &v)| self.logprob(t, v))
            .sum()
    }

    /// Ascend the given gradient table: `logits += lr * grad`.
    ///
    /// A non-finite gradient rejects the whole step and leaves the policy
    /// unchanged; returns whether the step was applied.
    pub fn apply_gradient(&mut self, grad: &[Vec<f64>], learning_rate: f64) -> bool {
        debug_assert_eq!(grad.len(), self.logits.len());
        let finite = grad
            .iter()
            .flat_map(|row| row.iter())
            .all(|g| g.is_finite())
            && learning_rate.is_finite();
        if !finite {
            return false;
        }
        for (row, grad_row) in self.logits.iter_mut().zip(grad) {
            for (z, g) in row.iter_mut().zip(grad_row) {
                *z += learning_rate * g;
            }
        }
        self.steps_taken += 1;
        true
    }
}

/// Numerically stable log softmax evaluated at one index.
pub(crate) fn log_softmax_at(logits: &[f64], index: usize) -> f64 {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let log_sum: f64 = logits.iter().map(|z| (z - max).exp()).sum::<f64>().ln() + max;
    logits[index] - log_sum
}

/// Stable softmax over a full row.
pub(crate) fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.iter().map(|e| e / sum).collect()
}
