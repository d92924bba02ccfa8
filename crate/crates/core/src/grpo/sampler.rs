//! Categorical sampling over the toy policy with the standard inference
//! transformations, applied in order: repetition penalty on already-emitted
//! symbols, temperature scaling, top-k truncation, top-p truncation,
//! renormalization, categorical draw. Fully reproducible from the RNG.

use super::policy::{softmax, ToyPolicy};
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplingParams {
    pub temperature: f64,
    pub top_p: f64,
    pub top_k: usize,
    pub repetition_penalty: f64,
}

impl Default for SamplingParams {
    fn default() -> Self {
        Self {
            temperature: 0.6,
            top_p: 0.8,
            top_k: 4,
            repetition_penalty: 1.2,
        }
    }
}

/// A sampled token sequence with per-token log-probabilities.
///
/// The recorded log-probabilities are under the raw policy softmax (the
/// quantity the policy gradient and the KL estimator need), not under the
/// warped sampling distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledCompletion {
    pub tokens: Vec<usize>,
    pub logprobs: Vec<f64>,
}

/// Sample one sequence of at most `max_len` tokens, stopping after the EOS
/// symbol when the vocabulary defines one.
pub fn sample_completion(
    policy: &ToyPolicy,
    params: &SamplingParams,
    max_len: usize,
    rng: &mut impl Rng,
) -> SampledCompletion {
    let len = max_len.min(policy.max_len());
    let vocab_size = policy.vocab().len();
    let mut emitted = vec![false; vocab_size];
    let mut tokens = Vec::new();
    let mut logprobs = Vec::new();

    for position in 0..len {
        let mut scores = policy.logits_at(position).to_vec();

        for (token, seen) in emitted.iter().enumerate() {
            if *seen {
                if scores[token] > 0.0 {
                    scores[token] /= params.repetition_penalty;
                } else {
                    scores[token] *= params.repetition_penalty;
                }
            }
        }

        for s in &mut scores {
            *s /= params.temperature;
        }

        let probs = truncated_distribution(&scores, params.top_k, params.top_p);
        let token = draw(&probs, rng);

        tokens.push(token);
        logprobs.push(policy.logprob(position, token));
        emitted[token] = true;

        if Some(token) == policy.vocab().eos() {
            break;
        }
    }

    SampledCompletion { tokens, logprobs }
}

/// Apply top-k then top-p to the scaled scores, returning a renormalized
/// probability vector over the full vocabulary (suppressed entries are 0).
fn truncated_distribution(scores: &[f64], top_k: usize, top_p: f64) -> Vec<f64> {
    // Order by score descending; ties broken by index for determinism.
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap().then(a.cmp(&b)));

    let k = top_k.clamp(1, scores.len());
    let kept = &order[..k];

    let kept_scores: Vec<f64> = kept.iter().map(|&i| scores[i]).collect();
    let kept_probs = softmax(&kept_scores);

    // Nucleus: walk the sorted candidates, keep until the cumulative mass
    // reaches top_p (the crossing token is included).
    let mut nucleus = kept.len();
    let mut cumulative = 0.0;
    for (rank, p) in kept_probs.iter().enumerate() {
        cumulative += p;
        if cumulative >= top_p {
            nucleus = rank + 1;
            break;
        }
    }

    let mass: f64 = kept_probs[..nucleus].iter().sum();
    let mut probs = vec![0.0; scores.len()];
    for (rank, &token) in kept[..nucleus].iter().enumerate() {
        probs[token] = kept_probs[rank] / mass;
    }
    probs
}

/// Inverse-CDF categorical draw from a normalized probability vector.
fn draw(probs: &[f64], rng: &mut impl Rng) -> usize {
    let u: f64 = rng.random();
    let mut cumulative = 0.0;
    let mut last_nonzero = 0;
    for (token, p) in probs.iter().enumerate() {
        if *p > 0.0 {
            last_nonzero = token;
            cumulative += p;
            if u < cumulative {
                return token;
            }
        }
    }
    // Rounding can leave the total a hair under 1.
    last_nonzero
}
