//! Group-relative machinery: reward aggregation, group-normalized
//! advantages, the per-token KL estimator, and a desk-scale policy-gradient
//! loop over a categorical toy policy.

mod policy;
mod sampler;
mod train;

pub use policy::{ToyPolicy, Vocabulary};
pub use sampler::{sample_completion, SampledCompletion, SamplingParams};
pub use train::{
    grpo_step, run_simulation, toy_prompts, toy_vocabulary, FinalSample, StepMetrics, StepUpdate,
    TrainConfig, TrainGroup, TrainMember, TrainingTrace, ToyPrompt,
};

use crate::config::{RewardKind, RewardWeights};
use crate::scorer::RewardBreakdown;
use crate::{Error, Result};
use std::sync::atomic::{AtomicU64, Ordering};

/// Group advantages: one entry per member, mean 0, unit population
/// variance for non-degenerate groups.
pub type AdvantageVector = Vec<f64>;

/// Degenerate-group floor: a group whose reward standard deviation sits
/// below this gets all-zero advantages instead of a division blow-up.
pub const STD_FLOOR: f64 = 1e-8;

/// Saturation cap for the KL estimator when `exp` overflows.
pub const KL_CAP: f64 = 1e6;

static KL_SATURATIONS: AtomicU64 = AtomicU64::new(0);

/// How many times [`kl_divergence_term`] has saturated at [`KL_CAP`] since
/// process start.
pub fn kl_saturation_count() -> u64 {
    KL_SATURATIONS.load(Ordering::Relaxed)
}

/// One weighted addend of the scalar reward, kept for audit.
#[derive(Debug, Clone, PartialEq)]
pub struct RewardAddend {
    pub kind: RewardKind,
    pub score: f64,
    pub weight: f64,
    pub weighted: f64,
}

/// Weighted sum of the present reward components, with the addend vector.
/// Absent components contribute 0.
pub fn total_reward(b: &RewardBreakdown, weights: &RewardWeights) -> (f64, Vec<RewardAddend>) {
    let components = [
        (RewardKind::Format, Some(b.format)),
        (RewardKind::Accuracy, b.accuracy),
        (RewardKind::Language, Some(b.language)),
        (RewardKind::Semantic, b.semantic),
    ];
    let mut addends = Vec::with_capacity(4);
    let mut total = 0.0;
    for (kind, score) in components {
        if let Some(score) = score {
            let weight = weights.get(kind);
            let weighted = weight * score;
            total += weighted;
            addends.push(RewardAddend {
                kind,
                score,
                weight,
                weighted,
            });
        }
    }
    (total, addends)
}

/// Group-relative advantages: `(r_i - mean) / std` with the population
/// standard deviation. A zero-variance group yields all-zero advantages
/// rather than being dropped, preserving group alignment.
pub fn group_advantages(rewards: &[f64]) -> AdvantageVector {
    let n = rewards.len();
    if n == 0 {
        return Vec::new();
    }
    let mean = rewards.iter().sum::<f64>() / n as f64;
    let variance = rewards.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / n as f64;
    let std = variance.sqrt();
    if std < STD_FLOOR {
        return vec![0.0; n];
    }
    rewards.iter().map(|r| (r - mean) / std).collect()
}

/// Per-token KL estimate `exp(ref - cur) - (ref - cur) - 1`.
///
/// Non-negative, zero exactly at equality. Overflow saturates at
/// [`KL_CAP`] and bumps the diagnostic counter.
pub fn kl_divergence_term(logp: f64, ref_logp: f64) -> f64 {
    let delta = ref_logp - logp;
    let value = delta.exp() - delta - 1.0;
    if value > KL_CAP || !value.is_finite() {
        KL_SATURATIONS.fetch_add(1, Ordering::Relaxed);
        return KL_CAP;
    }
    // exp(x) - x - 1 >= 0 analytically; guard the tiny negative rounding
    // residue near x = 0.
    value.max(0.0)
}

/// A GRPO group: exactly G scored completions for one prompt.
#[derive(Debug, Clone)]
pub struct CompletionGroup {
    prompt_id: String,
    members: Vec<RewardBreakdown>,
}

impl CompletionGroup {
    pub fn new(prompt_id: impl Into<String>, members: Vec<RewardBreakdown>, g: usize) -> Result<Self> {
        if members.len() != g {
            return Err(Error::Schema(format!(
                "group needs exactly {g} members, got {}",
                members.len()
            )));
        }
        Ok(Self {
            prompt_id: prompt_id.into(),
            members,
        })
    }

    pub fn prompt_id(&self) -> &str {
        &self.prompt_id
    }

    pub fn members(&self) -> &[RewardBreakdown] {
        &self.members
    }

    pub fn totals(&self) -> Vec<f64> {
        self.members.iter().map(|m| m.total).collect()
    }

    pub fn advantages(&self) -> AdvantageVector {
        group_advantages(&self.totals())
    }
}
