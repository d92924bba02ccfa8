//! Desk-scale GRPO loop: group-relative policy gradient with a KL penalty
//! to the frozen reference, driven end to end by the four reward functions
//! on a built-in multiple-choice toy task.

use super::policy::{softmax, ToyPolicy, Vocabulary};
use super::sampler::{sample_completion, SamplingParams};
use super::{group_advantages, kl_divergence_term};
use crate::embed::EmbeddingProvider;
use crate::record::CompletionRecord;
use crate::scorer::{RewardBreakdown, Scorer};
use crate::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::io::Write;

/// Noise scale for the initial policy logits.
const INIT_SCALE: f64 = 0.5;

/// Training-loop configuration. The default is the desk-scale toy preset;
/// [`TrainConfig::faithful`] carries the published fine-tuning values
/// (learning rate 5.0e-7, completion length 1024), which target a real
/// model and produce no visible signal on the toy policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    /// KL penalty coefficient.
    pub beta: f64,
    /// Completions per prompt per step (G).
    pub group_size: usize,
    pub max_completion_length: usize,
    pub epochs: usize,
    pub steps: usize,
    pub sampling: SamplingParams,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.05,
            beta: 0.001,
            group_size: 4,
            max_completion_length: 64,
            epochs: 4,
            steps: 200,
            sampling: SamplingParams::default(),
            seed: 9,
        }
    }
}

impl TrainConfig {
    /// The published fine-tuning hyperparameters.
    pub fn faithful() -> Self {
        Self {
            learning_rate: 5.0e-7,
            max_completion_length: 1024,
            ..Self::default()
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("invalid train config JSON: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return fail(format!("learning_rate must be positive, got {}", self.learning_rate));
        }
        if !(self.beta.is_finite() && self.beta >= 0.0) {
            return fail(format!("beta must be non-negative, got {}", self.beta));
        }
        if self.group_size < 2 {
            return fail(format!("group_size must be at least 2, got {}", self.group_size));
        }
        if self.max_completion_length == 0 {
            return fail("max_completion_length must be at least 1".into());
        }
        if self.epochs == 0 {
            return fail("epochs must be at least 1".into());
        }
        let s = &self.sampling;
        if !(s.temperature.is_finite() && s.temperature > 0.0) {
            return fail(format!("temperature must be positive, got {}", s.temperature));
        }
        if !(s.top_p > 0.0 && s.top_p <= 1.0) {
            return fail(format!("top_p must be in (0, 1], got {}", s.top_p));
        }
        if s.top_k == 0 {
            return fail("top_k must be at least 1".into());
        }
        if !(s.repetition_penalty.is_finite() && s.repetition_penalty >= 1.0) {
            return fail(format!(
                "repetition_penalty must be at least 1, got {}",
                s.repetition_penalty
            ));
        }
        Ok(())
    }
}

/// One sampled completion ready for the policy update.
#[derive(Debug, Clone)]
pub struct TrainMember {
    pub tokens: Vec<usize>,
    /// Per-token log-probabilities recorded at sampling time.
    pub logprobs: Vec<f64>,
    /// Scalar reward (weighted sum of the four components).
    pub total: f64,
}

/// The G sampled completions of one prompt for one step.
#[derive(Debug, Clone)]
pub struct TrainGroup {
    pub prompt_id: String,
    pub members: Vec<TrainMember>,
}

/// Result of one policy update.
#[derive(Debug, Clone, PartialEq)]
pub struct StepUpdate {
    pub mean_reward: f64,
    /// Mean of the per-token KL estimator over all sampled tokens.
    pub mean_kl: f64,
    /// Negated surrogate objective. At the evaluation point the importance
    /// ratio is 1 and group advantages sum to zero, so this reduces to
    /// `beta * mean_kl` and the reported curve rises as the policy drifts
    /// from the reference.
    pub loss: f64,
    /// True when a non-finite gradient rejected the update.
    pub rejected: bool,
}

/// One trace row of [`run_simulation`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepMetrics {
    pub step: usize,
    pub mean_reward: f64,
    pub mean_kl: f64,
    pub loss: f64,
    /// Fraction of this step's sampled completions containing a banned
    /// character.
    pub banned_fraction: f64,
}

/// One completion sampled from the final policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalSample {
    pub prompt_id: String,
    pub completion: String,
    pub rewards: RewardBreakdown,
}

/// Per-step metrics plus a dump of completions sampled after the last
/// update.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingTrace {
    pub steps: Vec<StepMetrics>,
    pub final_samples: Vec<FinalSample>,
    pub rejected_steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpochSummary {
    pub epoch: usize,
    pub steps: usize,
    pub mean_reward: f64,
    pub mean_kl: f64,
    pub loss: f64,
    pub banned_fraction: f64,
}

impl TrainingTrace {
    /// One JSON object per step, LF terminated.
    pub fn write_trace_jsonl(&self, mut w: impl Write) -> std::io::Result<()> {
        for row in &self.steps {
            serde_json::to_writer(&mut w, row)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    /// Steps partitioned into `epochs` contiguous runs, each averaged.
    pub fn epoch_summary(&self, epochs: usize) -> Vec<EpochSummary> {
        if self.steps.is_empty() || epochs == 0 {
            return Vec::new();
        }
        let chunk = self.steps.len().div_ceil(epochs);
        self.steps
            .chunks(chunk)
            .enumerate()
            .map(|(epoch, rows)| {
                let n = rows.len() as f64;
                EpochSummary {
                    epoch,
                    steps: rows.len(),
                    mean_reward: rows.iter().map(|r| r.mean_reward).sum::<f64>() / n,
                    mean_kl: rows.iter().map(|r| r.mean_kl).sum::<f64>() / n,
                    loss: rows.iter().map(|r| r.loss).sum::<f64>() / n,
                    banned_fraction: rows.iter().map(|r| r.banned_fraction).sum::<f64>() / n,
                }
            })
            .collect()
    }

    /// CSV summary, one row per epoch.
    pub fn write_summary_csv(&self, mut w: impl Write, epochs: usize) -> std::io::Result<()> {
        writeln!(w, "epoch,steps,mean_reward,mean_kl,loss,banned_fraction")?;
        for row in self.epoch_summary(epochs) {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                row.epoch, row.steps, row.mean_reward, row.mean_kl, row.loss, row.banned_fraction
            )?;
        }
        Ok(())
    }
}

/// One gradient-ascent update on `Σ A_i · log π_θ(c_i) − beta · KL` over
/// the given groups. Advantages are group-normalized totals; the KL term
/// is the per-token estimator against the frozen reference. A non-finite
/// gradient rejects the step and leaves the policy unchanged.
pub fn grpo_step(policy: &mut ToyPolicy, groups: &[TrainGroup], cfg: &TrainConfig) -> StepUpdate {
    let vocab_size = policy.vocab().len();
    let max_len = policy.max_len();

    let probs: Vec<Vec<f64>> = (0..max_len)
        .map(|t| softmax(policy.logits_at(t)))
        .collect();

    let mut grad = vec![vec![0.0f64; vocab_size]; max_len];
    let mut kl_sum = 0.0;
    let mut token_count = 0usize;
    let mut reward_sum = 0.0;
    let mut advantage_sum = 0.0;
    let mut member_count = 0usize;

    for group in groups {
        let totals: Vec<f64> = group.members.iter().map(|m| m.total).collect();
        let advantages = group_advantages(&totals);
        for (member, advantage) in group.members.iter().zip(&advantages) {
            reward_sum += member.total;
            advantage_sum += advantage;
            member_count += 1;
            for (t, &token) in member.tokens.iter().enumerate() {
                let cur_lp = policy.logprob(t, token);
                let ref_lp = policy.ref_logprob(t, token);
                let delta = ref_lp - cur_lp;
                kl_sum += kl_divergence_term(cur_lp, ref_lp);
                token_count += 1;
                // d/d logp of the k3 estimator is 1 - exp(delta).
                let coefficient = advantage - cfg.beta * (1.0 - delta.exp());
                let row = &mut grad[t];
                for (u, g) in row.iter_mut().enumerate() {
                    let indicator = if u == token { 1.0 } else { 0.0 };
                    *g += coefficient * (indicator - probs[t][u]);
                }
            }
        }
    }

    if member_count > 0 {
        let scale = 1.0 / member_count as f64;
        for row in &mut grad {
            for g in row.iter_mut() {
                *g *= scale;
            }
        }
    }

    let mean_kl = if token_count > 0 {
        kl_sum / token_count as f64
    } else {
        0.0
    };
    let (mean_reward, mean_advantage) = if member_count > 0 {
        (
            reward_sum / member_count as f64,
            advantage_sum / member_count as f64,
        )
    } else {
        (0.0, 0.0)
    };
    let loss = cfg.beta * mean_kl - mean_advantage;

    let applied = policy.apply_gradient(&grad, cfg.learning_rate);

    StepUpdate {
        mean_reward,
        mean_kl,
        loss,
        rejected: !applied,
    }
}

/// A built-in multiple-choice stub with a known answer and a curated
/// reference chain (the rendering of its ideal token sequence).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToyPrompt {
    pub id: String,
    pub prompt: String,
    pub ground_truth: String,
    pub candidates: Vec<String>,
    pub reference: String,
}

/// Symbols of the toy task: tag tokens, candidate letters, Vietnamese
/// filler words, two banned CJK characters, and EOS.
pub fn toy_vocabulary() -> Vocabulary {
    let symbols: Vec<String> = [
        "<think>", "</think>", "<answer>", "</answer>", "A", "B", "C", "D", " vì ", " nên ",
        " đúng ", " kết quả ", " là ", "答", "案", "<eos>",
    ]
    .map(String::from)
    .to_vec();
    let eos = symbols.len() - 1;
    Vocabulary::new(symbols, Some(eos))
}

/// Three prompts with distinct answers and distinct reference chains.
pub fn toy_prompts() -> Vec<ToyPrompt> {
    let vocab = toy_vocabulary();
    let candidates: Vec<String> = ["A", "B", "C", "D"].map(String::from).to_vec();
    let ideal = |think_fillers: &[&str], answer: &str| -> String {
        let mut tokens = vec![vocab.id_of("<think>").unwrap()];
        tokens.extend(think_fillers.iter().map(|s| vocab.id_of(s).unwrap()));
        tokens.push(vocab.id_of("</think>").unwrap());
        tokens.push(vocab.id_of("<answer>").unwrap());
        tokens.push(vocab.id_of(answer).unwrap());
        tokens.push(vocab.id_of("</answer>").unwrap());
        vocab.render(&tokens)
    };
    vec![
        ToyPrompt {
            id: "toy-1".into(),
            prompt: "Chọn đáp án đúng (1)".into(),
            ground_truth: "A".into(),
            candidates: candidates.clone(),
            reference: ideal(&[" vì ", " đúng "], "A"),
        },
        ToyPrompt {
            id: "toy-2".into(),
            prompt: "Chọn đáp án đúng (2)".into(),
            ground_truth: "C".into(),
            candidates: candidates.clone(),
            reference: ideal(&[" kết quả ", " là ", " đúng "], "C"),
        },
        ToyPrompt {
            id: "toy-3".into(),
            prompt: "Chọn đáp án đúng (3)".into(),
            ground_truth: "D".into(),
            candidates,
            reference: ideal(&[" vì ", " nên ", " kết quả "], "D"),
        },
    ]
}

/// Run the toy GRPO loop: per prompt, sample a group, score it with all
/// four rewards, and take one policy-gradient step. Deterministic given
/// the seed. Each prompt trains its own positional table; the tables share
/// the vocabulary.
pub fn run_simulation(
    cfg: &TrainConfig,
    scorer: &Scorer,
    provider: &dyn EmbeddingProvider,
) -> Result<TrainingTrace> {
    cfg.validate()?;
    let vocab = toy_vocabulary();
    let prompts = toy_prompts();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut policies: Vec<ToyPolicy> = prompts
        .iter()
        .map(|_| ToyPolicy::new(vocab.clone(), cfg.max_completion_length, INIT_SCALE, &mut rng))
        .collect();

    let mut steps = Vec::with_capacity(cfg.steps);
    let mut rejected_steps = 0usize;

    for step in 0..cfg.steps {
        let mut totals = Vec::new();
        let mut kls = Vec::new();
        let mut losses = Vec::new();
        let mut banned = 0usize;
        let mut sampled = 0usize;

        for (prompt, policy) in prompts.iter().zip(policies.iter_mut()) {
            let mut members = Vec::with_capacity(cfg.group_size);
            for g in 0..cfg.group_size {
                let sample =
                    sample_completion(policy, &cfg.sampling, cfg.max_completion_length, &mut rng);
                let completion = vocab.render(&sample.tokens);
                let record = CompletionRecord {
                    id: format!("{}-s{step}-g{g}", prompt.id),
                    prompt: prompt.prompt.clone(),
                    completion: completion.clone(),
                    ground_truth: Some(prompt.ground_truth.clone()),
                    candidates: Some(prompt.candidates.clone()),
                    reasoning_reference: Some(prompt.reference.clone()),
                };
                let breakdown = scorer
                    .score(&record, provider, false)
                    .map_err(|e| e.at_step(step))?;
                if scorer.completion_contains_banned(&completion) {
                    banned += 1;
                }
                sampled += 1;
                totals.push(breakdown.total);
                members.push(TrainMember {
                    tokens: sample.tokens,
                    logprobs: sample.logprobs,
                    total: breakdown.total,
                });
            }
            let group = TrainGroup {
                prompt_id: prompt.id.clone(),
                members,
            };
            let update = grpo_step(policy, std::slice::from_ref(&group), cfg);
            if update.rejected {
                rejected_steps += 1;
            }
            kls.push(update.mean_kl);
            losses.push(update.loss);
        }

        let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
        steps.push(StepMetrics {
            step,
            mean_reward: mean(&totals),
            mean_kl: mean(&kls),
            loss: mean(&losses),
            banned_fraction: banned as f64 / sampled as f64,
        });
    }

    let mut final_samples = Vec::new();
    for (prompt, policy) in prompts.iter().zip(&policies) {
        for g in 0..cfg.group_size {
            let sample =
                sample_completion(policy, &cfg.sampling, cfg.max_completion_length, &mut rng);
            let completion = vocab.render(&sample.tokens);
            let record = CompletionRecord {
                id: format!("{}-final-g{g}", prompt.id),
                prompt: prompt.prompt.clone(),
                completion: completion.clone(),
                ground_truth: Some(prompt.ground_truth.clone()),
                candidates: Some(prompt.candidates.clone()),
                reasoning_reference: Some(prompt.reference.clone()),
            };
            let rewards = scorer
                .score(&record, provider, false)
                .map_err(|e| e.at_step(cfg.steps))?;
            final_samples.push(FinalSample {
                prompt_id: prompt.id.clone(),
                completion,
                rewards,
            });
        }
    }

    Ok(TrainingTrace {
        steps,
        final_samples,
        rejected_steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RewardConfig;
    use crate::embed::OfflineProvider;

    fn toy_policy(seed: u64) -> ToyPolicy {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ToyPolicy::new(toy_vocabulary(), 16, INIT_SCALE, &mut rng)
    }

    fn member(policy: &ToyPolicy, tokens: Vec<usize>, total: f64) -> TrainMember {
        let logprobs = tokens
            .iter()
            .enumerate()
            .map(|(t, &v)| policy.logprob(t, v))
            .collect();
        TrainMember {
            tokens,
            logprobs,
            total,
        }
    }

    #[test]
    fn zero_advantages_and_zero_beta_leave_policy_unchanged() {
        let mut policy = toy_policy(1);
        let before: Vec<Vec<f64>> = (0..policy.max_len())
            .map(|t| policy.logits_at(t).to_vec())
            .collect();
        let cfg = TrainConfig {
            beta: 0.0,
            ..TrainConfig::default()
        };
        let group = TrainGroup {
            prompt_id: "p".into(),
            members: vec![
                member(&policy, vec![0, 1], 1.0),
                member(&policy, vec![2, 3], 1.0),
                member(&policy, vec![4, 5], 1.0),
                member(&policy, vec![6, 7], 1.0),
            ],
        };
        let update = grpo_step(&mut policy, &[group], &cfg);
        assert!(!update.rejected);
        for t in 0..policy.max_len() {
            assert_eq!(policy.logits_at(t), &before[t][..]);
        }
    }

    #[test]
    fn kl_is_zero_before_any_update() {
        let mut policy = toy_policy(2);
        let cfg = TrainConfig::default();
        let group = TrainGroup {
            prompt_id: "p".into(),
            members: vec![
                member(&policy, vec![0, 4, 15], 0.0),
                member(&policy, vec![1, 5, 15], 1.0),
                member(&policy, vec![2, 6, 15], 2.0),
                member(&policy, vec![3, 7, 15], 3.0),
            ],
        };
        let update = grpo_step(&mut policy, &[group], &cfg);
        assert_eq!(update.mean_kl, 0.0);
        assert!((update.loss - 0.0).abs() < 1e-12);
    }

    #[test]
    fn kl_becomes_positive_after_a_nonzero_update() {
        // Small 3-symbol policy, one update with uneven rewards, then a
        // second step must see positive KL against the frozen reference.
        let vocab = Vocabulary::new(vec!["a".into(), "b".into(), "c".into()], None);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut policy = ToyPolicy::new(vocab, 2, 0.3, &mut rng);
        let cfg = TrainConfig {
            learning_rate: 0.5,
            ..TrainConfig::default()
        };
        let group = TrainGroup {
            prompt_id: "p".into(),
            members: vec![
                member(&policy, vec![0, 0], 2.0),
                member(&policy, vec![1, 1], 0.0),
            ],
        };
        let first = grpo_step(&mut policy, &[group], &cfg);
        assert_eq!(first.mean_kl, 0.0);
        assert!(!first.rejected);

        let group = TrainGroup {
            prompt_id: "p".into(),
            members: vec![
                member(&policy, vec![0, 1], 1.0),
                member(&policy, vec![2, 2], 0.5),
            ],
        };
        let second = grpo_step(&mut policy, &[group], &cfg);
        assert!(second.mean_kl > 0.0, "mean_kl = {}", second.mean_kl);
    }

    #[test]
    fn gradient_pushes_toward_high_advantage_member() {
        let mut policy = toy_policy(4);
        let cfg = TrainConfig {
            beta: 0.0,
            learning_rate: 0.5,
            ..TrainConfig::default()
        };
        let good = vec![0usize, 10, 1];
        let bad = vec![13usize, 13, 13];
        let p_good_before: f64 = good.iter().enumerate().map(|(t, &v)| policy.logprob(t, v)).sum();
        let group = TrainGroup {
            prompt_id: "p".into(),
            members: vec![
                member(&policy, good.clone(), 3.0),
                member(&policy, bad, 0.0),
            ],
        };
        grpo_step(&mut policy, &[group], &cfg);
        let p_good_after: f64 = good.iter().enumerate().map(|(t, &v)| policy.logprob(t, v)).sum();
        assert!(p_good_after > p_good_before);
    }

    #[test]
    fn zero_steps_gives_empty_trace() {
        let scorer = Scorer::new(RewardConfig::default()).unwrap();
        let provider = OfflineProvider::default();
        let cfg = TrainConfig {
            steps: 0,
            ..TrainConfig::default()
        };
        let trace = run_simulation(&cfg, &scorer, &provider).unwrap();
        assert!(trace.steps.is_empty());
        assert_eq!(trace.rejected_steps, 0);
    }

    #[test]
    fn fixed_seed_reproduces_trace_bit_for_bit() {
        let scorer = Scorer::new(RewardConfig::default()).unwrap();
        let provider = OfflineProvider::default();
        let cfg = TrainConfig {
            steps: 5,
            ..TrainConfig::default()
        };
        let a = run_simulation(&cfg, &scorer, &provider).unwrap();
        let b = run_simulation(&cfg, &scorer, &provider).unwrap();
        let mut ja = Vec::new();
        let mut jb = Vec::new();
        a.write_trace_jsonl(&mut ja).unwrap();
        b.write_trace_jsonl(&mut jb).unwrap();
        assert_eq!(ja, jb);
        assert_eq!(a.final_samples, b.final_samples);
    }

    #[test]
    fn trace_rows_expose_the_declared_schema() {
        let scorer = Scorer::new(RewardConfig::default()).unwrap();
        let provider = OfflineProvider::default();
        let cfg = TrainConfig {
            steps: 1,
            ..TrainConfig::default()
        };
        let trace = run_simulation(&cfg, &scorer, &provider).unwrap();
        let mut buf = Vec::new();
        trace.write_trace_jsonl(&mut buf).unwrap();
        let row: serde_json::Value = serde_json::from_slice(buf.trim_ascii_end()).unwrap();
        for key in ["step", "mean_reward", "mean_kl", "loss", "banned_fraction"] {
            assert!(row.get(key).is_some(), "missing {key}");
        }
        assert_eq!(row["step"], 0);
        assert_eq!(row["mean_kl"], 0.0);
    }

    #[test]
    fn epoch_summary_partitions_steps() {
        let rows: Vec<StepMetrics> = (0..10)
            .map(|step| StepMetrics {
                step,
                mean_reward: step as f64,
                mean_kl: 0.0,
                loss: 0.0,
                banned_fraction: 0.0,
            })
            .collect();
        let trace = TrainingTrace {
            steps: rows,
            final_samples: Vec::new(),
            rejected_steps: 0,
        };
        let summary = trace.epoch_summary(4);
        assert_eq!(summary.len(), 4);
        assert_eq!(summary.iter().map(|e| e.steps).sum::<usize>(), 10);
        assert!((summary[0].mean_reward - 1.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_train_config_is_rejected() {
        let bad = TrainConfig {
            sampling: SamplingParams {
                top_p: 0.0,
                ..SamplingParams::default()
            },
            ..TrainConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = TrainConfig {
            beta: -0.1,
            ..TrainConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn strong_kl_penalty_restrains_divergence() {
        // At the toy scale beta = 0.001 is below trajectory noise; a strong
        // penalty must visibly pin the policy to the reference.
        let scorer = Scorer::new(RewardConfig::default()).unwrap();
        let provider = OfflineProvider::default();
        let base = TrainConfig {
            steps: 80,
            ..TrainConfig::default()
        };
        let free = run_simulation(
            &TrainConfig { beta: 0.0, ..base.clone() },
            &scorer,
            &provider,
        )
        .unwrap();
        let pinned = run_simulation(&TrainConfig { beta: 5.0, ..base }, &scorer, &provider).unwrap();
        let kl_free = free.steps.last().unwrap().mean_kl;
        let kl_pinned = pinned.steps.last().unwrap().mean_kl;
        assert!(
            kl_pinned < kl_free,
            "beta 5 should restrain KL: {kl_pinned} vs {kl_free}"
        );
    }

    #[test]
    fn toy_prompt_references_are_conformant() {
        let scorer = Scorer::new(RewardConfig::default()).unwrap();
        let provider = OfflineProvider::default();
        for prompt in toy_prompts() {
            let record = CompletionRecord {
                id: prompt.id.clone(),
                prompt: prompt.prompt.clone(),
                completion: prompt.reference.clone(),
                ground_truth: Some(prompt.ground_truth.clone()),
                candidates: Some(prompt.candidates.clone()),
                reasoning_reference: Some(prompt.reference.clone()),
            };
            let b = scorer.score(&record, &provider, false).unwrap();
            assert_eq!(b.format, 1.0, "reference {:?}", prompt.reference);
            assert_eq!(b.accuracy, Some(1.0));
            assert_eq!(b.language, 1.0);
            assert!((b.semantic.unwrap() - 1.0).abs() < 1e-9);
            assert!((b.total - 4.0).abs() < 1e-9);
        }
    }
}
