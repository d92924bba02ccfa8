//! rewardlab-core
//!
//! A verifiable-reward scoring engine for reasoning-model fine-tuning
//! workflows, plus a desk-scale GRPO laboratory that exercises the rewards
//! end to end.
//!
//! Four reward functions over tagged `<think>`/`<answer>` completions:
//!
//! - **format** — structural score for tag conformity, with configurable
//!   deductions for a broken sequence, a missing/extra answer, or an
//!   answer outside the candidate set
//! - **accuracy** — correctness against the ground truth with partial
//!   credit for in-candidate answers
//! - **language** — binary purity gate over banned Unicode ranges,
//!   targeting language mixing
//! - **semantic** — threshold-gated cosine similarity between the
//!   completion and its reference reasoning chain
//!
//! On top of those sit the GRPO group machinery (group-relative
//! advantages, a per-token KL estimator, a categorical toy policy trained
//! by policy gradient) and the dataset QA filters (format conformity,
//! redundancy pruning, consistency checking).
//!
//! # Modules
//!
//! - [`record`]: JSONL record model ([`CompletionRecord`], [`DatasetSample`])
//! - [`config`]: [`RewardConfig`] and validation
//! - [`format`], [`accuracy`], [`language`], [`semantic`]: the reward functions
//! - [`scorer`]: compiled-config composition ([`Scorer`], [`RewardBreakdown`])
//! - [`embed`]: embedding providers (offline n-gram, HTTP) and cosine math
//! - [`grpo`]: advantages, KL estimator, toy policy, training loop
//! - [`dataset`]: reasoning-chain QA pipeline

pub mod accuracy;
pub mod config;
pub mod dataset;
pub mod embed;
pub mod error;
pub mod format;
pub mod grpo;
pub mod language;
pub mod record;
pub mod scorer;
pub mod semantic;

pub use config::{validate_config, ProviderConfig, RewardConfig, RewardWeights, Violation};
pub use error::{Error, Result};
pub use record::{parse_record, parse_sample, CompletionRecord, DatasetSample};
pub use scorer::{RewardBreakdown, Scorer};
