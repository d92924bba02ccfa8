//! Composition layer: validates and compiles a [`RewardConfig`] once, then
//! scores completion records with all four reward functions.

use crate::accuracy::accuracy_reward;
use crate::config::{validate_config, RewardConfig};
use crate::embed::EmbeddingProvider;
use crate::format::{extract_predictions, format_reward};
use crate::grpo::total_reward;
use crate::language::{contains_banned, language_reward, BannedSet};
use crate::record::CompletionRecord;
use crate::semantic::semantic_reward;
use crate::{Error, Result};
use regex::Regex;
use serde::{Deserialize, Serialize};

/// Per-function scores and the weighted total for one completion.
///
/// `accuracy` and `semantic` are absent when the record lacks the field
/// they need (ground truth / reference chain); absent components
/// contribute 0 to the total.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardBreakdown {
    pub format: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accuracy: Option<f64>,
    pub language: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub semantic: Option<f64>,
    pub total: f64,
    /// The single extracted answer, when extraction yielded exactly one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prediction: Option<String>,
}

/// A validated, compiled reward configuration. Construction fails if any
/// config invariant is violated, so pattern compilation errors surface at
/// load time and never per-call.
pub struct Scorer {
    cfg: RewardConfig,
    rg_s: Regex,
    rg_a: Regex,
    banned: BannedSet,
}

impl Scorer {
    pub fn new(cfg: RewardConfig) -> Result<Self> {
        let violations = validate_config(&cfg);
        if !violations.is_empty() {
            let list = violations
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join("; ");
            return Err(Error::Config(format!("invalid reward config: {list}")));
        }
        let rg_s = Regex::new(&cfg.rg_s).expect("validated above");
        let rg_a = Regex::new(&cfg.rg_a).expect("validated above");
        let banned = BannedSet::new(&cfg.banned_ranges)?;
        Ok(Self {
            cfg,
            rg_s,
            rg_a,
            banned,
        })
    }

    pub fn config(&self) -> &RewardConfig {
        &self.cfg
    }

    pub fn answer_pattern(&self) -> &Regex {
        &self.rg_a
    }

    pub fn banned_set(&self) -> &BannedSet {
        &self.banned
    }

    pub fn format_reward(&self, rec: &CompletionRecord) -> f64 {
        format_reward(
            &rec.completion,
            rec.candidates.as_deref(),
            &self.cfg,
            &self.rg_s,
            &self.rg_a,
        )
    }

    /// Errors when the record has no ground truth: silently scoring 0
    /// would corrupt the advantages of the whole group.
    pub fn accuracy_reward(&self, rec: &CompletionRecord) -> Result<f64> {
        let gt = rec
            .ground_truth
            .as_deref()
            .ok_or_else(|| Error::scoring(&rec.id, "ground_truth missing"))?;
        Ok(accuracy_reward(
            &rec.completion,
            gt,
            rec.candidates.as_deref(),
            self.cfg.score_ac,
            &self.rg_a,
        ))
    }

    pub fn language_reward(&self, rec: &CompletionRecord) -> f64 {
        language_reward(&rec.completion, &self.banned)
    }

    pub fn semantic_reward(
        &self,
        rec: &CompletionRecord,
        provider: &dyn EmbeddingProvider,
    ) -> Result<f64> {
        let reference = rec
            .reasoning_reference
            .as_deref()
            .ok_or_else(|| Error::scoring(&rec.id, "reasoning_reference missing"))?;
        semantic_reward(
            &rec.completion,
            reference,
            provider,
            self.cfg.similarity_threshold,
        )
    }

    pub fn completion_contains_banned(&self, text: &str) -> bool {
        contains_banned(text, &self.banned)
    }

    /// Score a record with every applicable reward function.
    ///
    /// In strict mode a missing ground truth or reference chain is an
    /// error; otherwise the component is omitted from the breakdown.
    pub fn score(
        &self,
        rec: &CompletionRecord,
        provider: &dyn EmbeddingProvider,
        strict: bool,
    ) -> Result<RewardBreakdown> {
        let format = self.format_reward(rec);

        let accuracy = if rec.ground_truth.is_some() || strict {
            Some(self.accuracy_reward(rec)?)
        } else {
            None
        };
        let semantic = if rec.reasoning_reference.is_some() || strict {
            Some(self.semantic_reward(rec, provider)?)
        } else {
            None
        };
        let language = self.language_reward(rec);

        let predictions = extract_predictions(&rec.completion, &self.rg_a);
        let prediction = match predictions.len() {
            1 => Some(predictions.into_iter().next().unwrap()),
            _ => None,
        };

        let mut breakdown = RewardBreakdown {
            format,
            accuracy,
            language,
            semantic,
            total: 0.0,
            prediction,
        };
        breakdown.total = total_reward(&breakdown, &self.cfg.weights).0;
        Ok(breakdown)
    }
}
