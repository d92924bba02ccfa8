//! Format reward: structural scoring of tagged completions.
//!
//! Starting from 1.0, a completion loses `score_c` when the whole-structure
//! pattern fails, `score_a` when answer extraction does not yield exactly
//! one match, and `score_ac` when the single extracted answer is outside
//! the candidate set. With the recommended scores the reachable values are
//! {1.0, 1-score_c, 1-score_a, 1-score_ac, 1-score_c-score_a,
//! 1-score_c-score_ac}.

use crate::accuracy::label_in;
use crate::config::RewardConfig;
use regex::Regex;

/// Whether the whole-structure pattern matches the completion.
pub fn matches_sequence_format(text: &str, rg_s: &Regex) -> bool {
    rg_s.is_match(text)
}

/// All non-overlapping captures of the answer pattern, in order, trimmed
/// of surrounding whitespace. No match yields an empty list.
pub fn extract_predictions(text: &str, rg_a: &Regex) -> Vec<String> {
    rg_a.captures_iter(text)
        .filter_map(|c| c.get(1))
        .map(|m| m.as_str().trim().to_string())
        .collect()
}

/// Structural score in [0, 1].
///
/// An absent candidate list disables the membership deduction: free-form
/// tasks have no candidate set, so a single extracted answer is treated as
/// in-set rather than penalized. A completion with zero or multiple answer
/// matches loses `score_a` either way. The final value is clamped at 0 for
/// configs relaxed beyond the recommended constraints.
pub fn format_reward(
    completion: &str,
    candidates: Option<&[String]>,
    cfg: &RewardConfig,
    rg_s: &Regex,
    rg_a: &Regex,
) -> f64 {
    let mut score = 1.0;
    if !matches_sequence_format(completion, rg_s) {
        score -= cfg.score_c;
    }
    let predictions = extract_predictions(completion, rg_a);
    if predictions.len() == 1 {
        if let Some(candidates) = candidates {
            if !label_in(&predictions[0], candidates) {
                score -= cfg.score_ac;
            }
        }
    } else {
        score -= cfg.score_a;
    }
    score.clamp(0.0, 1.0)
}
