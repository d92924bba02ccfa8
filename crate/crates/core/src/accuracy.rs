//! Accuracy reward: correctness of the extracted answer against the ground
//! truth, with partial credit `score_ac` for an answer inside the
//! candidate set of a multiple-choice task.

use crate::format::extract_predictions;
use regex::Regex;

/// Trim surrounding whitespace and case-fold single-character labels.
/// Exam labels are letters, and "c" vs "C" should not flip the reward
/// sign; longer labels compare case-sensitively to avoid collisions.
pub fn normalize_label(label: &str) -> String {
    let trimmed = label.trim();
    let mut chars = trimmed.chars();
    match (chars.next(), chars.next()) {
        (Some(_), None) => trimmed.to_lowercase(),
        _ => trimmed.to_string(),
    }
}

pub fn labels_equal(a: &str, b: &str) -> bool {
    normalize_label(a) == normalize_label(b)
}

pub(crate) fn label_in(label: &str, candidates: &[String]) -> bool {
    candidates.iter().any(|c| labels_equal(label, c))
}

/// Correctness score in {0, score_ac, 1}.
///
/// Zero or multiple extracted answers score 0. A single extraction scores
/// 1 when it equals the ground truth, `score_ac` when it is merely one of
/// the candidates, and 0 otherwise. Without a candidate list there is no
/// partial-credit set, so a wrong single answer scores 0.
pub fn accuracy_reward(
    completion: &str,
    ground_truth: &str,
    candidates: Option<&[String]>,
    score_ac: f64,
    rg_a: &Regex,
) -> f64 {
    let predictions = extract_predictions(completion, rg_a);
    if predictions.len() != 1 {
        return 0.0;
    }
    let prediction = &predictions[0];
    if labels_equal(prediction, ground_truth) {
        1.0
    } else if candidates.map_or(false, |c| label_in(prediction, c)) {
        score_ac
    } else {
        0.0
    }
}
