//! JSONL record model: one completion per line for scoring, one dataset
//! sample per line for the QA pipeline.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// One model completion with its grading context.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletionRecord {
    pub id: String,
    #[serde(default)]
    pub prompt: String,
    pub completion: String,
    /// Expected answer label, required by the accuracy reward.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground_truth: Option<String>,
    /// Admissible answer labels for multiple-choice tasks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidates: Option<Vec<String>>,
    /// Curated reasoning chain, required by the semantic reward.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reasoning_reference: Option<String>,
}

#[derive(Deserialize)]
struct RawRecord {
    id: Option<String>,
    #[serde(default)]
    prompt: Option<String>,
    completion: Option<String>,
    #[serde(default)]
    ground_truth: Option<String>,
    #[serde(default)]
    candidates: Option<Vec<String>>,
    #[serde(default)]
    reasoning_reference: Option<String>,
}

/// Parse one JSONL line into a [`CompletionRecord`].
///
/// Unknown keys are ignored; missing optional fields become absent. The
/// line number is only used for error reporting.
pub fn parse_record(line: &str, line_no: usize) -> Result<CompletionRecord> {
    let raw: RawRecord = serde_json::from_str(line).map_err(|e| Error::Parse {
        line: line_no,
        message: e.to_string(),
    })?;

    let id = match raw.id {
        Some(id) if !id.is_empty() => id,
        Some(_) => return Err(Error::schema("id empty")),
        None => return Err(Error::schema("id missing")),
    };
    let completion = raw.completion.ok_or_else(|| Error::schema("completion missing"))?;

    if let Some(candidates) = &raw.candidates {
        validate_candidates(candidates)?;
        if let Some(gt) = &raw.ground_truth {
            if !candidates.contains(gt) {
                return Err(Error::schema(format!(
                    "ground_truth {gt:?} not in candidates"
                )));
            }
        }
    }

    Ok(CompletionRecord {
        id,
        prompt: raw.prompt.unwrap_or_default(),
        completion,
        ground_truth: raw.ground_truth,
        candidates: raw.candidates,
        reasoning_reference: raw.reasoning_reference,
    })
}

fn validate_candidates(candidates: &[String]) -> Result<()> {
    for (i, label) in candidates.iter().enumerate() {
        if label.is_empty() {
            return Err(Error::schema(format!("empty candidate at index {i}")));
        }
        if candidates[..i].contains(label) {
            return Err(Error::schema(format!("duplicate candidate {label:?}")));
        }
    }
    Ok(())
}

/// One reasoning-dataset sample: instruction, optional retrieved context,
/// the step chain, and the final answer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetSample {
    pub instruction: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub context: Option<String>,
    pub steps: Vec<String>,
    pub answer: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidates: Option<Vec<String>>,
}

#[derive(Deserialize)]
struct RawSample {
    instruction: Option<String>,
    #[serde(default)]
    context: Option<String>,
    steps: Option<Vec<String>>,
    answer: Option<String>,
    #[serde(default)]
    candidates: Option<Vec<String>>,
}

/// Parse one JSONL line into a [`DatasetSample`].
pub fn parse_sample(line: &str, line_no: usize) -> Result<DatasetSample> {
    let raw: RawSample = serde_json::from_str(line).map_err(|e| Error::Parse {
        line: line_no,
        message: e.to_string(),
    })?;

    let instruction = raw.instruction.ok_or_else(|| Error::schema("instruction missing"))?;
    let steps = raw.steps.ok_or_else(|| Error::schema("steps missing"))?;
    if steps.is_empty() {
        return Err(Error::schema("steps empty"));
    }
    let answer = match raw.answer {
        Some(a) if !a.is_empty() => a,
        Some(_) => return Err(Error::schema("answer empty")),
        None => return Err(Error::schema("answer missing")),
    };
    if let Some(candidates) = &raw.candidates {
        validate_candidates(candidates)?;
    }

    Ok(DatasetSample {
        instruction,
        context: raw.context,
        steps,
        answer,
        candidates: raw.candidates,
    })
}
