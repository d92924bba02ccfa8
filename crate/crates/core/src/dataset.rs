//! Reasoning-chain validation over dataset samples: format conformity,
//! similarity-based redundancy pruning, and a consistency check that the
//! chain actually leads to the stated answer.
//!
//! The consistency rule is a lexical/extraction proxy, not theorem
//! proving: it accepts a chain whose final step mentions the answer label,
//! or whose concatenated text carries exactly one answer-tag extraction
//! equal to the label. Anything subtler is left to human review.

use crate::accuracy::{labels_equal, normalize_label};
use crate::embed::{cosine, EmbeddingProvider};
use crate::format::extract_predictions;
use crate::record::{parse_sample, DatasetSample};
use crate::scorer::Scorer;
use crate::{Error, Result};
use regex::Regex;
use serde::Serialize;
use std::io::{BufRead, Write};
use std::sync::OnceLock;

pub const DEFAULT_DUP_THRESHOLD: f64 = 0.92;

/// Outcome of a pass/fail check with human-readable diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub ok: bool,
    pub diagnostics: Vec<String>,
}

impl CheckReport {
    fn pass() -> Self {
        Self {
            ok: true,
            diagnostics: Vec::new(),
        }
    }

    fn fail(diagnostics: Vec<String>) -> Self {
        Self {
            ok: false,
            diagnostics,
        }
    }
}

fn enumerator_pattern() -> &'static Regex {
    static PATTERN: OnceLock<Regex> = OnceLock::new();
    PATTERN.get_or_init(|| Regex::new(r"^\s*(\d{1,9})\s*[.)]").unwrap())
}

/// Steps must be nonempty and nonblank, and leading enumerators (`1.`,
/// `2)`, ...), where present, must be strictly increasing. Step indices in
/// diagnostics are 1-based.
pub fn check_format_conformity(sample: &DatasetSample) -> CheckReport {
    let mut diagnostics = Vec::new();
    if sample.steps.is_empty() {
        diagnostics.push("no steps".to_string());
    }
    let mut last_marker: Option<u64> = None;
    for (i, step) in sample.steps.iter().enumerate() {
        if step.trim().is_empty() {
            diagnostics.push(format!("blank step {}", i + 1));
            continue;
        }
        if let Some(captures) = enumerator_pattern().captures(step) {
            let marker: u64 = captures[1].parse().unwrap_or(u64::MAX);
            if let Some(previous) = last_marker {
                if marker <= previous {
                    diagnostics.push(format!("non-increasing enumerator at step {}", i + 1));
                }
            }
            last_marker = Some(marker);
        }
    }
    if diagnostics.is_empty() {
        CheckReport::pass()
    } else {
        CheckReport::fail(diagnostics)
    }
}

/// One pruned step.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RemovedStep {
    /// 0-based index in the original step list.
    pub index: usize,
    /// 0-based original index of the retained step it duplicated.
    pub duplicate_of: usize,
    pub similarity: f64,
}

/// Scan steps in order; a step is removed iff its cosine similarity to any
/// retained earlier step reaches `dup_threshold`. The first step is always
/// retained and order is preserved.
pub fn eliminate_redundancy(
    sample: &DatasetSample,
    provider: &dyn EmbeddingProvider,
    dup_threshold: f64,
) -> Result<(DatasetSample, Vec<RemovedStep>)> {
    if !(dup_threshold > 0.0 && dup_threshold <= 1.0) {
        return Err(Error::Config(format!(
            "dup_threshold must be in (0, 1], got {dup_threshold}"
        )));
    }
    let texts: Vec<&str> = sample.steps.iter().map(String::as_str).collect();
    let vectors = provider.embed_batch(&texts)?;

    let mut retained: Vec<usize> = Vec::new();
    let mut removed: Vec<RemovedStep> = Vec::new();
    for index in 0..sample.steps.len() {
        let mut duplicate = None;
        for &kept in &retained {
            let similarity = cosine(&vectors[kept], &vectors[index])?;
            if similarity >= dup_threshold {
                duplicate = Some((kept, similarity));
                break;
            }
        }
        match duplicate {
            Some((kept, similarity)) => removed.push(RemovedStep {
                index,
                duplicate_of: kept,
                similarity,
            }),
            None => retained.push(index),
        }
    }

    let pruned = DatasetSample {
        steps: retained.iter().map(|&i| sample.steps[i].clone()).collect(),
        ..sample.clone()
    };
    Ok((pruned, removed))
}

/// Accept a chain iff the final step mentions the answer label as a word,
/// or the concatenated chain contains exactly one answer-pattern
/// extraction equal to the answer.
pub fn check_consistency(sample: &DatasetSample, rg_a: &Regex) -> CheckReport {
    let answer = normalize_label(&sample.answer);

    if let Some(last) = sample.steps.last() {
        let mentioned = last
            .split(|c: char| !c.is_alphanumeric())
            .filter(|token| !token.is_empty())
            .any(|token| normalize_label(token) == answer);
        if mentioned {
            return CheckReport::pass();
        }
    }

    let chain = sample.steps.join("\n");
    let extractions = extract_predictions(&chain, rg_a);
    if extractions.len() == 1 && labels_equal(&extractions[0], &sample.answer) {
        return CheckReport::pass();
    }

    let mut diagnostics = vec![format!(
        "final step does not mention answer {:?}",
        sample.answer
    )];
    match extractions.len() {
        0 => diagnostics.push("no answer-tag extraction in chain".to_string()),
        1 => diagnostics.push(format!(
            "chain extraction {:?} conflicts with answer {:?}",
            extractions[0], sample.answer
        )),
        n => diagnostics.push(format!("{n} answer-tag extractions in chain")),
    }
    CheckReport::fail(diagnostics)
}

/// Per-stage tallies of one QA run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct QaReport {
    pub input: usize,
    pub passed: usize,
    pub failed_format: usize,
    pub failed_consistency: usize,
    /// Steps removed by redundancy pruning across all samples.
    pub steps_pruned: usize,
}

/// Filter a JSONL stream of samples: prune redundant steps, then require
/// format conformity and consistency. Order-preserving; passing samples
/// are echoed with their pruned steps. Malformed input aborts the run.
pub fn run_dataset_qa(
    input: impl BufRead,
    mut output: impl Write,
    scorer: &Scorer,
    provider: &dyn EmbeddingProvider,
    dup_threshold: f64,
) -> Result<QaReport> {
    let mut report = QaReport::default();
    for (line_no, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let sample = parse_sample(&line, line_no + 1)?;
        report.input += 1;

        let (pruned, removed) = eliminate_redundancy(&sample, provider, dup_threshold)?;
        report.steps_pruned += removed.len();

        if !check_format_conformity(&pruned).ok {
            report.failed_format += 1;
            continue;
        }
        if !check_consistency(&pruned, scorer.answer_pattern()).ok {
            report.failed_consistency += 1;
            continue;
        }

        serde_json::to_writer(&mut output, &pruned).map_err(std::io::Error::from)?;
        output.write_all(b"\n")?;
        report.passed += 1;
    }
    output.flush()?;
    Ok(report)
}
