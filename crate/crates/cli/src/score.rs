//! `score`: stream CompletionRecords through the reward engine.
//!
//! Lines fan out to a worker pool over bounded channels and are re-emitted
//! in input order through a reorder buffer, so memory stays constant in
//! the record count. Data goes to stdout, diagnostics to stderr as JSON
//! objects, and the two never mix.

use crate::{load_reward_config, resolve_provider, EXIT_CONFIG, EXIT_OK, EXIT_RECORD_ERRORS};
use clap::Args;
use crossbeam_channel::bounded;
use rewardlab_core::embed::EmbeddingProvider;
use rewardlab_core::grpo::group_advantages;
use rewardlab_core::record::parse_record;
use rewardlab_core::{Error, RewardBreakdown, Scorer};
use serde_json::{json, Map, Value};
use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::PathBuf;

#[derive(Args)]
pub struct ScoreArgs {
    /// Input JSONL path, or - for stdin.
    #[arg(long, default_value = "-")]
    pub input: String,
    /// Output JSONL path, or - for stdout.
    #[arg(long, default_value = "-")]
    pub output: String,
    /// Reward config JSON path; built-in defaults when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override the config's embedding provider (offline | http).
    #[arg(long)]
    pub provider: Option<String>,
    /// Group size for advantage emission; defaults to the config's G.
    #[arg(long)]
    pub group_size: Option<usize>,
    /// Attach group-relative advantages to each output line.
    #[arg(long)]
    pub emit_advantages: bool,
    /// Treat missing ground_truth / reasoning_reference as errors, and
    /// require an explicit similarity_threshold in the config.
    #[arg(long)]
    pub strict: bool,
    /// Worker threads; defaults to the number of processors.
    #[arg(long)]
    pub workers: Option<usize>,
}

struct Job {
    seq: u64,
    line_no: u64,
    payload: Result<String, String>,
}

enum Outcome {
    Scored {
        id: String,
        breakdown: Box<RewardBreakdown>,
    },
    Failed {
        line_no: u64,
        id: Option<String>,
        message: String,
    },
}

pub fn run(args: &ScoreArgs) -> i32 {
    let cfg = match load_reward_config(args.config.as_deref(), args.strict) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let group_size = args.group_size.unwrap_or(cfg.group_size);
    if args.emit_advantages && group_size < 2 {
        eprintln!("error: --emit-advantages needs a group size of at least 2");
        return EXIT_CONFIG;
    }
    let provider = match resolve_provider(&cfg, args.provider.as_deref()) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let scorer = match Scorer::new(cfg) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };

    let input: Box<dyn Read + Send> = if args.input == "-" {
        Box::new(std::io::stdin())
    } else {
        match File::open(&args.input) {
            Ok(f) => Box::new(f),
            Err(e) => {
                eprintln!("error: cannot open {}: {e}", args.input);
                return EXIT_CONFIG;
            }
        }
    };
    let output: Box<dyn Write> = if args.output == "-" {
        Box::new(std::io::stdout())
    } else {
        match File::create(&args.output) {
            Ok(f) => Box::new(f),
            Err(e) => {
                eprintln!("error: cannot create {}: {e}", args.output);
                return EXIT_CONFIG;
            }
        }
    };

    let workers = args
        .workers
        .filter(|w| *w > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));

    match score_stream(
        BufReader::new(input),
        BufWriter::new(output),
        &scorer,
        &provider,
        workers,
        args.strict,
        args.emit_advantages.then_some(group_size),
    ) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_RECORD_ERRORS,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_RECORD_ERRORS
        }
    }
}

/// Pump the stream through the pool. Returns Ok(false) when any record
/// produced a diagnostic instead of a data line.
fn score_stream(
    input: impl BufRead + Send,
    mut output: impl Write,
    scorer: &Scorer,
    provider: &(impl EmbeddingProvider + Sync),
    workers: usize,
    strict: bool,
    advantage_group: Option<usize>,
) -> std::io::Result<bool> {
    let channel_cap = workers * 4;
    let (job_tx, job_rx) = bounded::<Job>(channel_cap);
    let (result_tx, result_rx) = bounded::<(u64, Outcome)>(channel_cap);

    std::thread::scope(|scope| {
        scope.spawn(move || {
            let mut seq = 0u64;
            for (index, line) in input.lines().enumerate() {
                let line_no = index as u64 + 1;
                let payload = match line {
                    Ok(line) if line.trim().is_empty() => continue,
                    Ok(line) => Ok(line),
                    Err(e) => Err(format!("read error: {e}")),
                };
                let stop = payload.is_err();
                if job_tx
                    .send(Job {
                        seq,
                        line_no,
                        payload,
                    })
                    .is_err()
                {
                    break;
                }
                seq += 1;
                if stop {
                    break;
                }
            }
        });

        for _ in 0..workers {
            let job_rx = job_rx.clone();
            let result_tx = result_tx.clone();
            scope.spawn(move || {
                for job in job_rx.iter() {
                    let outcome = match job.payload {
                        Ok(line) => score_line(&line, job.line_no, scorer, provider, strict),
                        Err(message) => Outcome::Failed {
                            line_no: job.line_no,
                            id: None,
                            message,
                        },
                    };
                    if result_tx.send((job.seq, outcome)).is_err() {
                        break;
                    }
                }
            });
        }
        drop(job_rx);
        drop(result_tx);

        // Reorder buffer: sequence numbers are dense, so emit whenever the
        // next expected one is buffered. Its size is bounded by the number
        // of in-flight jobs.
        let mut pending: BTreeMap<u64, Outcome> = BTreeMap::new();
        let mut next_seq = 0u64;
        let mut had_errors = false;
        let mut group: Vec<(String, RewardBreakdown)> = Vec::new();

        for (seq, outcome) in result_rx.iter() {
            pending.insert(seq, outcome);
            while let Some(outcome) = pending.remove(&next_seq) {
                next_seq += 1;
                emit(outcome, &mut group, &mut output, &mut had_errors, advantage_group)?;
            }
        }
        debug_assert!(pending.is_empty());

        if let Some(g) = advantage_group {
            if !group.is_empty() {
                had_errors = true;
                eprintln!(
                    "{}",
                    json!({
                        "error": "incomplete final group",
                        "size": group.len(),
                        "expected": g,
                    })
                );
                for (id, breakdown) in group.drain(..) {
                    writeln!(output, "{}", output_line(&id, &breakdown, None))?;
                }
            }
        }
        output.flush()?;
        Ok(!had_errors)
    })
}

fn emit(
    outcome: Outcome,
    group: &mut Vec<(String, RewardBreakdown)>,
    output: &mut impl Write,
    had_errors: &mut bool,
    advantage_group: Option<usize>,
) -> std::io::Result<()> {
    match outcome {
        Outcome::Scored { id, breakdown } => match advantage_group {
            Some(g) => {
                group.push((id, *breakdown));
                if group.len() == g {
                    flush_group(group, output)?;
                }
            }
            None => writeln!(output, "{}", output_line(&id, &breakdown, None))?,
        },
        Outcome::Failed {
            line_no,
            id,
            message,
        } => {
            *had_errors = true;
            let mut diag = Map::new();
            diag.insert("line".into(), json!(line_no));
            if let Some(id) = id {
                diag.insert("id".into(), json!(id));
            }
            diag.insert("error".into(), json!(message));
            eprintln!("{}", Value::Object(diag));
        }
    }
    Ok(())
}

fn flush_group(
    group: &mut Vec<(String, RewardBreakdown)>,
    output: &mut impl Write,
) -> std::io::Result<()> {
    let totals: Vec<f64> = group.iter().map(|(_, b)| b.total).collect();
    let advantages = group_advantages(&totals);
    for ((id, breakdown), advantage) in group.drain(..).zip(advantages) {
        writeln!(output, "{}", output_line(&id, &breakdown, Some(advantage)))?;
    }
    Ok(())
}

fn score_line(
    line: &str,
    line_no: u64,
    scorer: &Scorer,
    provider: &(impl EmbeddingProvider + Sync),
    strict: bool,
) -> Outcome {
    let record = match parse_record(line, line_no as usize) {
        Ok(record) => record,
        Err(e) => {
            return Outcome::Failed {
                line_no,
                id: None,
                message: e.to_string(),
            }
        }
    };
    match scorer.score(&record, provider, strict) {
        Ok(breakdown) => Outcome::Scored {
            id: record.id,
            breakdown: Box::new(breakdown),
        },
        Err(e) => {
            let id = match &e {
                Error::Scoring { id, .. } => Some(id.clone()),
                _ => Some(record.id.clone()),
            };
            Outcome::Failed {
                line_no,
                id,
                message: e.to_string(),
            }
        }
    }
}

fn output_line(id: &str, b: &RewardBreakdown, advantage: Option<f64>) -> Value {
    let mut rewards = Map::new();
    rewards.insert("format".into(), json!(b.format));
    if let Some(accuracy) = b.accuracy {
        rewards.insert("accuracy".into(), json!(accuracy));
    }
    rewards.insert("language".into(), json!(b.language));
    if let Some(semantic) = b.semantic {
        rewards.insert("semantic".into(), json!(semantic));
    }
    let mut obj = Map::new();
    obj.insert("id".into(), json!(id));
    obj.insert("rewards".into(), Value::Object(rewards));
    obj.insert("total".into(), json!(b.total));
    if let Some(prediction) = &b.prediction {
        obj.insert("prediction".into(), json!(prediction));
    }
    if let Some(advantage) = advantage {
        obj.insert("advantage".into(), json!(advantage));
    }
    Value::Object(obj)
}
