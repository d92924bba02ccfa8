//! `dataset-qa`: filter a JSONL reasoning dataset through redundancy
//! pruning, format conformity, and the consistency check.
//!
//! File output goes through a `.partial` temp file that is renamed on
//! success and removed on failure, so an aborted run never leaves a
//! truncated output behind as if it were complete.

use crate::{load_reward_config, resolve_provider, EXIT_CONFIG, EXIT_OK, EXIT_RECORD_ERRORS};
use clap::Args;
use rewardlab_core::dataset::{run_dataset_qa, QaReport, DEFAULT_DUP_THRESHOLD};
use rewardlab_core::Scorer;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::PathBuf;

#[derive(Args)]
pub struct DatasetQaArgs {
    /// Input JSONL path, or - for stdin.
    #[arg(long, default_value = "-")]
    pub input: String,
    /// Filtered JSONL output path, or - for stdout.
    #[arg(long, default_value = "-")]
    pub output: String,
    /// Write the per-stage count report (JSON) here; stderr when omitted.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Reward config JSON path; built-in defaults when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override the config's embedding provider (offline | http).
    #[arg(long)]
    pub provider: Option<String>,
    /// Cosine similarity at which a later step counts as a duplicate.
    #[arg(long, default_value_t = DEFAULT_DUP_THRESHOLD)]
    pub dup_threshold: f64,
}

pub fn run(args: &DatasetQaArgs) -> i32 {
    let cfg = match load_reward_config(args.config.as_deref(), false) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
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

    let input: Box<dyn Read> = if args.input == "-" {
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
    let reader = BufReader::new(input);

    let report = if args.output == "-" {
        run_dataset_qa(
            reader,
            BufWriter::new(std::io::stdout()),
            &scorer,
            &provider,
            args.dup_threshold,
        )
    } else {
        let final_path = PathBuf::from(&args.output);
        let partial_path = final_path.with_extension("partial");
        let file = match File::create(&partial_path) {
            Ok(f) => f,
            Err(e) => {
                eprintln!("error: cannot create {}: {e}", partial_path.display());
                return EXIT_CONFIG;
            }
        };
        let result = run_dataset_qa(
            reader,
            BufWriter::new(file),
            &scorer,
            &provider,
            args.dup_threshold,
        );
        match result {
            Ok(report) => match std::fs::rename(&partial_path, &final_path) {
                Ok(()) => Ok(report),
                Err(e) => {
                    let _ = std::fs::remove_file(&partial_path);
                    eprintln!("error: cannot finalize {}: {e}", final_path.display());
                    return EXIT_RECORD_ERRORS;
                }
            },
            Err(e) => {
                let _ = std::fs::remove_file(&partial_path);
                Err(e)
            }
        }
    };

    match report {
        Ok(report) => emit_report(&report, args.report.as_deref()),
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_RECORD_ERRORS
        }
    }
}

fn emit_report(report: &QaReport, path: Option<&std::path::Path>) -> i32 {
    let json = serde_json::to_string(report).expect("report serializes");
    match path {
        Some(path) => {
            if let Err(e) = File::create(path).and_then(|mut f| writeln!(f, "{json}")) {
                eprintln!("error: cannot write report: {e}");
                return EXIT_RECORD_ERRORS;
            }
        }
        None => eprintln!("{json}"),
    }
    EXIT_OK
}
