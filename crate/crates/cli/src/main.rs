//! rewardlab: JSONL pipeline CLI for the reward scoring engine.
//!
//! Subcommands:
//! - `score`           batch-score completion records (stdin/stdout JSONL)
//! - `validate-config` check a reward config against every invariant
//! - `simulate`        run the desk-scale GRPO toy loop and dump traces
//! - `dataset-qa`      filter a reasoning dataset through the QA pipeline
//!
//! Exit codes: 0 success; 1 record-level or runtime errors; 2 unusable
//! configuration or input file.

mod dataset_qa;
mod score;
mod simulate;

use clap::{Parser, Subcommand};
use rewardlab_core::config::ProviderConfig;
use rewardlab_core::embed::{provider_from_config, CachedProvider};
use rewardlab_core::{validate_config, RewardConfig};
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RECORD_ERRORS: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Parser)]
#[command(name = "rewardlab", version, about = "Verifiable-reward scoring engine and GRPO toy lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score completion records from a JSONL stream.
    Score(score::ScoreArgs),
    /// Validate a reward config file; prints each violation.
    ValidateConfig {
        /// Path to the JSON config.
        config: PathBuf,
    },
    /// Run the GRPO toy simulation and write its trace.
    Simulate(simulate::SimulateArgs),
    /// Run the dataset QA filters over a JSONL sample stream.
    DatasetQa(dataset_qa::DatasetQaArgs),
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Score(args) => score::run(&args),
        Command::ValidateConfig { config } => run_validate_config(&config),
        Command::Simulate(args) => simulate::run(&args),
        Command::DatasetQa(args) => dataset_qa::run(&args),
    };
    std::process::exit(code);
}

fn run_validate_config(path: &Path) -> i32 {
    let cfg = match RewardConfig::from_path(path) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let violations = validate_config(&cfg);
    if violations.is_empty() {
        println!("ok");
        EXIT_OK
    } else {
        for v in &violations {
            println!("violation: {v}");
        }
        EXIT_RECORD_ERRORS
    }
}

/// Load the reward config, or defaults when no path is given. In strict
/// mode the similarity threshold must be spelled out in the file rather
/// than defaulted.
pub fn load_reward_config(path: Option<&Path>, strict: bool) -> Result<RewardConfig, String> {
    let cfg = match path {
        Some(path) => RewardConfig::from_path(path).map_err(|e| e.to_string())?,
        None => {
            if strict {
                return Err(
                    "strict mode requires a config file with an explicit similarity_threshold"
                        .into(),
                );
            }
            RewardConfig::default()
        }
    };
    if strict {
        let text =
            std::fs::read_to_string(path.expect("checked above")).map_err(|e| e.to_string())?;
        let raw: serde_json::Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
        if raw.get("similarity_threshold").is_none() {
            return Err("strict mode requires an explicit similarity_threshold in the config".into());
        }
    }
    let violations = validate_config(&cfg);
    if !violations.is_empty() {
        let list: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        return Err(format!("invalid config: {}", list.join("; ")));
    }
    Ok(cfg)
}

/// Apply the `--provider` flag on top of the config's provider block.
pub fn resolve_provider(cfg: &RewardConfig, flag: Option<&str>) -> Result<CachedProvider, String> {
    let provider_cfg = match flag {
        None => cfg.provider.clone(),
        Some("offline") => ProviderConfig::Offline,
        Some("http") => match &cfg.provider {
            http @ ProviderConfig::Http { .. } => http.clone(),
            ProviderConfig::Offline => {
                return Err(
                    "--provider http needs an http provider block (url, model) in the config"
                        .into(),
                )
            }
        },
        Some(other) => return Err(format!("unknown provider {other:?}; use offline or http")),
    };
    provider_from_config(&provider_cfg).map_err(|e| e.to_string())
}
