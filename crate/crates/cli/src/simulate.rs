//! `simulate`: run the toy GRPO loop, write the step trace and the epoch
//! summary, and print the summary table.

use crate::{load_reward_config, EXIT_CONFIG, EXIT_OK, EXIT_RECORD_ERRORS};
use clap::Args;
use rewardlab_core::embed::provider_from_config;
use rewardlab_core::grpo::{run_simulation, TrainConfig};
use rewardlab_core::Scorer;
use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

#[derive(Args)]
pub struct SimulateArgs {
    /// Train config JSON path; the built-in toy preset when omitted.
    #[arg(long)]
    pub train_config: Option<PathBuf>,
    /// Reward config JSON path; built-in defaults when omitted.
    #[arg(long)]
    pub reward_config: Option<PathBuf>,
    /// Start from the published fine-tuning hyperparameters instead of
    /// the toy preset.
    #[arg(long)]
    pub faithful: bool,
    /// Override the preset's RNG seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Override the preset's step count.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Override the preset's KL coefficient.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Write the per-step JSONL trace here.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Write the per-epoch CSV summary here.
    #[arg(long)]
    pub summary: Option<PathBuf>,
    /// Print this many final-policy sample completions per prompt.
    #[arg(long, default_value_t = 1)]
    pub show_samples: usize,
}

pub fn run(args: &SimulateArgs) -> i32 {
    let mut train_cfg = match &args.train_config {
        Some(path) => match std::fs::read_to_string(path)
            .map_err(|e| e.to_string())
            .and_then(|text| TrainConfig::from_json(&text).map_err(|e| e.to_string()))
        {
            Ok(cfg) => cfg,
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_CONFIG;
            }
        },
        None if args.faithful => TrainConfig::faithful(),
        None => TrainConfig::default(),
    };
    if let Some(seed) = args.seed {
        train_cfg.seed = seed;
    }
    if let Some(steps) = args.steps {
        train_cfg.steps = steps;
    }
    if let Some(beta) = args.beta {
        train_cfg.beta = beta;
    }
    if let Err(e) = train_cfg.validate() {
        eprintln!("error: {e}");
        return EXIT_CONFIG;
    }

    let reward_cfg = match load_reward_config(args.reward_config.as_deref(), false) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let provider = match provider_from_config(&reward_cfg.provider) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let scorer = match Scorer::new(reward_cfg) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };

    let trace = match run_simulation(&train_cfg, &scorer, &provider) {
        Ok(trace) => trace,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_RECORD_ERRORS;
        }
    };

    if let Some(path) = &args.trace {
        if let Err(e) = File::create(path).and_then(|f| trace.write_trace_jsonl(BufWriter::new(f)))
        {
            eprintln!("error: cannot write trace: {e}");
            return EXIT_RECORD_ERRORS;
        }
    }
    if let Some(path) = &args.summary {
        if let Err(e) = File::create(path)
            .and_then(|f| trace.write_summary_csv(BufWriter::new(f), train_cfg.epochs))
        {
            eprintln!("error: cannot write summary: {e}");
            return EXIT_RECORD_ERRORS;
        }
    }

    println!("epoch  steps  mean_reward  mean_kl    loss        banned_fraction");
    for row in trace.epoch_summary(train_cfg.epochs) {
        println!(
            "{:<6} {:<6} {:<12.4} {:<10.6} {:<11.3e} {:.4}",
            row.epoch, row.steps, row.mean_reward, row.mean_kl, row.loss, row.banned_fraction
        );
    }
    if trace.rejected_steps > 0 {
        eprintln!("warning: {} rejected updates (non-finite gradient)", trace.rejected_steps);
    }

    if args.show_samples > 0 && !trace.final_samples.is_empty() {
        println!("\nfinal samples:");
        let mut shown: std::collections::HashMap<&str, usize> = std::collections::HashMap::new();
        for sample in &trace.final_samples {
            let count = shown.entry(sample.prompt_id.as_str()).or_insert(0);
            if *count < args.show_samples {
                *count += 1;
                println!(
                    "  [{}] total {:.3}  {}",
                    sample.prompt_id, sample.rewards.total, sample.completion
                );
            }
        }
    }

    EXIT_OK
}
