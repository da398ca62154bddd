//! Command-line front end for the fluid-antenna THz outage library.
//!
//! The binary is a thin wrapper around [`run`]; everything it prints is
//! produced here so tests can drive it in-process.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod output;

use std::path::Path;

use anyhow::{Context, Result};

pub use commands::{run, Command};
pub use config::ExperimentConfig;

/// Command-line overrides applied on top of the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<String>,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    ExperimentConfig::from_json(&text).with_context(|| format!("in {}", path.display()))
}

pub fn apply_overrides(cfg: &mut ExperimentConfig, o: &Overrides) {
    if let Some(out) = &o.out {
        cfg.output_path = Some(out.clone());
    }
    if let Some(seed) = o.seed {
        cfg.mc.seed = seed;
    }
    if let Some(trials) = o.trials {
        cfg.mc.trials = trials;
    }
}

/// Runs `command` with `workers` threads (0 = rayon default) and writes the
/// CSV to the configured output path, or returns it for stdout.
pub fn execute(command: Command, cfg: &ExperimentConfig, workers: usize) -> Result<Option<String>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .context("cannot start worker pool")?;
    let csv = pool.install(|| run(command, cfg))?;
    match &cfg.output_path {
        Some(path) => {
            std::fs::write(path, &csv).with_context(|| format!("cannot write {path}"))?;
            Ok(None)
        }
        None => Ok(Some(csv)),
    }
}
