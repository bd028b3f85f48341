//! Scenario configuration, the end-to-end pipeline, and result output.

mod config;
mod output;
mod pipeline;
mod summary;

use std::path::{Path, PathBuf};

use rayon::prelude::*;

pub use config::{ImpairmentSettings, Preset, PulseConfig, ScenarioConfig};
pub use output::{
    format_sig9, summary_toml, trace_csv, write_outputs, CSV_HEADER, SUMMARY_FILE, TRACE_FILE,
};
pub use pipeline::{
    run_scenario, AlignmentRecord, BlockRecord, PipelineError, RecoveryReport, ResyncEvent,
    RunResult, Stage,
};
pub use summary::{log_error_stats, summarize, LogErrorStats, Summary, COMPARISON_RANGE};

/// Runs one scenario per seed in parallel, writing each into
/// `out/seed_<n>/`. Results come back in seed order.
pub fn run_sweep(
    base: &ScenarioConfig,
    seeds: std::ops::RangeInclusive<u64>,
    out: &Path,
) -> Vec<(u64, Result<PathBuf, SweepError>)> {
    let seeds: Vec<u64> = seeds.collect();
    seeds
        .par_iter()
        .map(|&seed| {
            let cfg = ScenarioConfig {
                seed,
                ..base.clone()
            };
            let dir = out.join(format!("seed_{seed}"));
            let res = run_scenario(&cfg)
                .map_err(SweepError::Pipeline)
                .and_then(|r| write_outputs(&r, &dir).map_err(|e| SweepError::Io(e.to_string())))
                .map(|_| dir);
            (seed, res)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SweepError {
    #[error(transparent)]
    Pipeline(PipelineError),
    #[error("writing output: {0}")]
    Io(String),
}
