//! `fsosnr`: run fading-link SNR estimation scenarios and write their traces.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fsosnr::runner::{run_scenario, run_sweep, write_outputs, Preset, ScenarioConfig};

const EXIT_CONFIG: u8 = 1;
const EXIT_PIPELINE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "fsosnr",
    version,
    about = "Blind SNR estimation over a deep-fading QPSK link"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Overrides {
    /// Symbols per SNR estimation block.
    #[arg(long)]
    block_len: Option<usize>,
    /// SNR at the top of the fading profile, dB.
    #[arg(long)]
    ceiling_db: Option<f64>,
    /// SNR at the bottom of the fading profile, dB.
    #[arg(long)]
    floor_db: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single scenario.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run one scenario per seed in an inclusive range, e.g. `--seeds 1..10`.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seeds: String,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run a built-in scenario (`fig2a`: 7 dB ceiling, `fig2b`: 10 dB ceiling).
    Preset {
        name: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
}

impl Overrides {
    fn apply(&self, cfg: &mut ScenarioConfig) {
        if let Some(n) = self.block_len {
            cfg.block_len = n;
        }
        if let Some(c) = self.ceiling_db {
            cfg.fading.snr_ceiling_db = c;
        }
        if let Some(f) = self.floor_db {
            cfg.fading.snr_floor_db = f;
        }
    }
}

fn parse_seeds(s: &str) -> Result<std::ops::RangeInclusive<u64>, String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("seed range must look like a..b, got {s:?}"))?;
    let a: u64 = a
        .trim()
        .parse()
        .map_err(|e| format!("bad seed {a:?}: {e}"))?;
    let b: u64 = b
        .trim()
        .parse()
        .map_err(|e| format!("bad seed {b:?}: {e}"))?;
    if a > b {
        return Err(format!("empty seed range {s:?}"));
    }
    Ok(a..=b)
}

fn config_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("config error: {msg}");
    ExitCode::from(EXIT_CONFIG)
}

fn load(
    path: Option<&PathBuf>,
    preset: Option<&str>,
    seed: Option<u64>,
    overrides: &Overrides,
) -> Result<ScenarioConfig, ExitCode> {
    let mut cfg = match (path, preset) {
        (Some(p), _) => ScenarioConfig::from_file(p).map_err(config_error)?,
        (None, Some(name)) => ScenarioConfig::preset(name.parse::<Preset>().map_err(config_error)?),
        (None, None) => unreachable!("either a config path or a preset is given"),
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    overrides.apply(&mut cfg);
    cfg.validate().map_err(config_error)?;
    Ok(cfg)
}

fn run_one(cfg: &ScenarioConfig, out: &Path) -> ExitCode {
    let result = match run_scenario(cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("pipeline error in {}: {}", e.stage, e.source);
            return ExitCode::from(EXIT_PIPELINE);
        }
    };
    if let Err(e) = write_outputs(&result, out) {
        eprintln!("pipeline error in output: {e}");
        return ExitCode::from(EXIT_PIPELINE);
    }
    match &result.summary {
        Some(s) => println!(
            "{} blocks, {} resyncs, mean |dlog10 BER|: M2M4 {:.3}, EVM {:.3}",
            s.blocks, s.resync_count, s.m2m4.mean_abs_log10_error, s.evm_blind.mean_abs_log10_error
        ),
        None => println!(
            "{} blocks, {} resyncs, no comparable BER blocks",
            result.blocks.len(),
            result.resync_events.len()
        ),
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            config,
            seed,
            out,
            overrides,
        } => match load(Some(&config), None, seed, &overrides) {
            Ok(cfg) => run_one(&cfg, &out),
            Err(code) => code,
        },
        Command::Preset {
            name,
            seed,
            out,
            overrides,
        } => match load(None, Some(&name), seed, &overrides) {
            Ok(cfg) => run_one(&cfg, &out),
            Err(code) => code,
        },
        Command::Sweep {
            config,
            seeds,
            out,
            overrides,
        } => {
            let range = match parse_seeds(&seeds) {
                Ok(r) => r,
                Err(e) => return config_error(e),
            };
            let cfg = match load(Some(&config), None, None, &overrides) {
                Ok(c) => c,
                Err(code) => return code,
            };
            let mut code = ExitCode::SUCCESS;
            for (seed, res) in run_sweep(&cfg, range, &out) {
                match res {
                    Ok(dir) => println!("seed {seed}: {}", dir.display()),
                    Err(e) => {
                        eprintln!("pipeline error (seed {seed}): {e}");
                        code = ExitCode::from(EXIT_PIPELINE);
                    }
                }
            }
            code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_ranges() {
        assert_eq!(parse_seeds("1..10").unwrap(), 1..=10);
        assert_eq!(parse_seeds("5..5").unwrap(), 5..=5);
        assert!(parse_seeds("3..1").is_err());
        assert!(parse_seeds("3").is_err());
        assert!(parse_seeds("a..b").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
