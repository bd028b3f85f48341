//! CSV trace and TOML summary writers.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use serde::Serialize;

use crate::estimators::SnrEstimate;

use super::pipeline::RunResult;
use super::summary::LogErrorStats;

pub const CSV_HEADER: &str =
    "time_us,snr_true_db,snr_m2m4_db,snr_evm_db,ber_counted,ber_m2m4,ber_evm,resync";

pub const TRACE_FILE: &str = "trace.csv";
pub const SUMMARY_FILE: &str = "summary.toml";

/// Formats with 9 significant digits, like C's `%.9g` (trailing zeros
/// dropped, exponent form outside `1e-5 ..= 1e9`).
pub fn format_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn db(value: f64) -> String {
    let est = SnrEstimate {
        value,
        method: crate::estimators::Method::M2m4,
        block_index: 0,
        block_len: 1,
        time: 0.0,
    };
    format_sig9(est.db())
}

pub fn trace_csv(result: &RunResult) -> String {
    let mut out = String::with_capacity(80 * (result.blocks.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for b in &result.blocks {
        let counted = b.ber_counted.map(format_sig9).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            format_sig9(b.time * 1e6),
            format_sig9(b.snr_true_db),
            db(b.snr_m2m4),
            db(b.snr_evm),
            counted,
            format_sig9(b.ber_m2m4),
            format_sig9(b.ber_evm),
            u8::from(b.resync),
        )
        .expect("writing to a String cannot fail");
    }
    out
}

#[derive(Serialize)]
struct ResyncRow {
    block_index: usize,
    time_us: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    aligned_block: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    offset: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    agreement: Option<f64>,
}

#[derive(Serialize)]
struct SummaryFile {
    seed: u64,
    blocks: usize,
    resync_count: usize,
    invalid_block_fraction: f64,
    comparison: &'static str,
    coarse_cfo_hz: f64,
    fine_cfo_hz: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    m2m4: Option<LogErrorStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    evm_blind: Option<LogErrorStats>,
    resync: Vec<ResyncRow>,
}

pub fn summary_toml(result: &RunResult) -> String {
    let invalid = result
        .blocks
        .iter()
        .filter(|b| b.ber_counted.is_none())
        .count();
    let file = SummaryFile {
        seed: result.config.seed,
        blocks: result.blocks.len(),
        resync_count: result.resync_events.len(),
        invalid_block_fraction: invalid as f64 / result.blocks.len().max(1) as f64,
        comparison: if result.summary.is_some() {
            "ok"
        } else {
            "none"
        },
        coarse_cfo_hz: result.recovery.coarse_cfo.offset,
        fine_cfo_hz: result.recovery.fine_cfo.offset,
        m2m4: result.summary.map(|s| s.m2m4),
        evm_blind: result.summary.map(|s| s.evm_blind),
        resync: result
            .resync_events
            .iter()
            .map(|e| ResyncRow {
                block_index: e.block_index,
                time_us: e.time * 1e6,
                aligned_block: e.alignment.map(|a| a.block_index),
                offset: e.alignment.map(|a| a.offset),
                agreement: e.alignment.map(|a| a.agreement),
            })
            .collect(),
    };
    toml::to_string(&file).expect("summary is always serializable")
}

/// Writes `trace.csv` and `summary.toml` into `dir`, creating it if needed.
pub fn write_outputs(result: &RunResult, dir: &Path) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(TRACE_FILE), trace_csv(result))?;
    fs::write(dir.join(SUMMARY_FILE), summary_toml(result))?;
    Ok(())
}
