use serde::Serialize;

use crate::error::{Error, Result};

use super::pipeline::BlockRecord;

/// BER range over which estimated and counted values are compared.
pub const COMPARISON_RANGE: (f64, f64) = (1e-6, 0.5);

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogErrorStats {
    pub mean_abs_log10_error: f64,
    pub max_abs_log10_error: f64,
    pub compared_blocks: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub blocks: usize,
    pub resync_count: usize,
    /// Blocks without a counted BER (sync lost or window incomplete).
    pub invalid_block_fraction: f64,
    pub m2m4: LogErrorStats,
    pub evm_blind: LogErrorStats,
}

fn in_range(x: f64) -> bool {
    (COMPARISON_RANGE.0..=COMPARISON_RANGE.1).contains(&x)
}

/// `|log10(estimated) - log10(counted)|` statistics over pairs where both
/// values lie in [`COMPARISON_RANGE`].
pub fn log_error_stats(pairs: impl IntoIterator<Item = (f64, f64)>) -> Result<LogErrorStats> {
    let (mut sum, mut max, mut n) = (0.0f64, 0.0f64, 0usize);
    for (est, counted) in pairs {
        if in_range(est) && in_range(counted) {
            let e = (est.log10() - counted.log10()).abs();
            sum += e;
            max = max.max(e);
            n += 1;
        }
    }
    if n == 0 {
        return Err(Error::NoComparisonBlocks);
    }
    Ok(LogErrorStats {
        mean_abs_log10_error: sum / n as f64,
        max_abs_log10_error: max,
        compared_blocks: n,
    })
}

pub fn summarize(blocks: &[BlockRecord], resync_count: usize) -> Result<Summary> {
    if blocks.is_empty() {
        return Err(Error::EmptyInput);
    }
    let invalid = blocks.iter().filter(|b| b.ber_counted.is_none()).count();
    let pairs = |f: fn(&BlockRecord) -> f64| {
        blocks
            .iter()
            .filter_map(move |b| b.ber_counted.map(|c| (f(b), c)))
    };
    Ok(Summary {
        blocks: blocks.len(),
        resync_count,
        invalid_block_fraction: invalid as f64 / blocks.len() as f64,
        m2m4: log_error_stats(pairs(|b| b.ber_m2m4))?,
        evm_blind: log_error_stats(pairs(|b| b.ber_evm))?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn block(k: usize, counted: Option<f64>, m2m4: f64, evm: f64) -> BlockRecord {
        BlockRecord {
            block_index: k,
            time: k as f64,
            snr_true_db: 0.0,
            snr_m2m4: 1.0,
            snr_evm: 1.0,
            ber_counted: counted,
            ber_m2m4: m2m4,
            ber_evm: evm,
            resync: false,
        }
    }

    #[test]
    fn identical_traces_have_zero_error() {
        let b: Vec<_> = (0..10)
            .map(|k| {
                block(
                    k,
                    Some(1e-3 * (k + 1) as f64),
                    1e-3 * (k + 1) as f64,
                    1e-3 * (k + 1) as f64,
                )
            })
            .collect();
        let s = summarize(&b, 0).unwrap();
        assert_eq!(s.m2m4.mean_abs_log10_error, 0.0);
        assert_eq!(s.evm_blind.max_abs_log10_error, 0.0);
        assert_eq!(s.m2m4.compared_blocks, 10);
    }

    #[test]
    fn tenfold_offset_is_one_decade() {
        let b: Vec<_> = (0..10).map(|k| block(k, Some(1e-4), 1e-3, 1e-5)).collect();
        let s = summarize(&b, 2).unwrap();
        assert!((s.m2m4.mean_abs_log10_error - 1.0).abs() < 1e-12);
        assert!((s.evm_blind.mean_abs_log10_error - 1.0).abs() < 1e-12);
        assert_eq!(s.resync_count, 2);
    }

    #[test]
    fn out_of_range_and_invalid_blocks_are_skipped() {
        let b = vec![
            block(0, None, 1e-3, 1e-3),
            block(1, Some(0.0), 1e-3, 1e-3),
            block(2, Some(0.6), 0.7, 0.7),
            block(3, Some(1e-2), 1e-2, 1e-1),
        ];
        let s = summarize(&b, 0).unwrap();
        assert_eq!(s.m2m4.compared_blocks, 1);
        assert!((s.invalid_block_fraction - 0.25).abs() < 1e-15);
        assert!((s.evm_blind.mean_abs_log10_error - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nothing_to_compare() {
        let b = vec![block(0, Some(0.0), 0.0, 0.0), block(1, None, 0.1, 0.1)];
        assert_eq!(summarize(&b, 0), Err(Error::NoComparisonBlocks));
        assert_eq!(summarize(&[], 0), Err(Error::EmptyInput));
    }
}
