//! Fourth-power carrier frequency offset estimation.
//!
//! Raising QPSK to the fourth power strips the modulation and leaves a tone
//! at four times the offset; the tone is located with an FFT.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::channel::rotate_by_frequency;
use crate::error::{Error, Result};
use crate::signal::{IqStream, SymbolBlock};

pub const COARSE_MIN_SAMPLES: usize = 1 << 14;
pub const FINE_MIN_SYMBOLS: usize = 1 << 12;
const MAX_FFT_LEN: usize = 1 << 22;
const MIN_PEAK_TO_MEAN: f64 = 4.0;

/// Offset estimate together with its quantization step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CfoEstimate {
    /// Hz.
    pub offset: f64,
    /// Width of one offset bin, `rate / (4 * fft_len)`, Hz.
    pub resolution: f64,
    pub peak_to_mean: f64,
}

fn plan(len: usize) -> Arc<dyn Fft<f64>> {
    FftPlanner::new().plan_fft_forward(len)
}

fn fourth_power_estimate(samples: &[Complex64], rate: f64, min_len: usize) -> Result<CfoEstimate> {
    if samples.len() < min_len {
        return Err(Error::TooShort {
            needed: min_len,
            got: samples.len(),
        });
    }
    // Largest power of two that fits, so the bin width is a clean divisor.
    let n = (1usize << (usize::BITS - 1 - samples.len().leading_zeros())).min(MAX_FFT_LEN);
    let mut buf: Vec<Complex64> = samples[..n]
        .iter()
        .map(|s| {
            let s2 = s * s;
            s2 * s2
        })
        .collect();
    plan(n).process(&mut buf);
    let power: Vec<f64> = buf.iter().map(|z| z.norm_sqr()).collect();
    let (peak_bin, peak) =
        power.iter().enumerate().fold(
            (0, f64::MIN),
            |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) },
        );
    let mean = power.iter().sum::<f64>() / n as f64;
    let peak_to_mean = if mean > 0.0 { peak / mean } else { 0.0 };
    if !(peak_to_mean >= MIN_PEAK_TO_MEAN) {
        return Err(Error::UnreliableEstimate { peak_to_mean });
    }
    let signed_bin = if peak_bin < n / 2 {
        peak_bin as f64
    } else {
        peak_bin as f64 - n as f64
    };
    Ok(CfoEstimate {
        offset: signed_bin * rate / n as f64 / 4.0,
        resolution: rate / (4.0 * n as f64),
        peak_to_mean,
    })
}

/// Estimates the offset on the oversampled waveform.
pub fn coarse_cfo_estimate(signal: &IqStream) -> Result<CfoEstimate> {
    fourth_power_estimate(signal.samples(), signal.sample_rate(), COARSE_MIN_SAMPLES)
}

/// Estimates the residual offset on equalized symbols.
pub fn fine_cfo_estimate(symbols: &SymbolBlock) -> Result<CfoEstimate> {
    fourth_power_estimate(symbols.symbols(), symbols.symbol_rate(), FINE_MIN_SYMBOLS)
}

/// Removes a frequency offset from symbols.
pub fn correct_symbols(symbols: &SymbolBlock, offset: f64) -> Result<SymbolBlock> {
    symbols.with_symbols(rotate_by_frequency(
        symbols.symbols(),
        -offset / symbols.symbol_rate(),
    ))
}
