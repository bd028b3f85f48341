//! Block-wise blind SNR estimation.
//!
//! Two estimators are provided:
//!
//! * **M2M4**, from the second and fourth moments of the received symbols.
//!   For a constant-modulus signal of power `S` in circular Gaussian noise
//!   of power `N`, `M2 = S + N` and `M4 = S^2 + 4 S N + 2 N^2`, which gives
//!   `S = sqrt(2 M2^2 - M4)` and `N = M2 - S`. Only magnitudes enter, so
//!   the estimate does not depend on carrier phase.
//! * **EVM**, `P0 / mean |r - t|^2` against reference symbols, either known
//!   (data-aided) or taken from hard decisions (blind).
//!
//! All estimates are linear ratios. Degenerate blocks saturate at
//! [`SNR_CAP`] rather than producing infinities.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{IqSample, SymbolBlock};
use crate::tx::{point, quadrant};

/// Saturation value for noise-free blocks (60 dB).
pub const SNR_CAP: f64 = 1e6;

/// Relative denominator below which M2M4 saturates.
const M2M4_EPS: f64 = 1e-9;

/// Reference constellation power.
pub const P0: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentPair {
    pub m2: f64,
    pub m4: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    M2m4,
    EvmBlind,
    EvmAided,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrEstimate {
    /// Linear SNR, `0..=SNR_CAP`.
    pub value: f64,
    pub method: Method,
    pub block_index: usize,
    pub block_len: usize,
    /// Block centre, seconds. Zero for single-block estimates.
    pub time: f64,
}

impl SnrEstimate {
    fn single(value: f64, method: Method, block_len: usize) -> Self {
        Self {
            value,
            method,
            block_index: 0,
            block_len,
            time: 0.0,
        }
    }

    /// dB value with the linear estimate floored at `1 / SNR_CAP`.
    pub fn db(&self) -> f64 {
        10.0 * self.value.max(1.0 / SNR_CAP).log10()
    }
}

pub fn compute_moments(symbols: &[IqSample]) -> Result<MomentPair> {
    if symbols.is_empty() {
        return Err(Error::EmptyInput);
    }
    let (s2, s4) = symbols.iter().fold((0.0, 0.0), |(a, b), s| {
        let p = s.norm_sqr();
        (a + p, b + p * p)
    });
    let n = symbols.len() as f64;
    Ok(MomentPair {
        m2: s2 / n,
        m4: s4 / n,
    })
}

/// QPSK closed form of the moment estimator, as a linear ratio.
pub fn m2m4_ratio(moments: MomentPair) -> f64 {
    let MomentPair { m2, m4 } = moments;
    if !(m2 > 0.0) {
        return 0.0;
    }
    let signal = (2.0 * m2 * m2 - m4).max(0.0).sqrt();
    let noise = m2 - signal;
    if noise <= M2M4_EPS * m2 {
        SNR_CAP
    } else {
        (signal / noise).min(SNR_CAP)
    }
}

pub fn m2m4_snr(symbols: &[IqSample]) -> Result<SnrEstimate> {
    let moments = compute_moments(symbols)?;
    Ok(SnrEstimate::single(
        m2m4_ratio(moments),
        Method::M2m4,
        symbols.len(),
    ))
}

fn evm_ratio(received: &[IqSample], reference: &[IqSample]) -> Result<f64> {
    if received.len() != reference.len() {
        return Err(Error::LengthMismatch {
            left: received.len(),
            right: reference.len(),
        });
    }
    if received.is_empty() {
        return Err(Error::EmptyInput);
    }
    let err = received
        .iter()
        .zip(reference)
        .map(|(r, t)| (r - t).norm_sqr())
        .sum::<f64>()
        / received.len() as f64;
    Ok(if err * SNR_CAP <= P0 {
        SNR_CAP
    } else {
        P0 / err
    })
}

/// Data-aided EVM estimate against known transmitted symbols.
pub fn evm_snr(received: &[IqSample], reference: &[IqSample]) -> Result<SnrEstimate> {
    Ok(SnrEstimate::single(
        evm_ratio(received, reference)?,
        Method::EvmAided,
        received.len(),
    ))
}

/// EVM estimate against the receiver's own hard decisions.
pub fn evm_snr_blind(received: &[IqSample]) -> Result<SnrEstimate> {
    if received.is_empty() {
        return Err(Error::EmptyInput);
    }
    let decided: Vec<IqSample> = received.iter().map(|&s| point(quadrant(s))).collect();
    Ok(SnrEstimate::single(
        evm_ratio(received, &decided)?,
        Method::EvmBlind,
        received.len(),
    ))
}

/// Scales a block to unit average power. All-zero blocks are returned
/// unchanged.
pub fn normalize_power(symbols: &[IqSample]) -> Vec<IqSample> {
    let p = symbols.iter().map(|s| s.norm_sqr()).sum::<f64>() / symbols.len().max(1) as f64;
    if p > 0.0 {
        let g = (P0 / p).sqrt();
        symbols.iter().map(|s| s * g).collect()
    } else {
        symbols.to_vec()
    }
}

pub const MIN_BLOCK_LEN: usize = 100;

/// Splits the stream into consecutive non-overlapping blocks (dropping a
/// trailing partial block) and estimates each one with every requested
/// method. Estimates are ordered by block, then by method as listed.
///
/// EVM estimates are taken on the power-normalized block. `EvmAided`
/// requires `reference`, aligned symbol for symbol with `symbols`.
pub fn blockwise_estimate(
    symbols: &SymbolBlock,
    block_len: usize,
    methods: &[Method],
    reference: Option<&[IqSample]>,
) -> Result<Vec<SnrEstimate>> {
    if block_len < MIN_BLOCK_LEN {
        return Err(Error::InvalidParameter(format!(
            "block length must be >= {MIN_BLOCK_LEN}, got {block_len}"
        )));
    }
    if methods.contains(&Method::EvmAided) {
        match reference {
            None => {
                return Err(Error::InvalidParameter(
                    "data-aided EVM requires reference symbols".into(),
                ))
            }
            Some(r) if r.len() < symbols.len() => {
                return Err(Error::LengthMismatch {
                    left: symbols.len(),
                    right: r.len(),
                })
            }
            _ => {}
        }
    }
    let rate = symbols.symbol_rate();
    let mut out = Vec::with_capacity(symbols.len() / block_len * methods.len());
    for (k, block) in symbols.symbols().chunks_exact(block_len).enumerate() {
        let time = (k as f64 + 0.5) * block_len as f64 / rate;
        let normalized = if methods.iter().any(|m| *m != Method::M2m4) {
            normalize_power(block)
        } else {
            Vec::new()
        };
        for &method in methods {
            let value = match method {
                Method::M2m4 => m2m4_ratio(compute_moments(block)?),
                Method::EvmBlind => evm_snr_blind(&normalized)?.value,
                Method::EvmAided => {
                    let r = reference.expect("checked above");
                    evm_ratio(&normalized, &r[k * block_len..(k + 1) * block_len])?
                }
            };
            out.push(SnrEstimate {
                value,
                method,
                block_index: k,
                block_len,
                time,
            });
        }
    }
    Ok(out)
}
