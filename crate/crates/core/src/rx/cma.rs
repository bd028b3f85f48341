//! Fractionally spaced constant-modulus equalizer.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{IqStream, SymbolBlock};

const DIVERGENCE_LIMIT: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CmaConfig {
    /// Odd tap count, spaced at half a symbol.
    pub num_taps: usize,
    /// Zero freezes the taps at their center-spike initialization.
    pub step_size: f64,
    pub modulus_target: f64,
    pub iterations_per_sample: usize,
    /// Input samples consumed by the training pass before any output.
    pub preamble_samples: usize,
}

impl Default for CmaConfig {
    fn default() -> Self {
        Self {
            num_taps: 11,
            step_size: 1e-3,
            modulus_target: 1.0,
            iterations_per_sample: 1,
            preamble_samples: 50_000,
        }
    }
}

impl CmaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_taps == 0 || self.num_taps % 2 == 0 {
            return Err(Error::InvalidParameter(format!(
                "CMA tap count must be odd, got {}",
                self.num_taps
            )));
        }
        if !(0.0..=0.1).contains(&self.step_size) {
            return Err(Error::InvalidParameter(format!(
                "CMA step size must be in [0, 0.1], got {}",
                self.step_size
            )));
        }
        if !(self.modulus_target > 0.0) || self.iterations_per_sample == 0 {
            return Err(Error::InvalidParameter(
                "CMA modulus target must be > 0 and iterations >= 1".into(),
            ));
        }
        Ok(())
    }
}

struct Equalizer<'a> {
    cfg: &'a CmaConfig,
    taps: Vec<Complex64>,
    window: Vec<Complex64>,
}

impl<'a> Equalizer<'a> {
    fn new(cfg: &'a CmaConfig) -> Self {
        let mut taps = vec![Complex64::new(0.0, 0.0); cfg.num_taps];
        taps[cfg.num_taps / 2] = Complex64::new(1.0, 0.0);
        Self {
            cfg,
            taps,
            window: vec![Complex64::new(0.0, 0.0); cfg.num_taps],
        }
    }

    /// Loads the regressor centred on input sample `center`.
    fn load(&mut self, input: &[Complex64], center: usize) {
        let half = self.cfg.num_taps / 2;
        for (i, w) in self.window.iter_mut().enumerate() {
            *w = (center + i)
                .checked_sub(half)
                .and_then(|j| input.get(j))
                .copied()
                .unwrap_or_default();
        }
    }

    fn output(&self) -> Complex64 {
        self.taps.iter().zip(&self.window).map(|(w, x)| w * x).sum()
    }

    /// Filters the loaded regressor and adapts. Returns the pre-update output.
    fn step(&mut self, sample: usize) -> Result<Complex64> {
        let first = self.output();
        if self.cfg.step_size == 0.0 {
            return Ok(first);
        }
        let mut y = first;
        for it in 0..self.cfg.iterations_per_sample {
            if it > 0 {
                y = self.output();
            }
            let err = y * (y.norm_sqr() - self.cfg.modulus_target);
            let g = err * self.cfg.step_size;
            for (w, x) in self.taps.iter_mut().zip(&self.window) {
                *w -= g * x.conj();
            }
        }
        if self.taps.iter().any(|w| !(w.norm() <= DIVERGENCE_LIMIT)) {
            return Err(Error::CmaDiverged { sample });
        }
        Ok(first)
    }
}

/// Equalizes a 2 samples/symbol stream whose symbol instants fall on even
/// sample indices, returning one output per symbol.
///
/// The equalizer first trains over `preamble_samples` input samples, then
/// restarts from the beginning with the trained taps and keeps adapting
/// while it emits.
pub fn cma_equalize(signal: &IqStream, symbol_rate: f64, cfg: &CmaConfig) -> Result<SymbolBlock> {
    cfg.validate()?;
    if (signal.sample_rate() - 2.0 * symbol_rate).abs() > 1e-9 * signal.sample_rate() {
        return Err(Error::InvalidParameter(format!(
            "CMA needs 2 samples/symbol, got sample rate {} for symbol rate {}",
            signal.sample_rate(),
            symbol_rate
        )));
    }
    let input = signal.samples();
    let n_out = input.len() / 2;
    if n_out == 0 {
        return Err(Error::TooShort {
            needed: 2,
            got: input.len(),
        });
    }
    let mut eq = Equalizer::new(cfg);
    let train = (cfg.preamble_samples / 2).min(n_out);
    for k in 0..train {
        eq.load(input, 2 * k);
        eq.step(2 * k)?;
    }
    let mut out = Vec::with_capacity(n_out);
    for k in 0..n_out {
        eq.load(input, 2 * k);
        out.push(eq.step(2 * k)?);
    }
    SymbolBlock::new(out, symbol_rate)
}

/// Mean of `| |y|^2 - target |`.
pub fn modulus_error(symbols: &[Complex64], target: f64) -> f64 {
    symbols
        .iter()
        .map(|y| (y.norm_sqr() - target).abs())
        .sum::<f64>()
        / symbols.len().max(1) as f64
}
