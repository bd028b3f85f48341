//! Complex baseband containers, power measurement and dB conversions.
//!
//! Amplitudes are dimensionless and the QPSK constellation is normalized to
//! unit average power, so a per-symbol SNR is simply the reciprocal of the
//! per-symbol noise variance.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// One complex baseband sample or symbol.
pub type IqSample = Complex64;

fn check_finite(samples: &[IqSample]) -> Result<()> {
    match samples
        .iter()
        .position(|s| !(s.re.is_finite() && s.im.is_finite()))
    {
        Some(i) => Err(Error::NonFinite(i)),
        None => Ok(()),
    }
}

fn check_rate(rate: f64, what: &str) -> Result<()> {
    if rate.is_finite() && rate > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{what} must be > 0, got {rate}"
        )))
    }
}

/// Uniformly sampled complex waveform.
#[derive(Debug, Clone, PartialEq)]
pub struct IqStream {
    samples: Vec<IqSample>,
    sample_rate: f64,
}

impl IqStream {
    pub fn new(samples: Vec<IqSample>, sample_rate: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyInput);
        }
        check_rate(sample_rate, "sample rate")?;
        check_finite(&samples)?;
        Ok(Self {
            samples,
            sample_rate,
        })
    }

    pub fn samples(&self) -> &[IqSample] {
        &self.samples
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn into_samples(self) -> Vec<IqSample> {
        self.samples
    }

    /// Builds a stream with the same sample rate from stage output.
    pub(crate) fn with_samples(&self, samples: Vec<IqSample>) -> Result<Self> {
        Self::new(samples, self.sample_rate)
    }
}

/// One-sample-per-symbol sequence, the unit the estimators and decisions
/// operate on.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolBlock {
    symbols: Vec<IqSample>,
    symbol_rate: f64,
}

impl SymbolBlock {
    pub fn new(symbols: Vec<IqSample>, symbol_rate: f64) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::EmptyInput);
        }
        check_rate(symbol_rate, "symbol rate")?;
        check_finite(&symbols)?;
        Ok(Self {
            symbols,
            symbol_rate,
        })
    }

    pub fn symbols(&self) -> &[IqSample] {
        &self.symbols
    }

    pub fn symbol_rate(&self) -> f64 {
        self.symbol_rate
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn into_symbols(self) -> Vec<IqSample> {
        self.symbols
    }

    pub(crate) fn with_symbols(&self, symbols: Vec<IqSample>) -> Result<Self> {
        Self::new(symbols, self.symbol_rate)
    }
}

/// Mean of `|s|^2` over the slice.
pub fn average_power(symbols: &[IqSample]) -> Result<f64> {
    if symbols.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(symbols.iter().map(|s| s.norm_sqr()).sum::<f64>() / symbols.len() as f64)
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> Result<f64> {
    if x > 0.0 {
        Ok(10.0 * x.log10())
    } else {
        Err(Error::NonPositivePower(x))
    }
}
