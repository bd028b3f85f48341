use thiserror::Error;

/// Errors raised by the signal-processing stages and analysis routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,
    #[error("non-positive power: {0}")]
    NonPositivePower(f64),
    #[error("non-finite sample at index {0}")]
    NonFinite(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("degenerate LFSR seed")]
    DegenerateSeed,
    #[error("dangling bit")]
    DanglingBit,
    #[error("invalid symbol at index {0}")]
    InvalidSymbol(usize),
    #[error("input too short: need {needed}, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("frequency offset {cfo} Hz beyond Nyquist for sample rate {sample_rate} Hz")]
    BeyondNyquist { cfo: f64, sample_rate: f64 },
    #[error("unreliable estimate (peak-to-mean ratio {peak_to_mean:.2})")]
    UnreliableEstimate { peak_to_mean: f64 },
    #[error("CMA diverged at sample {sample}")]
    CmaDiverged { sample: usize },
    #[error("no alignment found (best agreement {agreement:.3})")]
    NoAlignment { agreement: f64 },
    #[error("no valid comparison blocks")]
    NoComparisonBlocks,
}

pub type Result<T> = std::result::Result<T, Error>;
