//! Receiver DSP: matched filter, frequency recovery, CMA, BPS and
//! differential decisions.

mod bps;
mod cma;
mod decision;
mod freq;

pub use bps::{bps_recover, BpsConfig, BpsOutput};
pub use cma::{cma_equalize, modulus_error, CmaConfig};
pub use decision::{diff_decode, hard_decision};
pub use freq::{
    coarse_cfo_estimate, correct_symbols, fine_cfo_estimate, CfoEstimate, COARSE_MIN_SAMPLES,
    FINE_MIN_SYMBOLS,
};

use crate::error::Result;
use crate::signal::IqStream;
use crate::tx::{convolve, RrcFilter};

/// Convolves with the (symmetric) RRC taps. The output keeps the full
/// convolution, so the overall Tx+Rx delay is `2 * filter.group_delay()`.
pub fn matched_filter(signal: &IqStream, filter: &RrcFilter) -> Result<IqStream> {
    signal.with_samples(convolve(signal.samples(), filter.taps()))
}
