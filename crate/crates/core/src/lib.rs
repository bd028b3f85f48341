//! Coherent QPSK link simulation with block-wise blind SNR estimation.
//!
//! The crate models a single-polarization QPSK transmitter, a channel with
//! a deterministic time-varying SNR profile (deep periodic fades under
//! constant noise), a receiver DSP chain (matched filter, fourth-power
//! frequency recovery, CMA equalization, blind phase search, differential
//! decoding) and the analysis that compares moment-based (M2M4) and
//! EVM-based SNR estimates against error-counting BER.
//!
//! The [`runner`] module ties the stages together and produces the
//! per-block traces written by the `fsosnr` command line tool.

pub mod channel;
pub mod error;
pub mod estimators;
pub mod metrics;
pub mod runner;
pub mod rx;
pub mod signal;
pub mod tx;

pub use error::{Error, Result};
pub use signal::{average_power, db_to_linear, linear_to_db, IqSample, IqStream, SymbolBlock};
