//! Transmitter: PRBS bits, Gray QPSK mapping, differential coding and RRC
//! pulse shaping.

mod prbs;
mod qpsk;
mod rrc;

pub use prbs::{prbs15_period, Prbs15, PRBS15_PERIOD};
pub use qpsk::{diff_encode, point, qpsk_map, quadrant};
pub use rrc::{pulse_shape, RrcFilter, ShapedSignal};

pub(crate) use qpsk::quadrant_to_bits;
pub(crate) use rrc::convolve;
