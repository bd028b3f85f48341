//! Error counting, SNR-to-BER mapping, PRBS alignment and the resync
//! trigger.

mod align;
mod ber;
mod resync;

pub use align::{prbs_align, Alignment, MIN_AGREEMENT};
pub use ber::{counted_ber, snr_to_ber, BerPoint, BerSource, ErrorTrack};
pub use resync::{resync_controller, ResyncTrigger};
