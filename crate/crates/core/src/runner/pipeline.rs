//! End-to-end scenario execution.

use std::fmt;

use crate::channel::apply_channel;
use crate::error::Error;
use crate::estimators::{blockwise_estimate, Method, SnrEstimate, SNR_CAP};
use crate::metrics::{
    prbs_align, resync_controller, snr_to_ber, BerPoint, BerSource, ErrorTrack, ResyncTrigger,
};
use crate::rx::{
    bps_recover, cma_equalize, coarse_cfo_estimate, correct_symbols, diff_decode,
    fine_cfo_estimate, matched_filter, CfoEstimate,
};
use crate::signal::{linear_to_db, IqStream, SymbolBlock};
use crate::tx::{diff_encode, point, prbs15_period, pulse_shape, qpsk_map, Prbs15, PRBS15_PERIOD};

use super::config::ScenarioConfig;
use super::summary::{summarize, Summary};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Transmitter,
    Channel,
    MatchedFilter,
    CoarseFrequency,
    Equalizer,
    FineFrequency,
    PhaseRecovery,
    Decoder,
    Estimation,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Stage::Config => "config",
            Stage::Transmitter => "transmitter",
            Stage::Channel => "channel",
            Stage::MatchedFilter => "matched filter",
            Stage::CoarseFrequency => "coarse frequency recovery",
            Stage::Equalizer => "CMA equalizer",
            Stage::FineFrequency => "fine frequency recovery",
            Stage::PhaseRecovery => "phase recovery",
            Stage::Decoder => "decoder",
            Stage::Estimation => "SNR estimation",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{stage}: {source}")]
pub struct PipelineError {
    pub stage: Stage,
    #[source]
    pub source: Error,
}

trait AtStage<T> {
    fn at(self, stage: Stage) -> Result<T, PipelineError>;
}

impl<T> AtStage<T> for crate::error::Result<T> {
    fn at(self, stage: Stage) -> Result<T, PipelineError> {
        self.map_err(|source| PipelineError { stage, source })
    }
}

/// One PRBS alignment, located in block and bit coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlignmentRecord {
    /// Block whose first bit opened the correlation window.
    pub block_index: usize,
    /// `rx_bits[i]` is compared with `prbs[(i + offset) % period]`.
    pub offset: usize,
    pub agreement: f64,
}

/// A resync trigger and the alignment it eventually produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResyncEvent {
    /// Seconds.
    pub time: f64,
    pub block_index: usize,
    /// `None` if no alignment succeeded before the next trigger or the end
    /// of the run.
    pub alignment: Option<AlignmentRecord>,
}

/// Everything reported for one estimation block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockRecord {
    pub block_index: usize,
    /// Block centre, seconds.
    pub time: f64,
    pub snr_true_db: f64,
    pub snr_m2m4: f64,
    pub snr_evm: f64,
    /// `None` while synchronization is lost or the window is incomplete.
    pub ber_counted: Option<f64>,
    pub ber_m2m4: f64,
    pub ber_evm: f64,
    pub resync: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryReport {
    pub coarse_cfo: CfoEstimate,
    pub fine_cfo: CfoEstimate,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub config: ScenarioConfig,
    pub estimate_trace: Vec<SnrEstimate>,
    pub ber_points: Vec<BerPoint>,
    pub resync_events: Vec<ResyncEvent>,
    pub initial_alignment: Option<AlignmentRecord>,
    pub blocks: Vec<BlockRecord>,
    pub recovery: RecoveryReport,
    /// Bit errors over all synchronized bits.
    pub bit_errors: usize,
    pub bits_compared: usize,
    /// `None` when no block had comparable BER values (e.g. error-free runs).
    pub summary: Option<Summary>,
}

/// Symbols after the receiver chain, before analysis.
struct Received {
    symbols: SymbolBlock,
    bits: Vec<bool>,
    recovery: RecoveryReport,
}

fn transmit(cfg: &ScenarioConfig) -> crate::error::Result<IqStream> {
    let data_symbols = cfg.n_symbols - 1;
    let bits = Prbs15::default().generate(2 * data_symbols);
    let mapped = qpsk_map(&bits, cfg.symbol_rate)?;
    let seed_symbol = point(0);
    let encoded = diff_encode(&mapped, seed_symbol)?;
    let mut symbols = Vec::with_capacity(cfg.n_symbols);
    symbols.push(seed_symbol);
    symbols.extend_from_slice(encoded.symbols());
    let shaped = pulse_shape(&SymbolBlock::new(symbols, cfg.symbol_rate)?, &cfg.rrc()?)?;
    Ok(shaped.stream)
}

fn receive(cfg: &ScenarioConfig, rx: &IqStream) -> Result<Received, PipelineError> {
    let filter = cfg.rrc().at(Stage::Config)?;
    let mf = matched_filter(rx, &filter).at(Stage::MatchedFilter)?;

    // Decimate to 2 samples/symbol and drop the Tx+Rx filter delay so that
    // symbol k sits on sample 2k.
    let decim = cfg.pulse.sps / 2;
    let delay = 2 * filter.group_delay();
    let two_sps: Vec<_> = mf.samples()[delay..]
        .iter()
        .step_by(decim)
        .take(2 * cfg.n_symbols)
        .copied()
        .collect();
    let stream = IqStream::new(two_sps, 2.0 * cfg.symbol_rate).at(Stage::MatchedFilter)?;

    let coarse = coarse_cfo_estimate(&stream).at(Stage::CoarseFrequency)?;
    let stream = crate::channel::apply_cfo(&stream, -coarse.offset).at(Stage::CoarseFrequency)?;

    let equalized = cma_equalize(&stream, cfg.symbol_rate, &cfg.cma).at(Stage::Equalizer)?;

    let fine = fine_cfo_estimate(&equalized).at(Stage::FineFrequency)?;
    let corrected = correct_symbols(&equalized, fine.offset).at(Stage::FineFrequency)?;

    let recovered = bps_recover(&corrected, &cfg.bps).at(Stage::PhaseRecovery)?;
    let bits = diff_decode(recovered.symbols.symbols()).at(Stage::Decoder)?;
    Ok(Received {
        symbols: recovered.symbols,
        bits,
        recovery: RecoveryReport {
            coarse_cfo: coarse,
            fine_cfo: fine,
        },
    })
}

/// Alignment bookkeeping over the block sequence.
///
/// The receiver acquires at block 0 and retries on every block until a
/// correlation succeeds. Each resync trigger restarts acquisition at its
/// block; a failed attempt voids the previous alignment from that block on.
struct SyncTracker {
    /// `(first bit, offset)` segments in bit order; `None` is unsynchronized.
    segments: Vec<(usize, Option<usize>)>,
}

impl SyncTracker {
    fn run(
        bits: &[bool],
        reference: &[bool],
        n_blocks: usize,
        bits_per_block: usize,
        triggers: &[ResyncTrigger],
    ) -> (Self, Option<AlignmentRecord>, Vec<ResyncEvent>) {
        let period = reference.len();
        let mut segments = vec![(0usize, None)];
        let mut events: Vec<ResyncEvent> = triggers
            .iter()
            .map(|t| ResyncEvent {
                time: t.time,
                block_index: t.block_index,
                alignment: None,
            })
            .collect();
        let mut initial = None;
        // Index into `events` of the trigger being served; `None` during
        // initial acquisition.
        let mut serving: Option<usize> = None;
        let mut pending = true;
        let mut next_trigger = 0;

        for k in 0..n_blocks {
            let start = k * bits_per_block;
            if next_trigger < triggers.len() && triggers[next_trigger].block_index == k {
                serving = Some(next_trigger);
                next_trigger += 1;
                pending = true;
            }
            if !pending || start >= bits.len() {
                continue;
            }
            match prbs_align(&bits[start..], reference) {
                Ok(a) => {
                    let offset = (a.offset + period - start % period) % period;
                    segments.push((start, Some(offset)));
                    let rec = AlignmentRecord {
                        block_index: k,
                        offset,
                        agreement: a.agreement,
                    };
                    match serving {
                        Some(i) => events[i].alignment = Some(rec),
                        None => initial = Some(rec),
                    }
                    pending = false;
                }
                Err(_) => {
                    if segments.last().map(|s| s.1.is_some()).unwrap_or(false) {
                        segments.push((start, None));
                    }
                }
            }
        }
        (Self { segments }, initial, events)
    }

    fn error_track(&self, bits: &[bool], reference: &[bool]) -> ErrorTrack {
        let period = reference.len();
        let mut seg = 0;
        ErrorTrack::new(bits.iter().enumerate().map(|(i, &b)| {
            while seg + 1 < self.segments.len() && self.segments[seg + 1].0 <= i {
                seg += 1;
            }
            self.segments[seg]
                .1
                .map(|off| b != reference[(i + off) % period])
        }))
    }
}

/// Runs transmitter, channel, receiver and analysis for one scenario.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunResult, PipelineError> {
    cfg.validate().at(Stage::Config)?;
    let tx = transmit(cfg).at(Stage::Transmitter)?;
    let channel_out =
        apply_channel(&tx, &cfg.fading, &cfg.impairment_config(), cfg.seed).at(Stage::Channel)?;
    let rx = receive(cfg, &channel_out)?;

    let estimates = blockwise_estimate(
        &rx.symbols,
        cfg.block_len,
        &[Method::M2m4, Method::EvmBlind],
        None,
    )
    .at(Stage::Estimation)?;
    let m2m4: Vec<SnrEstimate> = estimates
        .iter()
        .filter(|e| e.method == Method::M2m4)
        .copied()
        .collect();
    let evm: Vec<SnrEstimate> = estimates
        .iter()
        .filter(|e| e.method == Method::EvmBlind)
        .copied()
        .collect();
    let n_blocks = m2m4.len();

    let triggers = resync_controller(&m2m4, cfg.resync_threshold_db, cfg.resync_refractory_blocks);
    let reference = prbs15_period();
    debug_assert_eq!(reference.len(), PRBS15_PERIOD);
    let bits_per_block = 2 * cfg.block_len;
    let (tracker, initial_alignment, resync_events) =
        SyncTracker::run(&rx.bits, &reference, n_blocks, bits_per_block, &triggers);
    let track = tracker.error_track(&rx.bits, &reference);
    let (bit_errors, bits_compared) = track.totals();

    // Channel time of a received symbol includes the transmit filter delay.
    let tx_delay = cfg.pulse.span as f64 / 2.0 / cfg.symbol_rate;
    let noise_db = if cfg.noise_power() > 0.0 {
        linear_to_db(cfg.noise_power()).at(Stage::Config)?
    } else {
        f64::NEG_INFINITY
    };
    let cap_db = 10.0 * SNR_CAP.log10();

    let mut blocks = Vec::with_capacity(n_blocks);
    let mut ber_points = Vec::with_capacity(3 * n_blocks);
    let mut next_trigger = triggers.iter().peekable();
    for (k, (m, e)) in m2m4.iter().zip(&evm).enumerate() {
        let gain_db = cfg.fading.snr_at(m.time + tx_delay) - cfg.fading.snr_ceiling_db;
        let snr_true_db = (gain_db - noise_db).min(cap_db);
        let center_bit = (2 * (k * cfg.block_len + cfg.block_len / 2)).min(rx.bits.len());
        let ber_counted = track.ber_at(center_bit, cfg.ber_window);
        let resync = next_trigger.next_if(|t| t.block_index == k).is_some();
        let rec = BlockRecord {
            block_index: k,
            time: m.time,
            snr_true_db,
            snr_m2m4: m.value,
            snr_evm: e.value,
            ber_counted,
            ber_m2m4: snr_to_ber(m.value),
            ber_evm: snr_to_ber(e.value),
            resync,
        };
        if let Some(b) = ber_counted {
            ber_points.push(BerPoint {
                time: rec.time,
                ber: b,
                source: BerSource::Counted,
            });
        }
        ber_points.push(BerPoint {
            time: rec.time,
            ber: rec.ber_m2m4,
            source: BerSource::M2m4,
        });
        ber_points.push(BerPoint {
            time: rec.time,
            ber: rec.ber_evm,
            source: BerSource::Evm,
        });
        blocks.push(rec);
    }

    let summary = summarize(&blocks, resync_events.len()).ok();
    Ok(RunResult {
        config: cfg.clone(),
        estimate_trace: estimates,
        ber_points,
        resync_events,
        initial_alignment,
        blocks,
        recovery: rx.recovery,
        bit_errors,
        bits_compared,
        summary,
    })
}
