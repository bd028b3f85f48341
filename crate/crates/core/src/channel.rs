//! Deterministic fading, frequency offset, Wiener phase noise and AWGN.
//!
//! The stages always run in the order fading, CFO, phase noise, AWGN. The
//! noise power is constant in time: only the signal is attenuated by the
//! fading profile, so the instantaneous SNR follows the profile exactly.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{db_to_linear, IqStream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FadingShape {
    Triangular,
    Constant,
}

/// Periodic SNR profile, linear in dB between floor and ceiling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FadingProfile {
    pub shape: FadingShape,
    /// Seconds.
    pub period: f64,
    pub snr_ceiling_db: f64,
    pub snr_floor_db: f64,
    /// Fraction of a period in `[0, 1)`.
    #[serde(default)]
    pub phase_offset: f64,
}

impl FadingProfile {
    pub fn triangular(period: f64, snr_ceiling_db: f64, snr_floor_db: f64) -> Self {
        Self {
            shape: FadingShape::Triangular,
            period,
            snr_ceiling_db,
            snr_floor_db,
            phase_offset: 0.0,
        }
    }

    pub fn constant(snr_db: f64) -> Self {
        Self {
            shape: FadingShape::Constant,
            period: 1.0,
            snr_ceiling_db: snr_db,
            snr_floor_db: snr_db,
            phase_offset: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.period.is_finite() && self.period > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "fading period must be > 0, got {}",
                self.period
            )));
        }
        if !self.snr_ceiling_db.is_finite() {
            return Err(Error::InvalidParameter("snr ceiling must be finite".into()));
        }
        // A constant profile only uses the ceiling.
        if self.shape == FadingShape::Triangular && !(self.snr_ceiling_db > self.snr_floor_db) {
            return Err(Error::InvalidParameter(format!(
                "snr ceiling ({} dB) must exceed floor ({} dB)",
                self.snr_ceiling_db, self.snr_floor_db
            )));
        }
        if !(0.0..1.0).contains(&self.phase_offset) {
            return Err(Error::InvalidParameter(format!(
                "phase offset must be in [0, 1), got {}",
                self.phase_offset
            )));
        }
        Ok(())
    }

    /// SNR in dB at time `t`. The triangular wave sits at the floor at
    /// `t = 0` (zero phase offset) and reaches the ceiling half a period
    /// later.
    pub fn snr_at(&self, t: f64) -> f64 {
        match self.shape {
            FadingShape::Constant => self.snr_ceiling_db,
            FadingShape::Triangular => {
                let u = (t / self.period + self.phase_offset).rem_euclid(1.0);
                let tri = if u < 0.5 { 2.0 * u } else { 2.0 * (1.0 - u) };
                self.snr_floor_db + (self.snr_ceiling_db - self.snr_floor_db) * tri
            }
        }
    }

    /// Amplitude gain relative to the ceiling.
    pub fn gain_at(&self, t: f64) -> f64 {
        db_to_linear(self.snr_at(t) - self.snr_ceiling_db).sqrt()
    }
}

/// Noise and carrier impairments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImpairmentConfig {
    /// Carrier frequency offset, Hz.
    #[serde(default)]
    pub cfo: f64,
    /// Combined laser linewidth, Hz.
    #[serde(default)]
    pub linewidth: f64,
    /// Per-symbol complex noise variance. Zero disables the AWGN stage.
    pub noise_power: f64,
}

impl ImpairmentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.linewidth >= 0.0 && self.linewidth.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "linewidth must be >= 0, got {}",
                self.linewidth
            )));
        }
        if !(self.noise_power >= 0.0 && self.noise_power.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "noise power must be >= 0, got {}",
                self.noise_power
            )));
        }
        if !self.cfo.is_finite() {
            return Err(Error::InvalidParameter("cfo must be finite".into()));
        }
        Ok(())
    }
}

pub fn apply_fading(signal: &IqStream, profile: &FadingProfile) -> Result<IqStream> {
    if profile.shape == FadingShape::Constant {
        return Ok(signal.clone());
    }
    let fs = signal.sample_rate();
    let out = signal
        .samples()
        .iter()
        .enumerate()
        .map(|(n, &s)| s * profile.gain_at(n as f64 / fs))
        .collect();
    signal.with_samples(out)
}

/// Adds circular complex Gaussian noise of total variance `noise_power`
/// per sample.
pub fn add_awgn(signal: &IqStream, noise_power: f64, rng_seed: u64) -> Result<IqStream> {
    if !(noise_power > 0.0 && noise_power.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "noise power must be > 0, got {noise_power}"
        )));
    }
    let sigma = (noise_power / 2.0).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let out = signal
        .samples()
        .iter()
        .map(|&s| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            s + Complex64::new(re, im) * sigma
        })
        .collect();
    signal.with_samples(out)
}

pub fn apply_cfo(signal: &IqStream, cfo: f64) -> Result<IqStream> {
    let fs = signal.sample_rate();
    if !(cfo.abs() < fs / 2.0) {
        return Err(Error::BeyondNyquist {
            cfo,
            sample_rate: fs,
        });
    }
    if cfo == 0.0 {
        return Ok(signal.clone());
    }
    signal.with_samples(rotate_by_frequency(signal.samples(), cfo / fs))
}

/// Multiplies sample `n` by `exp(j 2 pi f n)`, `f` in cycles per sample.
pub(crate) fn rotate_by_frequency(samples: &[Complex64], f: f64) -> Vec<Complex64> {
    samples
        .iter()
        .enumerate()
        .map(|(n, &s)| {
            // Reduce the cycle count first so the phase stays accurate on
            // long streams.
            let cycles = (f * n as f64).rem_euclid(1.0);
            s * Complex64::from_polar(1.0, 2.0 * PI * cycles)
        })
        .collect()
}

/// Wiener phase noise with per-sample increment variance
/// `2 pi linewidth / sample_rate`.
pub fn apply_phase_noise(signal: &IqStream, linewidth: f64, rng_seed: u64) -> Result<IqStream> {
    if !(linewidth >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "linewidth must be >= 0, got {linewidth}"
        )));
    }
    if linewidth == 0.0 {
        return Ok(signal.clone());
    }
    let sigma = (2.0 * PI * linewidth / signal.sample_rate()).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut phase = 0.0f64;
    let out = signal
        .samples()
        .iter()
        .map(|&s| {
            let y = s * Complex64::from_polar(1.0, phase);
            let step: f64 = rng.sample(StandardNormal);
            phase += sigma * step;
            y
        })
        .collect();
    signal.with_samples(out)
}

/// Full channel in its fixed stage order. `seed` drives both random stages
/// through independent generators.
pub fn apply_channel(
    signal: &IqStream,
    profile: &FadingProfile,
    impairments: &ImpairmentConfig,
    seed: u64,
) -> Result<IqStream> {
    profile.validate()?;
    impairments.validate()?;
    let faded = apply_fading(signal, profile)?;
    let shifted = apply_cfo(&faded, impairments.cfo)?;
    let rotated = apply_phase_noise(&shifted, impairments.linewidth, stage_seed(seed, 1))?;
    if impairments.noise_power > 0.0 {
        add_awgn(&rotated, impairments.noise_power, stage_seed(seed, 2))
    } else {
        Ok(rotated)
    }
}

/// Derives a per-stage seed so the random stages never share a stream.
pub(crate) fn stage_seed(seed: u64, stage: u64) -> u64 {
    // SplitMix64 finalizer.
    let mut z = seed
        .wrapping_add(stage.wrapping_mul(0x9e37_79b9_7f4a_7c15))
        .wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
