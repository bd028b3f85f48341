//! Scenario description and its TOML form.
//!
//! ```toml
//! seed = 1
//! symbol_rate = 4e9          # Hz
//! n_symbols = 2000000
//! block_len = 10000          # symbols per SNR estimate
//! ber_window = 50000         # bits in the counted-BER moving window
//! resync_threshold_db = 0.0
//! resync_refractory_blocks = 1
//!
//! [pulse]
//! rolloff = 0.1
//! span = 32                  # symbols
//! sps = 2                    # samples per symbol on the wire (even)
//!
//! [fading]
//! shape = "triangular"       # or "constant"
//! period = 250e-6            # s
//! snr_ceiling_db = 7.0
//! snr_floor_db = -10.0
//! phase_offset = 0.0         # fraction of a period
//!
//! [impairments]
//! cfo = 1e6                  # Hz
//! linewidth = 40e3           # Hz
//! # noise_power = 0.2        # optional; defaults to the ceiling's 10^(-ceiling/10)
//!
//! [cma]
//! num_taps = 11
//! step_size = 1e-3
//! modulus_target = 1.0
//! iterations_per_sample = 1
//! preamble_samples = 50000
//!
//! [bps]
//! num_test_phases = 32
//! window_half_width = 16
//! ```
//!
//! Only `n_symbols` and `[fading]` are required; everything else falls back
//! to the defaults shown. A constant profile ignores `snr_floor_db`.
//! Unknown keys are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel::{FadingProfile, ImpairmentConfig};
use crate::error::{Error, Result};
use crate::estimators::MIN_BLOCK_LEN;
use crate::rx::{BpsConfig, CmaConfig, COARSE_MIN_SAMPLES, FINE_MIN_SYMBOLS};
use crate::signal::db_to_linear;
use crate::tx::RrcFilter;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PulseConfig {
    pub rolloff: f64,
    pub span: usize,
    pub sps: usize,
}

impl Default for PulseConfig {
    fn default() -> Self {
        Self {
            rolloff: 0.1,
            span: 32,
            sps: 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ImpairmentSettings {
    pub cfo: f64,
    pub linewidth: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise_power: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "defaults::seed")]
    pub seed: u64,
    #[serde(default = "defaults::symbol_rate")]
    pub symbol_rate: f64,
    pub n_symbols: usize,
    #[serde(default = "defaults::block_len")]
    pub block_len: usize,
    #[serde(default = "defaults::ber_window")]
    pub ber_window: usize,
    #[serde(default)]
    pub resync_threshold_db: f64,
    #[serde(default = "defaults::refractory")]
    pub resync_refractory_blocks: usize,
    #[serde(default)]
    pub pulse: PulseConfig,
    pub fading: FadingProfile,
    #[serde(default)]
    pub impairments: ImpairmentSettings,
    #[serde(default)]
    pub cma: CmaConfig,
    #[serde(default)]
    pub bps: BpsConfig,
}

mod defaults {
    pub fn seed() -> u64 {
        1
    }
    pub fn symbol_rate() -> f64 {
        4e9
    }
    pub fn block_len() -> usize {
        10_000
    }
    pub fn ber_window() -> usize {
        50_000
    }
    pub fn refractory() -> usize {
        1
    }
}

/// Named experiment presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// 7 dB SNR ceiling.
    Fig2a,
    /// 10 dB SNR ceiling.
    Fig2b,
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig2a" => Ok(Preset::Fig2a),
            "fig2b" => Ok(Preset::Fig2b),
            other => Err(Error::InvalidParameter(format!("unknown preset {other:?}"))),
        }
    }
}

impl ScenarioConfig {
    /// Two 250 us triangular fading periods at 4 GBd between -10 dB and the
    /// preset ceiling, with 1 MHz CFO and linewidth * T = 1e-5.
    pub fn preset(preset: Preset) -> Self {
        let ceiling = match preset {
            Preset::Fig2a => 7.0,
            Preset::Fig2b => 10.0,
        };
        let symbol_rate = 4e9;
        let period = 250e-6;
        Self {
            seed: 1,
            symbol_rate,
            n_symbols: (2.0 * period * symbol_rate).round() as usize,
            block_len: 10_000,
            ber_window: 50_000,
            resync_threshold_db: 0.0,
            resync_refractory_blocks: 1,
            pulse: PulseConfig::default(),
            fading: FadingProfile::triangular(period, ceiling, -10.0),
            impairments: ImpairmentSettings {
                cfo: 1e6,
                linewidth: 1e-5 * symbol_rate,
                noise_power: None,
            },
            cma: CmaConfig::default(),
            bps: BpsConfig::default(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self =
            toml::from_str(text).map_err(|e| Error::InvalidParameter(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidParameter(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config is always serializable")
    }

    /// Per-symbol noise variance: explicit, or placed so that the SNR at
    /// the profile ceiling equals the ceiling value.
    pub fn noise_power(&self) -> f64 {
        self.impairments
            .noise_power
            .unwrap_or_else(|| 1.0 / db_to_linear(self.fading.snr_ceiling_db))
    }

    pub fn impairment_config(&self) -> ImpairmentConfig {
        ImpairmentConfig {
            cfo: self.impairments.cfo,
            linewidth: self.impairments.linewidth,
            noise_power: self.noise_power(),
        }
    }

    pub fn rrc(&self) -> Result<RrcFilter> {
        RrcFilter::design(self.pulse.rolloff, self.pulse.span, self.pulse.sps)
    }

    pub fn sample_rate(&self) -> f64 {
        self.symbol_rate * self.pulse.sps as f64
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.symbol_rate.is_finite() && self.symbol_rate > 0.0) {
            return bad(format!("symbol_rate must be > 0, got {}", self.symbol_rate));
        }
        if self.block_len < MIN_BLOCK_LEN {
            return bad(format!("block_len must be >= {MIN_BLOCK_LEN}"));
        }
        if self.n_symbols < self.block_len {
            return bad(format!(
                "n_symbols ({}) must be >= block_len ({})",
                self.n_symbols, self.block_len
            ));
        }
        let min_symbols = (COARSE_MIN_SAMPLES / 2).max(FINE_MIN_SYMBOLS);
        if self.n_symbols < min_symbols {
            return bad(format!(
                "n_symbols must be >= {min_symbols} for frequency recovery"
            ));
        }
        if self.ber_window == 0 {
            return bad("ber_window must be >= 1".into());
        }
        if self.pulse.sps < 2 || self.pulse.sps % 2 != 0 {
            return bad(format!(
                "pulse.sps must be even and >= 2, got {}",
                self.pulse.sps
            ));
        }
        if !self.resync_threshold_db.is_finite() {
            return bad("resync_threshold_db must be finite".into());
        }
        self.rrc()?;
        self.fading.validate()?;
        self.impairment_config().validate()?;
        if self.impairments.cfo.abs() >= self.sample_rate() / 2.0 {
            return bad(format!("cfo {} Hz beyond Nyquist", self.impairments.cfo));
        }
        self.cma.validate()?;
        self.bps.validate()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_match_declared_values() {
        let a = ScenarioConfig::preset(Preset::Fig2a);
        assert_eq!(a.n_symbols, 2_000_000);
        assert_eq!(a.fading.snr_ceiling_db, 7.0);
        assert_eq!(a.fading.snr_floor_db, -10.0);
        assert!((a.impairments.linewidth / a.symbol_rate - 1e-5).abs() < 1e-18);
        assert!((a.noise_power() - 10f64.powf(-0.7)).abs() < 1e-15);
        a.validate().unwrap();
        let b = ScenarioConfig::preset(Preset::Fig2b);
        assert_eq!(b.fading.snr_ceiling_db, 10.0);
        assert!("fig2c".parse::<Preset>().is_err());
    }

    #[test]
    fn toml_round_trip() {
        let a = ScenarioConfig::preset(Preset::Fig2b);
        let back = ScenarioConfig::from_toml_str(&a.to_toml_string()).unwrap();
        assert_eq!(a, back);
    }

    #[test]
    fn minimal_config_uses_defaults() {
        let cfg = ScenarioConfig::from_toml_str(
            r#"
            n_symbols = 100000
            [fading]
            shape = "constant"
            period = 1.0
            snr_ceiling_db = 12.0
            snr_floor_db = 0.0
            "#,
        )
        .unwrap();
        assert_eq!(cfg.block_len, 10_000);
        assert_eq!(cfg.cma, CmaConfig::default());
        assert_eq!(cfg.pulse, PulseConfig::default());
        assert_eq!(cfg.impairments.cfo, 0.0);
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = r#"
            n_symbols = 100000
            bogus = 3
            [fading]
            shape = "constant"
            period = 1.0
            snr_ceiling_db = 12.0
            snr_floor_db = 0.0
        "#;
        assert!(ScenarioConfig::from_toml_str(text).is_err());
        let nested = r#"
            n_symbols = 100000
            [fading]
            shape = "constant"
            period = 1.0
            snr_ceiling_db = 12.0
            snr_floor_db = 0.0
            [cma]
            taps = 11
        "#;
        assert!(ScenarioConfig::from_toml_str(nested).is_err());
    }

    #[test]
    fn invalid_values_rejected() {
        let mut c = ScenarioConfig::preset(Preset::Fig2a);
        c.n_symbols = 5000;
        assert!(c.validate().is_err());
        let mut c = ScenarioConfig::preset(Preset::Fig2a);
        c.pulse.sps = 3;
        assert!(c.validate().is_err());
        let mut c = ScenarioConfig::preset(Preset::Fig2a);
        c.fading.snr_floor_db = 20.0;
        assert!(c.validate().is_err());
    }
}
