//! Blind phase search carrier recovery.
//!
//! Every symbol is rotated by each of `B` test phases spread over one
//! quadrant; the phase whose rotated neighbourhood sits closest to the
//! constellation (summed squared decision distance over a centred window)
//! wins. The winning phases are unwrapped across the quarter-turn ambiguity
//! so that the correction is continuous.

use std::collections::VecDeque;
use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::SymbolBlock;
use crate::tx::{point, quadrant};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BpsConfig {
    pub num_test_phases: usize,
    pub window_half_width: usize,
}

impl Default for BpsConfig {
    fn default() -> Self {
        Self {
            num_test_phases: 32,
            window_half_width: 16,
        }
    }
}

impl BpsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_test_phases < 8 || self.window_half_width < 1 {
            return Err(Error::InvalidParameter(format!(
                "BPS needs >= 8 test phases and half width >= 1, got {} and {}",
                self.num_test_phases, self.window_half_width
            )));
        }
        Ok(())
    }

    /// Test phase `b`, in `[0, pi/2)`.
    pub fn test_phase(&self, b: usize) -> f64 {
        b as f64 * FRAC_PI_2 / self.num_test_phases as f64
    }
}

#[derive(Debug, Clone)]
pub struct BpsOutput {
    /// Input symbols de-rotated by the unwrapped phase estimate.
    pub symbols: SymbolBlock,
    /// Estimated carrier phase per symbol, radians.
    pub phase: Vec<f64>,
}

#[inline]
fn decision_distance(s: Complex64) -> f64 {
    (s - point(quadrant(s))).norm_sqr()
}

pub fn bps_recover(symbols: &SymbolBlock, cfg: &BpsConfig) -> Result<BpsOutput> {
    cfg.validate()?;
    let b = cfg.num_test_phases;
    let w = cfg.window_half_width;
    let input = symbols.symbols();
    let n = input.len();
    // De-rotators for each test phase.
    let rotors: Vec<Complex64> = (0..b)
        .map(|i| Complex64::from_polar(1.0, -cfg.test_phase(i)))
        .collect();

    let mut sums = vec![0.0f64; b];
    let mut history: VecDeque<Vec<f64>> = VecDeque::with_capacity(2 * w + 2);
    let mut best = Vec::with_capacity(n);

    // Running window [k - w, k + w], truncated at the edges.
    for j in 0..n + w {
        if j < n {
            let d: Vec<f64> = rotors
                .iter()
                .map(|r| decision_distance(input[j] * r))
                .collect();
            sums.iter_mut().zip(&d).for_each(|(s, x)| *s += x);
            history.push_back(d);
        }
        if history.len() > 2 * w + 1 {
            let old = history.pop_front().expect("window non-empty");
            sums.iter_mut().zip(&old).for_each(|(s, x)| *s -= x);
        }
        if j >= w {
            let (idx, _) = sums
                .iter()
                .enumerate()
                .fold(
                    (0, f64::INFINITY),
                    |(bi, bv), (i, &v)| if v < bv { (i, v) } else { (bi, bv) },
                );
            best.push(idx);
        }
    }

    let mut phase = Vec::with_capacity(n);
    let mut prev: Option<f64> = None;
    for &idx in &best {
        let raw = cfg.test_phase(idx);
        let theta = match prev {
            None => raw,
            Some(p) => raw + ((p - raw) / FRAC_PI_2).round() * FRAC_PI_2,
        };
        phase.push(theta);
        prev = Some(theta);
    }
    let out = input
        .iter()
        .zip(&phase)
        .map(|(s, th)| s * Complex64::from_polar(1.0, -th))
        .collect();
    Ok(BpsOutput {
        symbols: symbols.with_symbols(out)?,
        phase,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{add_awgn, apply_phase_noise};
    use crate::signal::IqStream;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn qpsk(n: usize, seed: u64) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| point(rng.random_range(0..4u8))).collect()
    }

    #[test]
    fn constant_offset_within_quantization() {
        let cfg = BpsConfig::default();
        let tol = FRAC_PI_2 / (2.0 * cfg.num_test_phases as f64);
        for offset in [PI / 8.0, 0.3, 1.1] {
            let rot = Complex64::from_polar(1.0, offset);
            let s: Vec<_> = qpsk(500, 1).iter().map(|x| x * rot).collect();
            let out = bps_recover(&SymbolBlock::new(s, 1.0).unwrap(), &cfg).unwrap();
            for th in &out.phase {
                // Equivalent modulo the quarter-turn ambiguity.
                let d = (th - offset) / FRAC_PI_2;
                let resid = (d - d.round()) * FRAC_PI_2;
                assert!(resid.abs() <= tol + 1e-12, "{offset}: {th}");
            }
        }
    }

    #[test]
    fn zero_offset_is_a_quarter_turn_multiple() {
        let s = qpsk(300, 2);
        let out = bps_recover(
            &SymbolBlock::new(s.clone(), 1.0).unwrap(),
            &BpsConfig::default(),
        )
        .unwrap();
        let k = (out.phase[0] / FRAC_PI_2).round();
        let rot = Complex64::from_polar(1.0, -k * FRAC_PI_2);
        for (a, b) in s.iter().zip(out.symbols.symbols()) {
            assert!((a * rot - b).norm() < 1e-12);
        }
    }

    #[test]
    fn phase_trace_lies_on_grid() {
        let cfg = BpsConfig::default();
        let s = qpsk(4000, 3);
        let x = IqStream::new(s, 1.0).unwrap();
        let x = add_awgn(&apply_phase_noise(&x, 1e-3, 4).unwrap(), 0.1, 5).unwrap();
        let out = bps_recover(&SymbolBlock::new(x.into_samples(), 1.0).unwrap(), &cfg).unwrap();
        let step = FRAC_PI_2 / cfg.num_test_phases as f64;
        for th in &out.phase {
            let q = th / step;
            assert!((q - q.round()).abs() < 1e-9);
        }
    }

    #[test]
    fn tracks_wiener_phase_noise() {
        // linewidth * T = 1e-5 at 15 dB.
        let n = 200_000;
        let truth_stream = IqStream::new(vec![Complex64::new(1.0, 0.0); n], 1.0).unwrap();
        let pn = apply_phase_noise(&truth_stream, 1e-5, 7).unwrap();
        let s: Vec<_> = qpsk(n, 8)
            .iter()
            .zip(pn.samples())
            .map(|(a, r)| a * r)
            .collect();
        let x = add_awgn(&IqStream::new(s, 1.0).unwrap(), 10f64.powf(-1.5), 9).unwrap();
        let out = bps_recover(
            &SymbolBlock::new(x.into_samples(), 1.0).unwrap(),
            &BpsConfig::default(),
        )
        .unwrap();
        // Compare against the true phase after removing the constant
        // quarter-turn ambiguity.
        let diffs: Vec<f64> = out
            .phase
            .iter()
            .zip(pn.samples())
            .map(|(th, r)| th - r.arg())
            .collect();
        let mut mse = 0.0;
        for d in &diffs {
            let r = (d / FRAC_PI_2 - (d / FRAC_PI_2).round()) * FRAC_PI_2;
            mse += r * r;
        }
        mse /= n as f64;
        assert!(mse < 1e-2, "{mse}");
    }

    #[test]
    fn rejects_bad_config() {
        let s = SymbolBlock::new(qpsk(10, 1), 1.0).unwrap();
        let cfg = BpsConfig {
            num_test_phases: 4,
            window_half_width: 3,
        };
        assert!(bps_recover(&s, &cfg).is_err());
    }
}
