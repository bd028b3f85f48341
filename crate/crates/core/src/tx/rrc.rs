//! Root-raised-cosine design and pulse shaping.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::signal::{IqStream, SymbolBlock};

#[derive(Debug, Clone, PartialEq)]
pub struct RrcFilter {
    rolloff: f64,
    span: usize,
    sps: usize,
    taps: Vec<f64>,
}

impl RrcFilter {
    /// Designs a unit-energy RRC filter of `span * sps + 1` taps.
    ///
    /// The removable singularities at `t = 0` and `|t| = 1/(4 rolloff)` are
    /// replaced by their limits.
    pub fn design(rolloff: f64, span: usize, sps: usize) -> Result<Self> {
        if !(rolloff > 0.0 && rolloff <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "rolloff must be in (0, 1], got {rolloff}"
            )));
        }
        if span < 2 || sps < 2 {
            return Err(Error::InvalidParameter(format!(
                "span and sps must be >= 2, got span {span}, sps {sps}"
            )));
        }
        let n = span * sps + 1;
        let center = (span * sps) as f64 / 2.0;
        let b = rolloff;
        let mut taps: Vec<f64> = (0..n)
            .map(|k| {
                let t = (k as f64 - center) / sps as f64;
                if t.abs() < 1e-12 {
                    1.0 - b + 4.0 * b / PI
                } else if (t.abs() - 1.0 / (4.0 * b)).abs() < 1e-9 {
                    let a = PI / (4.0 * b);
                    b * FRAC_1_SQRT_2 * ((1.0 + 2.0 / PI) * a.sin() + (1.0 - 2.0 / PI) * a.cos())
                } else {
                    let num = (PI * t * (1.0 - b)).sin() + 4.0 * b * t * (PI * t * (1.0 + b)).cos();
                    let den = PI * t * (1.0 - (4.0 * b * t).powi(2));
                    num / den
                }
            })
            .collect();
        // Mirror so the symmetry is exact, not just within rounding.
        for k in 0..n / 2 {
            taps[n - 1 - k] = taps[k];
        }
        let energy = taps.iter().map(|h| h * h).sum::<f64>().sqrt();
        taps.iter_mut().for_each(|h| *h /= energy);
        Ok(Self {
            rolloff,
            span,
            sps,
            taps,
        })
    }

    pub fn rolloff(&self) -> f64 {
        self.rolloff
    }

    pub fn span(&self) -> usize {
        self.span
    }

    pub fn sps(&self) -> usize {
        self.sps
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    /// Delay of the filter peak, in samples.
    pub fn group_delay(&self) -> usize {
        self.span * self.sps / 2
    }
}

/// Oversampled waveform with the pulse-shaping delay it carries.
#[derive(Debug, Clone)]
pub struct ShapedSignal {
    pub stream: IqStream,
    /// Index of the first symbol's peak in `stream`.
    pub group_delay: usize,
}

/// Full linear convolution of a complex sequence with real taps.
pub(crate) fn convolve(input: &[Complex64], taps: &[f64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); input.len() + taps.len() - 1];
    for (i, &x) in input.iter().enumerate() {
        if x.re == 0.0 && x.im == 0.0 {
            continue;
        }
        for (o, &h) in out[i..i + taps.len()].iter_mut().zip(taps) {
            *o += x * h;
        }
    }
    out
}

/// Zero-stuffs by `sps` and filters. The output keeps the full convolution
/// tail; the peak of symbol `k` sits at sample `k * sps + group_delay`.
pub fn pulse_shape(symbols: &SymbolBlock, filter: &RrcFilter) -> Result<ShapedSignal> {
    let sps = filter.sps();
    let taps = filter.taps();
    let n = symbols.len();
    let mut out = vec![Complex64::new(0.0, 0.0); (n - 1) * sps + taps.len()];
    for (k, &s) in symbols.symbols().iter().enumerate() {
        for (o, &h) in out[k * sps..k * sps + taps.len()].iter_mut().zip(taps) {
            *o += s * h;
        }
    }
    Ok(ShapedSignal {
        stream: IqStream::new(out, symbols.symbol_rate() * sps as f64)?,
        group_delay: filter.group_delay(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn taps_symmetric_and_unit_energy() {
        for (b, span, sps) in [(0.1, 32, 2), (0.25, 8, 4), (1.0, 6, 3), (0.5, 16, 2)] {
            let f = RrcFilter::design(b, span, sps).unwrap();
            let t = f.taps();
            assert_eq!(t.len(), span * sps + 1);
            for k in 0..t.len() {
                assert!((t[k] - t[t.len() - 1 - k]).abs() < 1e-12);
            }
            let e: f64 = t.iter().map(|h| h * h).sum();
            assert!((e - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_points_use_limits() {
        // rolloff 0.25 with sps 4 lands exactly on t = +-1.
        let f = RrcFilter::design(0.25, 8, 4).unwrap();
        assert!(f.taps().iter().all(|h| h.is_finite()));
        // Continuity: the limit value sits between its neighbours' trend.
        let c = f.group_delay();
        let t = f.taps();
        let (a, m, z) = (t[c + 3], t[c + 4], t[c + 5]);
        assert!((m - (a + z) / 2.0).abs() < 0.05);
    }

    #[test]
    fn bad_parameters_rejected() {
        assert!(RrcFilter::design(0.0, 16, 2).is_err());
        assert!(RrcFilter::design(1.1, 16, 2).is_err());
        assert!(RrcFilter::design(0.1, 1, 2).is_err());
        assert!(RrcFilter::design(0.1, 16, 1).is_err());
    }

    /// Tx/Rx cascade sampled at symbol spacing.
    fn isi_profile(span: usize, sps: usize) -> (f64, f64, f64) {
        let f = RrcFilter::design(0.1, span, sps).unwrap();
        let t = f.taps();
        let mut g = vec![0.0; 2 * t.len() - 1];
        for (i, a) in t.iter().enumerate() {
            for (j, b) in t.iter().enumerate() {
                g[i + j] += a * b;
            }
        }
        let c = t.len() - 1;
        let peak = g[c];
        let others: Vec<f64> = (c % sps..g.len())
            .step_by(sps)
            .filter(|&i| i != c)
            .map(|i| g[i] / peak)
            .collect();
        let max = others.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let power = others.iter().map(|x| x * x).sum();
        (peak, max, power)
    }

    #[test]
    fn matched_pair_is_nearly_nyquist() {
        // Frozen from a direct self-convolution: the largest single
        // symbol-spaced residue is 7.99e-3 (span 16) and 2.65e-3 (span 32)
        // of the peak, the summed residue power 2.79e-4 and 3.44e-5.
        for (span, max_ref, pow_ref) in [(16, 7.99e-3, 2.79e-4), (32, 2.65e-3, 3.44e-5)] {
            let (peak, max, power) = isi_profile(span, 2);
            assert!((peak - 1.0).abs() < 1e-12);
            assert!((max - max_ref).abs() < 1e-4, "span {span}: {max}");
            assert!((power - pow_ref).abs() < 1e-6, "span {span}: {power}");
            assert!(power <= 1e-3);
        }
    }

    #[test]
    fn impulse_reproduces_taps() {
        let f = RrcFilter::design(0.1, 16, 2).unwrap();
        let sym = SymbolBlock::new(vec![Complex64::new(1.0, 0.0)], 1e9).unwrap();
        let out = pulse_shape(&sym, &f).unwrap();
        assert_eq!(out.stream.len(), f.taps().len());
        assert_eq!(out.stream.sample_rate(), 2e9);
        for (o, h) in out.stream.samples().iter().zip(f.taps()) {
            assert_eq!(o.re, *h);
            assert_eq!(o.im, 0.0);
        }
    }

    #[test]
    fn zeros_in_zeros_out() {
        let f = RrcFilter::design(0.1, 16, 2).unwrap();
        let sym = SymbolBlock::new(vec![Complex64::new(0.0, 0.0); 40], 1e9).unwrap();
        let out = pulse_shape(&sym, &f).unwrap();
        assert!(out.stream.samples().iter().all(|s| s.norm() == 0.0));
    }

    proptest! {
        #[test]
        fn shaping_is_linear(
            x in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..64),
            y in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 64),
            a in -3.0..3.0f64,
            b in -3.0..3.0f64,
        ) {
            let f = RrcFilter::design(0.2, 8, 2).unwrap();
            let xs: Vec<_> = x.iter().map(|&(r, i)| Complex64::new(r, i)).collect();
            let ys: Vec<_> = y[..xs.len()].iter().map(|&(r, i)| Complex64::new(r, i)).collect();
            let mix: Vec<_> = xs.iter().zip(&ys).map(|(p, q)| p * a + q * b).collect();
            let shape = |v: Vec<Complex64>| {
                pulse_shape(&SymbolBlock::new(v, 1.0).unwrap(), &f).unwrap().stream.into_samples()
            };
            let (sx, sy, sm) = (shape(xs), shape(ys), shape(mix));
            for i in 0..sm.len() {
                prop_assert!((sm[i] - (sx[i] * a + sy[i] * b)).norm() < 1e-10);
            }
        }
    }
}
