use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Bit error rate implied by a linear SNR for differentially decoded QPSK,
/// `erfc(sqrt(snr / 2))`, clamped to `[0, 1]`.
pub fn snr_to_ber(snr: f64) -> f64 {
    if !(snr > 0.0) {
        return 1.0;
    }
    erfc((snr / 2.0).sqrt()).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BerSource {
    Counted,
    M2m4,
    Evm,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerPoint {
    /// Seconds.
    pub time: f64,
    pub ber: f64,
    pub source: BerSource,
}

/// Prefix sums over a bit-error indicator with per-bit validity, for O(1)
/// centred moving-window queries.
#[derive(Debug, Clone)]
pub struct ErrorTrack {
    errors: Vec<u32>,
    invalid: Vec<u32>,
}

impl ErrorTrack {
    /// `None` marks a bit with no trustworthy reference.
    pub fn new(indicator: impl IntoIterator<Item = Option<bool>>) -> Self {
        let iter = indicator.into_iter();
        let (lo, _) = iter.size_hint();
        let mut errors = Vec::with_capacity(lo + 1);
        let mut invalid = Vec::with_capacity(lo + 1);
        errors.push(0);
        invalid.push(0);
        let (mut e, mut v) = (0u32, 0u32);
        for bit in iter {
            match bit {
                Some(err) => e += err as u32,
                None => v += 1,
            }
            errors.push(e);
            invalid.push(v);
        }
        Self { errors, invalid }
    }

    pub fn len(&self) -> usize {
        self.errors.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(errors, valid bits)` over the whole sequence.
    pub fn totals(&self) -> (usize, usize) {
        let n = self.len();
        (self.errors[n] as usize, n - self.invalid[n] as usize)
    }

    /// Error fraction over the `window` bits centred on `center` (the
    /// window covers `center - window/2 .. center - window/2 + window`).
    /// `None` if the window leaves the sequence or holds any invalid bit.
    pub fn ber_at(&self, center: usize, window: usize) -> Option<f64> {
        let start = center.checked_sub(window / 2)?;
        let end = start + window;
        if window == 0 || end > self.len() {
            return None;
        }
        if self.invalid[end] != self.invalid[start] {
            return None;
        }
        Some(f64::from(self.errors[end] - self.errors[start]) / window as f64)
    }
}

/// Centred moving-average BER between two aligned bit sequences, one point
/// every `stride` bits wherever the full window fits. Bit `i` is stamped at
/// `i / bit_rate`.
pub fn counted_ber(
    received: &[bool],
    reference: &[bool],
    window: usize,
    stride: usize,
    bit_rate: f64,
) -> Result<Vec<BerPoint>> {
    if received.len() != reference.len() {
        return Err(Error::LengthMismatch {
            left: received.len(),
            right: reference.len(),
        });
    }
    if window == 0 || stride == 0 {
        return Err(Error::InvalidParameter(
            "window and stride must be >= 1".into(),
        ));
    }
    if received.len() < window {
        return Err(Error::TooShort {
            needed: window,
            got: received.len(),
        });
    }
    let track = ErrorTrack::new(received.iter().zip(reference).map(|(a, b)| Some(a != b)));
    let first = window / 2;
    let last = received.len() - window + window / 2;
    Ok((first..=last)
        .step_by(stride)
        .map(|c| BerPoint {
            time: c as f64 / bit_rate,
            ber: track.ber_at(c, window).expect("window in range"),
            source: BerSource::Counted,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formula_reference_values() {
        // erfc(1/sqrt(2)) = 2 Q(1) = 0.31731050786291415,
        // erfc(sqrt(5)) = 1.5654022580025488e-3 (mpmath, 30 digits).
        assert!((snr_to_ber(1.0) - 0.317_310_507_862_914_15).abs() < 1e-4);
        let b10 = snr_to_ber(10.0);
        assert!((b10 / 1.565_402_258_002_548_8e-3 - 1.0).abs() < 0.02);
        assert!(snr_to_ber(1e6) < 1e-12);
        assert_eq!(snr_to_ber(0.0), 1.0);
    }

    #[test]
    fn formula_is_strictly_decreasing() {
        let mut prev = snr_to_ber(1e-3);
        let mut s = 1e-3;
        while s < 40.0 {
            s *= 1.05;
            let b = snr_to_ber(s);
            assert!(b < prev, "{s}");
            prev = b;
        }
    }

    #[test]
    fn moving_window_cases() {
        let n = 120_000;
        let reference: Vec<bool> = (0..n).map(|i| i % 3 == 0).collect();
        let same = counted_ber(&reference, &reference, 50_000, 1000, 8e9).unwrap();
        assert!(same.iter().all(|p| p.ber == 0.0));
        let flipped: Vec<bool> = reference.iter().map(|b| !b).collect();
        let all = counted_ber(&flipped, &reference, 50_000, 1000, 8e9).unwrap();
        assert!(all.iter().all(|p| p.ber == 1.0));

        let mut some = reference.clone();
        for i in (0..50_000).step_by(100) {
            some[i] = !some[i];
        }
        let pts = counted_ber(&some, &reference, 50_000, 1, 8e9).unwrap();
        assert_eq!(pts[0].ber, 0.01);
        assert_eq!(pts[0].time, 25_000.0 / 8e9);
    }

    #[test]
    fn moving_window_errors() {
        let a = vec![false; 100];
        assert!(counted_ber(&a, &a[..99], 10, 1, 1.0).is_err());
        assert!(matches!(
            counted_ber(&a, &a, 200, 1, 1.0),
            Err(Error::TooShort { .. })
        ));
    }

    #[test]
    fn invalid_bits_void_the_window() {
        let ind: Vec<Option<bool>> = (0..100)
            .map(|i| if i == 70 { None } else { Some(i % 10 == 0) })
            .collect();
        let t = ErrorTrack::new(ind);
        assert_eq!(t.ber_at(25, 50), Some(0.1));
        assert_eq!(t.ber_at(60, 50), None);
        assert_eq!(t.ber_at(10, 50), None);
        assert_eq!(t.ber_at(90, 50), None);
        assert_eq!(t.totals(), (9, 99));
    }
}
