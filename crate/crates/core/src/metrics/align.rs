//! Cyclic alignment of recovered bits against one PRBS period.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Agreement that must be exceeded to accept an alignment.
pub const MIN_AGREEMENT: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Alignment {
    /// `received[i]` corresponds to `reference[(i + offset) % period]`.
    pub offset: usize,
    /// Fraction of matching bits over the correlation window.
    pub agreement: f64,
}

/// Finds the cyclic offset that maximizes bit agreement between the first
/// `reference.len()` received bits and the reference period.
///
/// All offsets are scored at once with an FFT circular cross-correlation of
/// the antipodal sequences; the winner's agreement is then recounted
/// exactly.
pub fn prbs_align(received: &[bool], reference: &[bool]) -> Result<Alignment> {
    let p = reference.len();
    if p == 0 {
        return Err(Error::EmptyInput);
    }
    if received.len() < p {
        return Err(Error::TooShort {
            needed: p,
            got: received.len(),
        });
    }
    let window = &received[..p];
    let antipodal = |b: bool| Complex64::new(if b { -1.0 } else { 1.0 }, 0.0);
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(p);
    let inv = planner.plan_fft_inverse(p);
    let mut a: Vec<Complex64> = window.iter().map(|&b| antipodal(b)).collect();
    let mut r: Vec<Complex64> = reference.iter().map(|&b| antipodal(b)).collect();
    fwd.process(&mut a);
    fwd.process(&mut r);
    // corr[k] = sum_i a[i] r[i + k]  <=>  IFFT(conj(A) R).
    let mut c: Vec<Complex64> = a.iter().zip(&r).map(|(x, y)| x.conj() * y).collect();
    inv.process(&mut c);
    let (offset, _) =
        c.iter().enumerate().fold(
            (0, f64::MIN),
            |(bi, bv), (i, z)| if z.re > bv { (i, z.re) } else { (bi, bv) },
        );
    let matches = window
        .iter()
        .enumerate()
        .filter(|&(i, &b)| b == reference[(i + offset) % p])
        .count();
    let agreement = matches as f64 / p as f64;
    if agreement > MIN_AGREEMENT {
        Ok(Alignment { offset, agreement })
    } else {
        Err(Error::NoAlignment { agreement })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tx::{prbs15_period, PRBS15_PERIOD};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn shifted(reference: &[bool], shift: usize, len: usize) -> Vec<bool> {
        (0..len)
            .map(|i| reference[(i + shift) % reference.len()])
            .collect()
    }

    #[test]
    fn exact_shift() {
        let r = prbs15_period();
        let rx = shifted(&r, 1234, 2 * PRBS15_PERIOD);
        let a = prbs_align(&rx, &r).unwrap();
        assert_eq!(a.offset, 1234);
        assert_eq!(a.agreement, 1.0);
    }

    #[test]
    fn survives_five_percent_flips() {
        let r = prbs15_period();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut rx = shifted(&r, 30_001, 2 * PRBS15_PERIOD);
        for b in rx.iter_mut() {
            if rng.random_bool(0.05) {
                *b = !*b;
            }
        }
        let a = prbs_align(&rx, &r).unwrap();
        assert_eq!(a.offset, 30_001);
        assert!((a.agreement - 0.95).abs() < 0.005, "{}", a.agreement);
    }

    #[test]
    fn random_bits_do_not_align() {
        let r = prbs15_period();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let rx: Vec<bool> = (0..2 * PRBS15_PERIOD).map(|_| rng.random()).collect();
        match prbs_align(&rx, &r) {
            Err(Error::NoAlignment { agreement }) => assert!((agreement - 0.5).abs() < 0.02),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn short_input() {
        let r = prbs15_period();
        assert!(matches!(
            prbs_align(&r[..100], &r),
            Err(Error::TooShort { .. })
        ));
    }
}
