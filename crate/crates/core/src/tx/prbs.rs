//! PRBS15 generator (x^15 + x^14 + 1, Fibonacci form).

use crate::error::{Error, Result};

/// Period of the maximal-length 15-bit sequence.
pub const PRBS15_PERIOD: usize = (1 << 15) - 1;

const MASK: u16 = 0x7fff;

/// 15-bit shift register. All-zeros is absorbing and therefore rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Prbs15 {
    register: u16,
}

impl Default for Prbs15 {
    fn default() -> Self {
        Self { register: MASK }
    }
}

impl Prbs15 {
    pub fn new(seed: u16) -> Result<Self> {
        let register = seed & MASK;
        if register == 0 {
            return Err(Error::DegenerateSeed);
        }
        Ok(Self { register })
    }

    pub fn register(&self) -> u16 {
        self.register
    }

    pub fn next_bit(&mut self) -> bool {
        let fb = ((self.register >> 14) ^ (self.register >> 13)) & 1;
        self.register = ((self.register << 1) | fb) & MASK;
        fb == 1
    }

    /// Emits `n_bits` bits and advances the register past them.
    pub fn generate(&mut self, n_bits: usize) -> Vec<bool> {
        (0..n_bits).map(|_| self.next_bit()).collect()
    }
}

/// One full period starting from the default (all-ones) register.
pub fn prbs15_period() -> Vec<bool> {
    Prbs15::default().generate(PRBS15_PERIOD)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Register as an explicit array of cells: cell 0 is the newest bit,
    /// feedback taps sit at stages 15 and 14.
    fn oracle(seed: u16, n: usize) -> Vec<bool> {
        let mut cells: Vec<bool> = (0..15).map(|i| (seed >> i) & 1 == 1).collect();
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let fb = cells[14] ^ cells[13];
            cells.rotate_right(1);
            cells[0] = fb;
            out.push(fb);
        }
        out
    }

    #[test]
    fn matches_cell_oracle() {
        for seed in [1u16, 0x7fff, 0x1234, 0x4000] {
            let got = Prbs15::new(seed).unwrap().generate(3 * PRBS15_PERIOD);
            assert_eq!(got, oracle(seed, 3 * PRBS15_PERIOD), "seed {seed:#x}");
        }
    }

    #[test]
    fn period_and_balance() {
        let bits = Prbs15::default().generate(2 * PRBS15_PERIOD);
        for n in 0..PRBS15_PERIOD {
            assert_eq!(bits[n], bits[n + PRBS15_PERIOD]);
        }
        let ones = bits[..PRBS15_PERIOD].iter().filter(|&&b| b).count();
        assert_eq!(ones, 16384);
        assert_eq!(PRBS15_PERIOD - ones, 16383);
    }

    #[test]
    fn period_is_minimal() {
        // The register returns to its seed only after the full period.
        let mut p = Prbs15::new(0x2aaa).unwrap();
        let start = p.register();
        let mut steps = 0;
        loop {
            p.next_bit();
            steps += 1;
            if p.register() == start {
                break;
            }
        }
        assert_eq!(steps, PRBS15_PERIOD);
    }

    #[test]
    fn deterministic() {
        let a = Prbs15::new(77).unwrap().generate(1000);
        let b = Prbs15::new(77).unwrap().generate(1000);
        assert_eq!(a, b);
    }

    #[test]
    fn zero_seed_rejected() {
        assert_eq!(Prbs15::new(0), Err(Error::DegenerateSeed));
        assert_eq!(Prbs15::new(0x8000), Err(Error::DegenerateSeed));
    }
}
