//! Gray-mapped QPSK and differential (phase-increment) coding.
//!
//! Constellation points are indexed by quadrant, counter-clockwise from the
//! first: 0 = (+,+), 1 = (-,+), 2 = (-,-), 3 = (+,-). The Gray bit pair
//! `(b0, b1)` selects the point `((1-2 b0) + j (1-2 b1)) / sqrt(2)`, which
//! gives the labels 00, 10, 11, 01 in quadrant order. Differential coding
//! reuses the same labels for the phase increment `q * pi/2`.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::signal::{IqSample, SymbolBlock};

const SNAP_TOLERANCE: f64 = 1e-9;

/// Quadrant index of a sample. Zero components count as positive.
#[inline]
pub fn quadrant(s: IqSample) -> u8 {
    match (s.re >= 0.0, s.im >= 0.0) {
        (true, true) => 0,
        (false, true) => 1,
        (false, false) => 2,
        (true, false) => 3,
    }
}

/// Constellation point for a quadrant index (taken mod 4).
#[inline]
pub fn point(q: u8) -> IqSample {
    const POINTS: [(f64, f64); 4] = [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)];
    let (re, im) = POINTS[(q & 3) as usize];
    Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
}

#[inline]
pub(crate) fn bits_to_quadrant(b0: bool, b1: bool) -> u8 {
    match (b0, b1) {
        (false, false) => 0,
        (true, false) => 1,
        (true, true) => 2,
        (false, true) => 3,
    }
}

#[inline]
pub(crate) fn quadrant_to_bits(q: u8) -> (bool, bool) {
    match q & 3 {
        0 => (false, false),
        1 => (true, false),
        2 => (true, true),
        _ => (false, true),
    }
}

/// Quadrant of a symbol that must lie on the constellation.
fn constellation_index(s: IqSample, index: usize) -> Result<u8> {
    let q = quadrant(s);
    if (s - point(q)).norm() <= SNAP_TOLERANCE {
        Ok(q)
    } else {
        Err(Error::InvalidSymbol(index))
    }
}

pub fn qpsk_map(bits: &[bool], symbol_rate: f64) -> Result<SymbolBlock> {
    if bits.len() % 2 != 0 {
        return Err(Error::DanglingBit);
    }
    let symbols = bits
        .chunks_exact(2)
        .map(|pair| point(bits_to_quadrant(pair[0], pair[1])))
        .collect();
    SymbolBlock::new(symbols, symbol_rate)
}

/// Phase-increment encoder: each output is the previous output advanced by
/// the input's increment, with the seed symbol as the reference before the
/// first input.
pub fn diff_encode(symbols: &SymbolBlock, seed_symbol: IqSample) -> Result<SymbolBlock> {
    let mut phase = constellation_index(seed_symbol, 0)
        .map_err(|_| Error::InvalidParameter("seed symbol is not a constellation point".into()))?;
    let out = symbols
        .symbols()
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            phase = (phase + constellation_index(s, i)?) & 3;
            Ok(point(phase))
        })
        .collect::<Result<Vec<_>>>()?;
    symbols.with_symbols(out)
}
