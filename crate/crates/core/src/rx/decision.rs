use crate::error::{Error, Result};
use crate::signal::{IqSample, SymbolBlock};
use crate::tx::{point, quadrant, quadrant_to_bits};

/// Nearest constellation point per symbol (quadrant test; zero components
/// go to the positive half-plane).
pub fn hard_decision(symbols: &SymbolBlock) -> SymbolBlock {
    let out = symbols
        .symbols()
        .iter()
        .map(|&s| point(quadrant(s)))
        .collect();
    symbols
        .with_symbols(out)
        .expect("decisions are finite and non-empty")
}

/// Decodes the quadrant increment between consecutive symbols into Gray bit
/// pairs: `n` symbols give `2 (n - 1)` bits. A constant quarter-turn
/// rotation of the whole block cancels in the increments.
pub fn diff_decode(symbols: &[IqSample]) -> Result<Vec<bool>> {
    if symbols.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            got: symbols.len(),
        });
    }
    let mut bits = Vec::with_capacity(2 * (symbols.len() - 1));
    let mut prev = quadrant(symbols[0]);
    for &s in &symbols[1..] {
        let q = quadrant(s);
        let (b0, b1) = quadrant_to_bits(q.wrapping_sub(prev) & 3);
        bits.push(b0);
        bits.push(b1);
        prev = q;
    }
    Ok(bits)
}
