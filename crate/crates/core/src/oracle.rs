//! Brute-force branch numbers, independent of any minor computation.
//!
//! A linear map on `n` bits is given by the images of the `n` unit vectors.
//! Inputs are walked in Gray-code order so each step updates the image with a
//! single XOR; weights count nonzero symbols of `symbol_bits` bits.

use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElem};
use crate::matrix::FieldMatrix;

/// Exhaustive enumeration is refused beyond `2^24` inputs.
pub const ORACLE_MAX_BITS: usize = 24;

/// Number of nonzero `symbol_bits`-wide symbols among the low `symbols * symbol_bits` bits.
#[inline]
pub(crate) fn symbol_weight(v: u64, symbol_bits: usize, starts: u64) -> u32 {
    let mut folded = v;
    for k in 1..symbol_bits {
        folded |= v >> k;
    }
    (folded & starts).count_ones()
}

fn symbol_starts(symbol_bits: usize, symbols: usize) -> u64 {
    (0..symbols).fold(0u64, |m, i| m | 1 << (i * symbol_bits))
}

/// `min over x != 0 of w(x) + w(Ax)` where `columns[i] = A e_i`.
pub(crate) fn min_weight_sum(columns: &[u64], symbol_bits: usize) -> Result<u32> {
    let n = columns.len();
    if n > ORACLE_MAX_BITS {
        return Err(Error::SizeLimit(format!(
            "branch-number enumeration over 2^{n} inputs exceeds the 2^{ORACLE_MAX_BITS} guard"
        )));
    }
    debug_assert!(n.is_multiple_of(symbol_bits));
    let starts = symbol_starts(symbol_bits, n / symbol_bits);
    let mut x = 0u64;
    let mut y = 0u64;
    let mut best = u32::MAX;
    for g in 1u64..(1 << n) {
        let bit = g.trailing_zeros() as usize;
        x ^= 1 << bit;
        y ^= columns[bit];
        let w = symbol_weight(x, symbol_bits, starts) + symbol_weight(y, symbol_bits, starts);
        best = best.min(w);
    }
    Ok(best)
}

/// Exact branch number of `m` over GF(2^d) by enumerating all nonzero inputs.
pub fn branch_number_oracle(m: &FieldMatrix, ctx: &FieldCtx) -> Result<u32> {
    let d = ctx.degree() as usize;
    let ell = m.ell();
    if d * ell > ORACLE_MAX_BITS {
        return Err(Error::SizeLimit(format!(
            "field branch oracle needs d*ell <= {ORACLE_MAX_BITS}, got {d}*{ell}"
        )));
    }
    let mut columns = Vec::with_capacity(d * ell);
    for j in 0..ell {
        for b in 0..d {
            let unit = FieldElem(1 << b);
            let image = (0..ell).fold(0u64, |acc, i| {
                acc | (ctx.mul(m.get(i, j), unit).value() as u64) << (i * d)
            });
            columns.push(image);
        }
    }
    min_weight_sum(&columns, d)
}
