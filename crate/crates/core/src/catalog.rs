//! Published solutions, stored as exponents of α (the class of `X`).

use crate::error::Result;
use crate::field::FieldCtx;
use crate::matrix::CoeffVec;
use crate::poly::BinPoly;

#[derive(Clone, Copy, Debug)]
pub struct KnownSolution {
    pub name: &'static str,
    pub modulus: BinPoly,
    pub exponents: &'static [i64],
}

impl KnownSolution {
    pub fn ell(&self) -> usize {
        self.exponents.len()
    }

    pub fn field(&self) -> Result<FieldCtx> {
        FieldCtx::new(self.modulus)
    }

    pub fn coeffs(&self, ctx: &FieldCtx) -> Result<CoeffVec> {
        CoeffVec::from_alpha_powers(self.exponents, ctx)
    }
}

const fn known(name: &'static str, modulus: u64, exponents: &'static [i64]) -> KnownSolution {
    KnownSolution {
        name,
        modulus: BinPoly::new(modulus),
        exponents,
    }
}

/// The single 4x4 class over GF(8).
pub const GF8_ELL4: KnownSolution = known("ell4", 0xb, &[0, 3, 1, 3]);

/// The eight 8x8 solutions over GF(16); `S0..S3` and `S4..S7` are the two classes.
pub const GF16_ELL8: [KnownSolution; 8] = [
    known("S0", 0x13, &[0, 3, 4, 12, 8, 12, 4, 3]),
    known("S1", 0x13, &[0, 6, 8, 9, 1, 9, 8, 6]),
    known("S2", 0x13, &[0, 12, 1, 3, 2, 3, 1, 12]),
    known("S3", 0x13, &[0, 9, 2, 6, 4, 6, 2, 9]),
    known("S4", 0x13, &[0, 7, 2, 11, 13, 11, 2, 7]),
    known("S5", 0x13, &[0, 14, 4, 7, 11, 7, 4, 14]),
    known("S6", 0x13, &[0, 13, 8, 14, 7, 14, 8, 13]),
    known("S7", 0x13, &[0, 11, 1, 13, 14, 13, 1, 11]),
];

/// Two 16x16 solutions over GF(32).
pub const GF32_ELL16: [KnownSolution; 2] = [
    known(
        "S0",
        0x25,
        &[0, 17, 1, 9, 12, 1, 27, 25, 7, 25, 27, 1, 12, 9, 1, 17],
    ),
    known(
        "S1",
        0x25,
        &[0, 20, 25, 3, 27, 19, 9, 27, 15, 27, 9, 19, 27, 3, 25, 20],
    ),
];

/// Earlier companion rows for sizes 5 to 8 over GF(16), monomials in `L = α`.
pub const PRIOR_ROWS: [KnownSolution; 4] = [
    known("prior5", 0x13, &[0, 2, -1, -1, 2]),
    known("prior6", 0x13, &[0, -2, -1, 2, -1, -2]),
    known("prior7", 0x13, &[0, 1, -5, 0, 0, -5, 1]),
    known("prior8", 0x13, &[0, -3, 1, 3, 2, 3, 1, -3]),
];

/// Every golden solution: the 4x4, the eight 8x8 and the two 16x16 ones.
pub fn golden() -> Vec<KnownSolution> {
    let mut all = vec![GF8_ELL4];
    all.extend(GF16_ELL8);
    all.extend(GF32_ELL16);
    all
}
