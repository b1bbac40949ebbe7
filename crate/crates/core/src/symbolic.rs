//! Symbolic matrices: square matrices with entries in F2[X].

use std::fmt;

use crate::error::{invalid, Result};
use crate::field::FieldCtx;
use crate::matrix::{CoeffVec, FieldMatrix, MAX_ELL};
use crate::poly::BinPoly;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PolyMatrix {
    n: usize,
    entries: Vec<BinPoly>,
}

impl PolyMatrix {
    pub fn zero(n: usize) -> Self {
        PolyMatrix {
            n,
            entries: vec![BinPoly::ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.entries[i * n + i] = BinPoly::ONE;
        }
        m
    }

    pub fn from_entries(n: usize, entries: Vec<BinPoly>) -> Result<Self> {
        if n == 0 || n > MAX_ELL || entries.len() != n * n {
            return invalid(format!("expected {n}x{n} entries, got {}", entries.len()));
        }
        Ok(PolyMatrix { n, entries })
    }

    /// Companion matrix with last row `coeffs`.
    pub fn companion(coeffs: &[BinPoly]) -> Result<Self> {
        let n = coeffs.len();
        if n == 0 || n > MAX_ELL {
            return invalid(format!("companion size {n} outside 1..={MAX_ELL}"));
        }
        let mut m = Self::zero(n);
        for i in 0..n - 1 {
            m.entries[i * n + i + 1] = BinPoly::ONE;
        }
        m.entries[(n - 1) * n..].copy_from_slice(coeffs);
        Ok(m)
    }

    /// Symbolic companion of a coefficient vector: each field element is read
    /// as a polynomial in `X`.
    pub fn companion_of(cv: &CoeffVec) -> Result<Self> {
        let coeffs: Vec<BinPoly> = cv.coeffs().iter().map(|c| c.as_poly()).collect();
        Self::companion(&coeffs)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[BinPoly] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> BinPoly {
        self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BinPoly) {
        self.entries[i * self.n + j] = v;
    }

    /// Product, reduced modulo `modulus` when given, exact otherwise (exact
    /// products fail if a degree would exceed 63).
    pub fn mul(&self, other: &PolyMatrix, modulus: Option<BinPoly>) -> Result<PolyMatrix> {
        if self.n != other.n {
            return invalid("dimension mismatch");
        }
        let n = self.n;
        let mut out = PolyMatrix::zero(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = BinPoly::ZERO;
                for k in 0..n {
                    let t = match modulus {
                        Some(m) => self.get(i, k).mul_mod(other.get(k, j), m)?,
                        None => self.get(i, k).mul(other.get(k, j))?,
                    };
                    acc = acc.add(t);
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u64, modulus: Option<BinPoly>) -> Result<PolyMatrix> {
        if e == 0 {
            return invalid("matrix power exponent must be positive");
        }
        let mut acc = self.clone();
        for _ in 1..e {
            acc = acc.mul(self, modulus)?;
        }
        match modulus {
            Some(m) => acc.reduce(m),
            None => Ok(acc),
        }
    }

    pub fn reduce(&self, modulus: BinPoly) -> Result<PolyMatrix> {
        let entries = self
            .entries
            .iter()
            .map(|e| e.rem(modulus))
            .collect::<Result<_>>()?;
        Ok(PolyMatrix { n: self.n, entries })
    }

    /// Substitutes `X <- α` of the field, i.e. reduces modulo its modulus.
    pub fn eval_at(&self, ctx: &FieldCtx) -> FieldMatrix {
        let rows = self
            .entries
            .chunks(self.n)
            .map(|r| r.iter().map(|&p| ctx.from_poly(p)).collect())
            .collect();
        FieldMatrix::from_rows(rows).expect("square by construction")
    }

    /// Substitutes `X <- k(X)` and reduces modulo `modulus`.
    pub fn compose_mod(&self, k: BinPoly, modulus: BinPoly) -> Result<PolyMatrix> {
        let entries = self
            .entries
            .iter()
            .map(|e| e.compose_mod(k, modulus))
            .collect::<Result<_>>()?;
        Ok(PolyMatrix { n: self.n, entries })
    }
}

impl fmt::Debug for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.entries.chunks(self.n)).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldElem;

    #[test]
    fn symbolic_power_evaluates_like_field_power() {
        let ctx = FieldCtx::new(BinPoly::new(0x13)).unwrap();
        let cv = CoeffVec::from_alpha_powers(&[0, 12, 1, 3, 2, 3, 1, 12], &ctx).unwrap();
        let sym = PolyMatrix::companion_of(&cv).unwrap();
        let exact = sym.pow(8, None).unwrap();
        let reduced = sym.pow(8, Some(ctx.modulus())).unwrap();
        let want = cv.diffusion_matrix(&ctx).unwrap();
        assert_eq!(exact.eval_at(&ctx), want);
        assert_eq!(reduced.eval_at(&ctx), want);
        assert_eq!(reduced, exact.reduce(ctx.modulus()).unwrap());
    }

    #[test]
    fn companion_rows() {
        let m = PolyMatrix::companion(&[BinPoly::ONE, BinPoly::X]).unwrap();
        assert_eq!(
            m.entries(),
            &[BinPoly::ZERO, BinPoly::ONE, BinPoly::ONE, BinPoly::X]
        );
        assert_eq!(
            m.eval_at(&FieldCtx::new(BinPoly::new(0b111)).unwrap())
                .get(1, 1),
            FieldElem(2)
        );
    }
}
