//! Square matrices over GF(2^d) and the companion-matrix coefficient vectors
//! that parametrize recursive diffusion layers.

use std::fmt;

use crate::error::{invalid, Result};
use crate::field::{FieldCtx, FieldElem};

pub const MAX_ELL: usize = 32;

/// An `ell x ell` matrix of field elements, row-major. The field is passed
/// alongside to every operation.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldMatrix {
    ell: usize,
    entries: Vec<FieldElem>,
}

impl FieldMatrix {
    pub fn zero(ell: usize) -> Self {
        assert!(
            (1..=MAX_ELL).contains(&ell),
            "matrix size {ell} out of range"
        );
        FieldMatrix {
            ell,
            entries: vec![FieldElem::ZERO; ell * ell],
        }
    }

    pub fn identity(ell: usize) -> Self {
        let mut m = Self::zero(ell);
        for i in 0..ell {
            m.set(i, i, FieldElem::ONE);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<FieldElem>>) -> Result<Self> {
        let ell = rows.len();
        if !(1..=MAX_ELL).contains(&ell) {
            return invalid(format!("matrix size {ell} outside 1..={MAX_ELL}"));
        }
        if rows.iter().any(|r| r.len() != ell) {
            return invalid("matrix is not square");
        }
        Ok(FieldMatrix {
            ell,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> FieldElem {
        self.entries[i * self.ell + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: FieldElem) {
        self.entries[i * self.ell + j] = v;
    }

    pub fn row(&self, i: usize) -> &[FieldElem] {
        &self.entries[i * self.ell..(i + 1) * self.ell]
    }

    pub fn entries(&self) -> &[FieldElem] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<FieldElem>> {
        self.entries.chunks(self.ell).map(<[_]>::to_vec).collect()
    }

    pub fn mul(&self, other: &FieldMatrix, ctx: &FieldCtx) -> FieldMatrix {
        assert_eq!(self.ell, other.ell, "dimension mismatch");
        let n = self.ell;
        let mut out = FieldMatrix::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let cur = out.get(i, j);
                    out.set(i, j, ctx.add(cur, ctx.mul(a, other.get(k, j))));
                }
            }
        }
        out
    }

    /// `self^e` by square-and-multiply, `e >= 1`.
    pub fn pow(&self, e: u64, ctx: &FieldCtx) -> Result<FieldMatrix> {
        if e == 0 {
            return invalid("matrix power exponent must be positive");
        }
        let mut base = self.clone();
        let mut acc: Option<FieldMatrix> = None;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    Some(a) => a.mul(&base, ctx),
                    None => base.clone(),
                });
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base, ctx);
            }
        }
        Ok(acc.expect("e >= 1"))
    }

    pub fn map(&self, f: impl Fn(FieldElem) -> FieldElem) -> FieldMatrix {
        FieldMatrix {
            ell: self.ell,
            entries: self.entries.iter().map(|&e| f(e)).collect(),
        }
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Vec<Vec<FieldElem>> {
        rows.iter()
            .map(|&r| cols.iter().map(|&c| self.get(r, c)).collect())
            .collect()
    }

    pub fn determinant(&self, ctx: &FieldCtx) -> FieldElem {
        determinant(self.rows(), ctx)
    }
}

/// Determinant by in-place Gaussian elimination. The pivot is the first
/// nonzero entry of the column; characteristic 2 makes row swaps sign-free.
pub fn determinant(mut a: Vec<Vec<FieldElem>>, ctx: &FieldCtx) -> FieldElem {
    let n = a.len();
    let mut det = FieldElem::ONE;
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return FieldElem::ZERO;
        };
        a.swap(col, p);
        let pivot = a[col][col];
        det = ctx.mul(det, pivot);
        let pinv = ctx.inv(pivot).expect("nonzero pivot");
        for r in col + 1..n {
            let f = a[r][col];
            if f.is_zero() {
                continue;
            }
            let f = ctx.mul(f, pinv);
            let (top, bottom) = a.split_at_mut(r);
            for (x, &p) in bottom[0][col..].iter_mut().zip(&top[col][col..]) {
                *x = ctx.add(*x, ctx.mul(f, p));
            }
        }
    }
    det
}

impl fmt::Debug for FieldMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.entries.chunks(self.ell))
            .finish()
    }
}

/// Bottom row `[c_0, c_1, ..., c_{ell-1}]` of a companion matrix.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoeffVec(Vec<FieldElem>);

impl CoeffVec {
    pub fn new(coeffs: Vec<FieldElem>) -> Result<Self> {
        if !(1..=MAX_ELL).contains(&coeffs.len()) {
            return invalid(format!(
                "coefficient vector length {} outside 1..={MAX_ELL}",
                coeffs.len()
            ));
        }
        Ok(CoeffVec(coeffs))
    }

    /// Builds `[α^k0, α^k1, ...]`; negative exponents are inverses.
    pub fn from_alpha_powers(exponents: &[i64], ctx: &FieldCtx) -> Result<Self> {
        let coeffs = exponents
            .iter()
            .map(|&k| ctx.alpha_pow(k))
            .collect::<Result<Vec<_>>>()?;
        CoeffVec::new(coeffs)
    }

    pub fn ell(&self) -> usize {
        self.0.len()
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.0
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.0.len();
        (1..n).all(|i| self.0[i] == self.0[n - i])
    }

    /// `[c_0, c_{ell-1}, ..., c_1]`: the recursive layer of the inverse
    /// matrix, up to conjugation by a permutation.
    pub fn inverse_symmetric(&self) -> CoeffVec {
        let mut out = Vec::with_capacity(self.0.len());
        out.push(self.0[0]);
        out.extend(self.0[1..].iter().rev());
        CoeffVec(out)
    }

    pub fn map(&self, f: impl Fn(FieldElem) -> FieldElem) -> CoeffVec {
        CoeffVec(self.0.iter().map(|&c| f(c)).collect())
    }

    /// Coefficient-wise squaring.
    pub fn frobenius(&self, ctx: &FieldCtx) -> CoeffVec {
        self.map(|c| ctx.frobenius(c))
    }

    /// Distinct images under repeated squaring, starting with `self`.
    pub fn frobenius_orbit(&self, ctx: &FieldCtx) -> Vec<CoeffVec> {
        let mut orbit = vec![self.clone()];
        loop {
            let next = orbit.last().expect("nonempty").frobenius(ctx);
            if next == *self {
                return orbit;
            }
            orbit.push(next);
        }
    }

    /// Lexicographically smallest member of the Frobenius orbit.
    pub fn class_representative(&self, ctx: &FieldCtx) -> CoeffVec {
        self.frobenius_orbit(ctx)
            .into_iter()
            .min()
            .expect("nonempty orbit")
    }

    /// The `ell x ell` companion matrix: superdiagonal ones and this vector as
    /// the last row. Requires `c_0 = 1`.
    pub fn companion(&self) -> Result<FieldMatrix> {
        if self.0[0] != FieldElem::ONE {
            return invalid(format!(
                "companion matrix needs c_0 = 1, got {:?}",
                self.0[0]
            ));
        }
        let ell = self.0.len();
        let mut m = FieldMatrix::zero(ell);
        for i in 0..ell - 1 {
            m.set(i, i + 1, FieldElem::ONE);
        }
        for (j, &c) in self.0.iter().enumerate() {
            m.set(ell - 1, j, c);
        }
        Ok(m)
    }

    /// `companion^ell`, the full diffusion matrix.
    pub fn diffusion_matrix(&self, ctx: &FieldCtx) -> Result<FieldMatrix> {
        self.companion()?.pow(self.ell() as u64, ctx)
    }
}

impl fmt::Debug for CoeffVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.0).finish()
    }
}

/// Contract-name wrappers.
pub fn companion(cv: &CoeffVec) -> Result<FieldMatrix> {
    cv.companion()
}

pub fn mat_pow(m: &FieldMatrix, e: u64, ctx: &FieldCtx) -> Result<FieldMatrix> {
    m.pow(e, ctx)
}

pub fn inverse_symmetric(cv: &CoeffVec) -> CoeffVec {
    cv.inverse_symmetric()
}

pub fn frobenius_orbit(cv: &CoeffVec, ctx: &FieldCtx) -> Vec<CoeffVec> {
    cv.frobenius_orbit(ctx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::BinPoly;

    fn gf16() -> FieldCtx {
        FieldCtx::new(BinPoly::new(0x13)).unwrap()
    }

    #[test]
    fn companion_layout() {
        let ctx = gf16();
        let a = ctx.alpha();
        let m = CoeffVec::new(vec![FieldElem::ONE, a])
            .unwrap()
            .companion()
            .unwrap();
        assert_eq!(
            m.rows(),
            vec![
                vec![FieldElem::ZERO, FieldElem::ONE],
                vec![FieldElem::ONE, a]
            ]
        );

        let gf8 = FieldCtx::new(BinPoly::new(0xb)).unwrap();
        let cv = CoeffVec::from_alpha_powers(&[0, 3, 1, 3], &gf8).unwrap();
        let m = cv.companion().unwrap();
        let (o, z) = (FieldElem::ONE, FieldElem::ZERO);
        assert_eq!(m.row(0), &[z, o, z, z]);
        assert_eq!(m.row(1), &[z, z, o, z]);
        assert_eq!(m.row(2), &[z, z, z, o]);
        assert_eq!(m.row(3), cv.coeffs());
        assert_eq!(m.determinant(&gf8), FieldElem::ONE);
    }

    #[test]
    fn companion_rejects_bad_c0() {
        let cv = CoeffVec::new(vec![FieldElem(2), FieldElem(1)]).unwrap();
        assert!(cv.companion().is_err());
    }

    #[test]
    fn powers() {
        let ctx = gf16();
        let a = ctx.alpha();
        let id = FieldMatrix::identity(5);
        assert_eq!(id.pow(7, &ctx).unwrap(), id);
        let c = CoeffVec::new(vec![FieldElem::ONE, a])
            .unwrap()
            .companion()
            .unwrap();
        // [[0,1],[1,a]]^2 = [[1,a],[a,a^2+1]]
        let a2p1 = ctx.add(ctx.mul(a, a), FieldElem::ONE);
        let want = FieldMatrix::from_rows(vec![vec![FieldElem::ONE, a], vec![a, a2p1]]).unwrap();
        assert_eq!(c.pow(2, &ctx).unwrap(), want);
        assert!(c.pow(0, &ctx).is_err());
        // square-and-multiply agrees with repeated multiplication
        let cv = CoeffVec::from_alpha_powers(&[0, 5, 9, 1, 14], &ctx).unwrap();
        let c = cv.companion().unwrap();
        let mut slow = c.clone();
        for _ in 1..5 {
            slow = slow.mul(&c, &ctx);
        }
        assert_eq!(cv.diffusion_matrix(&ctx).unwrap(), slow);
        assert_eq!(slow.determinant(&ctx), FieldElem::ONE);
    }

    #[test]
    fn inverse_symmetric_examples() {
        let v = |xs: &[u16]| CoeffVec::new(xs.iter().map(|&x| FieldElem(x)).collect()).unwrap();
        assert_eq!(v(&[1, 2, 3, 4]).inverse_symmetric(), v(&[1, 4, 3, 2]));
        let sym = v(&[1, 2, 3, 2]);
        assert!(sym.is_symmetric());
        assert_eq!(sym.inverse_symmetric(), sym);
    }

    #[test]
    fn inverse_symmetric_is_the_inverse_layer_up_to_reversal() {
        // C(c)^-1 is conjugate to C(reversed c) by the reversal permutation
        // (for c_0 = 1), so the two diffusion matrices are inverse up to
        // reversing rows and columns.
        let ctx = gf16();
        let cv = CoeffVec::from_alpha_powers(&[0, 3, 7, 11, 2], &ctx).unwrap();
        let m = cv.diffusion_matrix(&ctx).unwrap();
        let r = cv.inverse_symmetric().diffusion_matrix(&ctx).unwrap();
        let n = m.ell();
        let mut flipped = FieldMatrix::zero(n);
        for i in 0..n {
            for j in 0..n {
                flipped.set(i, j, r.get(n - 1 - i, n - 1 - j));
            }
        }
        assert_eq!(m.mul(&flipped, &ctx), FieldMatrix::identity(n));
    }

    #[test]
    fn orbits() {
        let ctx = gf16();
        let ones = CoeffVec::new(vec![FieldElem::ONE; 4]).unwrap();
        assert_eq!(ones.frobenius_orbit(&ctx).len(), 1);
        let cv = CoeffVec::from_alpha_powers(&[0, 3, 4, 12, 8, 12, 4, 3], &ctx).unwrap();
        let orbit = cv.frobenius_orbit(&ctx);
        assert_eq!(orbit.len(), 4);
        assert_eq!(
            orbit[1],
            CoeffVec::from_alpha_powers(&[0, 6, 8, 9, 1, 9, 8, 6], &ctx).unwrap()
        );
    }

    #[test]
    fn determinant_examples() {
        let ctx = gf16();
        let one = FieldElem::ONE;
        assert_eq!(
            determinant(vec![vec![one, one], vec![one, one]], &ctx),
            FieldElem::ZERO
        );
        let a = ctx.alpha();
        // det [[1, a], [a, 1]] = 1 + a^2
        let d = determinant(vec![vec![one, a], vec![a, one]], &ctx);
        assert_eq!(d, ctx.add(one, ctx.mul(a, a)));
    }
}
