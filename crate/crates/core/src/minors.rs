//! MDS verification: every square submatrix must have an invertible
//! determinant.
//!
//! The main checker builds all minors of size `k` from the minors of size
//! `k - 1` by Laplace expansion along the first selected row. In
//! characteristic 2 the expansion carries no signs, and it never divides, so
//! the same routine serves fields and the quotient rings F2[X]/m. Sizes are
//! visited in ascending order and, within a size, row sets then column sets in
//! lexicographic order; the first non-invertible minor stops the check.

use std::sync::OnceLock;

use itertools::Itertools;

use crate::error::{invalid, Result};
use crate::field::{FieldCtx, FieldElem};
use crate::matrix::{determinant, FieldMatrix};
use crate::poly::{mul_mod_unchecked, BinPoly};
use crate::symbolic::PolyMatrix;

/// Largest size handled by the incremental checker; beyond it the subset
/// rank table no longer fits comfortably and the per-minor route is used.
pub const INCREMENTAL_MAX_ELL: usize = 20;

/// Outcome of an MDS check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinorReport {
    pub is_mds: bool,
    /// Row and column sets of the first singular submatrix.
    pub first_failure: Option<(Vec<usize>, Vec<usize>)>,
    /// Determinants evaluated, including the failing one.
    pub minors_checked: u64,
}

/// Commutative ring of characteristic 2 in which minors are evaluated.
pub trait MinorRing {
    type Elem: Copy + Default;
    fn mul(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn add(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn is_unit(&self, a: Self::Elem) -> bool;
}

impl MinorRing for FieldCtx {
    type Elem = u16;

    #[inline]
    fn mul(&self, a: u16, b: u16) -> u16 {
        self.mul_raw(a, b)
    }

    #[inline]
    fn add(&self, a: u16, b: u16) -> u16 {
        a ^ b
    }

    #[inline]
    fn is_unit(&self, a: u16) -> bool {
        a != 0
    }
}

/// F2[X]/m with elements kept reduced.
#[derive(Clone, Copy, Debug)]
pub struct QuotientRing {
    modulus: BinPoly,
}

impl QuotientRing {
    pub fn new(modulus: BinPoly) -> Result<Self> {
        if modulus.degree() < 1 {
            return invalid(format!(
                "ring modulus {modulus:#x} must have positive degree"
            ));
        }
        Ok(QuotientRing { modulus })
    }
}

impl MinorRing for QuotientRing {
    type Elem = BinPoly;

    fn mul(&self, a: BinPoly, b: BinPoly) -> BinPoly {
        mul_mod_unchecked(a, b, self.modulus)
    }

    fn add(&self, a: BinPoly, b: BinPoly) -> BinPoly {
        a.add(b)
    }

    fn is_unit(&self, a: BinPoly) -> bool {
        !a.is_zero() && a.gcd(self.modulus).map(BinPoly::is_one).unwrap_or(false)
    }
}

/// k-subsets of `0..n` as bitmasks, in lexicographic order of their sorted
/// index lists, plus the inverse map from bitmask to position.
struct SubsetTable {
    by_size: Vec<Vec<u32>>,
    rank: Vec<u32>,
}

impl SubsetTable {
    fn build(n: usize) -> Self {
        let mut rank = vec![0u32; 1 << n];
        let mut by_size = vec![vec![0u32]];
        for k in 1..=n {
            let sets: Vec<u32> = (0..n)
                .combinations(k)
                .map(|c| c.iter().fold(0u32, |m, &i| m | (1 << i)))
                .collect();
            for (i, &s) in sets.iter().enumerate() {
                rank[s as usize] = i as u32;
            }
            by_size.push(sets);
        }
        SubsetTable { by_size, rank }
    }

    fn get(n: usize) -> &'static SubsetTable {
        static TABLES: OnceLock<Vec<OnceLock<SubsetTable>>> = OnceLock::new();
        let tables =
            TABLES.get_or_init(|| (0..=INCREMENTAL_MAX_ELL).map(|_| OnceLock::new()).collect());
        tables[n].get_or_init(|| SubsetTable::build(n))
    }
}

fn bits_to_indices(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask >> i & 1 == 1).collect()
}

/// Reusable incremental minor checker; scratch buffers survive across calls,
/// which matters inside the search loop.
pub struct MinorChecker<E> {
    prev: Vec<E>,
    cur: Vec<E>,
}

impl<E: Copy + Default> Default for MinorChecker<E> {
    fn default() -> Self {
        MinorChecker {
            prev: Vec::new(),
            cur: Vec::new(),
        }
    }
}

impl<E: Copy + Default> MinorChecker<E> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Checks the `n x n` row-major matrix `m`.
    pub fn check<R: MinorRing<Elem = E>>(&mut self, ring: &R, n: usize, m: &[E]) -> MinorReport {
        assert!(
            (1..=INCREMENTAL_MAX_ELL).contains(&n),
            "size {n} outside the incremental checker range"
        );
        assert_eq!(m.len(), n * n);
        let subsets = SubsetTable::get(n);
        let mut checked = 0u64;

        // size 1: the entries, row-major is already lexicographic
        for (idx, &e) in m.iter().enumerate() {
            checked += 1;
            if !ring.is_unit(e) {
                return failure(vec![idx / n], vec![idx % n], checked);
            }
        }
        self.prev.clear();
        self.prev.extend_from_slice(m);

        for k in 2..=n {
            let sets = &subsets.by_size[k];
            let width_prev = subsets.by_size[k - 1].len();
            let width = sets.len();
            self.cur.clear();
            self.cur.resize(width * width, E::default());
            for (ri, &rows) in sets.iter().enumerate() {
                let r0 = rows.trailing_zeros() as usize;
                let sub_rows = rows & (rows - 1);
                let base = subsets.rank[sub_rows as usize] as usize * width_prev;
                let prev_row = &self.prev[base..base + width_prev];
                let mrow = &m[r0 * n..(r0 + 1) * n];
                let out = &mut self.cur[ri * width..(ri + 1) * width];
                for (ci, &cols) in sets.iter().enumerate() {
                    let mut acc = E::default();
                    let mut rest = cols;
                    while rest != 0 {
                        let c = rest.trailing_zeros() as usize;
                        let minor = prev_row[subsets.rank[(cols ^ (1 << c)) as usize] as usize];
                        acc = ring.add(acc, ring.mul(mrow[c], minor));
                        rest &= rest - 1;
                    }
                    checked += 1;
                    if !ring.is_unit(acc) {
                        return failure(bits_to_indices(rows), bits_to_indices(cols), checked);
                    }
                    out[ci] = acc;
                }
            }
            std::mem::swap(&mut self.prev, &mut self.cur);
        }
        MinorReport {
            is_mds: true,
            first_failure: None,
            minors_checked: checked,
        }
    }
}

fn failure(rows: Vec<usize>, cols: Vec<usize>, checked: u64) -> MinorReport {
    MinorReport {
        is_mds: false,
        first_failure: Some((rows, cols)),
        minors_checked: checked,
    }
}

/// Full MDS check over the field, ascending sizes with early abort.
pub fn is_mds(m: &FieldMatrix, ctx: &FieldCtx) -> MinorReport {
    if m.ell() > INCREMENTAL_MAX_ELL {
        return is_mds_by_elimination(m, ctx);
    }
    let raw: Vec<u16> = m.entries().iter().map(|e| e.value()).collect();
    MinorChecker::new().check(ctx, m.ell(), &raw)
}

/// Same verdict, order and witness as [`is_mds`], evaluating every minor
/// independently by Gaussian elimination.
pub fn is_mds_by_elimination(m: &FieldMatrix, ctx: &FieldCtx) -> MinorReport {
    let n = m.ell();
    let mut checked = 0u64;
    for k in 1..=n {
        for rows in (0..n).combinations(k) {
            for cols in (0..n).combinations(k) {
                checked += 1;
                if determinant(m.submatrix(&rows, &cols), ctx) == FieldElem::ZERO {
                    return failure(rows, cols.clone(), checked);
                }
            }
        }
    }
    MinorReport {
        is_mds: true,
        first_failure: None,
        minors_checked: checked,
    }
}

/// MDS check over F2[X]/m: every minor must be coprime to `m`.
pub fn is_mds_ring(m_sym: &PolyMatrix, modulus: BinPoly) -> Result<bool> {
    Ok(ring_report(m_sym, modulus)?.is_mds)
}

pub fn ring_report(m_sym: &PolyMatrix, modulus: BinPoly) -> Result<MinorReport> {
    let ring = QuotientRing::new(modulus)?;
    let n = m_sym.size();
    if n > INCREMENTAL_MAX_ELL {
        return invalid(format!(
            "ring MDS check supports sizes up to {INCREMENTAL_MAX_ELL}"
        ));
    }
    let reduced = m_sym
        .entries()
        .iter()
        .map(|e| e.rem(modulus))
        .collect::<Result<Vec<_>>>()?;
    Ok(MinorChecker::new().check(&ring, n, &reduced))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::CoeffVec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gf16() -> FieldCtx {
        FieldCtx::new(BinPoly::new(0x13)).unwrap()
    }

    /// Textbook cofactor expansion, the slowest and most literal route.
    fn laplace(a: &[Vec<FieldElem>], ctx: &FieldCtx) -> FieldElem {
        if a.len() == 1 {
            return a[0][0];
        }
        let mut acc = FieldElem::ZERO;
        for j in 0..a.len() {
            let minor: Vec<Vec<FieldElem>> = a[1..]
                .iter()
                .map(|r| {
                    r.iter()
                        .enumerate()
                        .filter(|&(c, _)| c != j)
                        .map(|(_, &v)| v)
                        .collect()
                })
                .collect();
            acc = ctx.add(acc, ctx.mul(a[0][j], laplace(&minor, ctx)));
        }
        acc
    }

    fn laplace_is_mds(m: &FieldMatrix, ctx: &FieldCtx) -> bool {
        let n = m.ell();
        (1..=n).all(|k| {
            (0..n).combinations(k).all(|rows| {
                (0..n)
                    .combinations(k)
                    .all(|cols| !laplace(&m.submatrix(&rows, &cols), ctx).is_zero())
            })
        })
    }

    #[test]
    fn zero_entry_gives_one_by_one_witness() {
        let ctx = gf16();
        let mut m = FieldMatrix::identity(3);
        m = m.map(|_| FieldElem(3));
        m.set(1, 2, FieldElem::ZERO);
        let r = is_mds(&m, &ctx);
        assert!(!r.is_mds);
        assert_eq!(r.first_failure, Some((vec![1], vec![2])));
        assert_eq!(r.minors_checked, 6);
    }

    #[test]
    fn singular_two_by_two() {
        let ctx = gf16();
        let m = FieldMatrix::from_rows(vec![vec![FieldElem::ONE; 2]; 2]).unwrap();
        let r = is_mds(&m, &ctx);
        assert_eq!(r.first_failure, Some((vec![0, 1], vec![0, 1])));
        assert_eq!(r.minors_checked, 5);
    }

    #[test]
    fn published_eight_by_eight_counts_every_minor() {
        let ctx = gf16();
        let s0 = CoeffVec::from_alpha_powers(&[0, 3, 4, 12, 8, 12, 4, 3], &ctx).unwrap();
        let m = s0.diffusion_matrix(&ctx).unwrap();
        let r = is_mds(&m, &ctx);
        assert!(r.is_mds);
        assert_eq!(r.first_failure, None);
        // sum_k C(8,k)^2 = C(16,8) - 1
        assert_eq!(r.minors_checked, 12869);
        assert_eq!(is_mds_by_elimination(&m, &ctx), r);
    }

    #[test]
    fn incremental_elimination_and_laplace_agree_on_random_matrices() {
        let ctx = FieldCtx::new(BinPoly::new(0xb)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut positives = 0;
        for trial in 0..100 {
            let n = 2 + trial % 5;
            // mostly nonzero entries so larger minors actually get reached
            let rows = (0..n)
                .map(|_| (0..n).map(|_| FieldElem(rng.gen_range(1..8))).collect())
                .collect();
            let m = FieldMatrix::from_rows(rows).unwrap();
            let fast = is_mds(&m, &ctx);
            assert_eq!(fast, is_mds_by_elimination(&m, &ctx));
            assert_eq!(fast.is_mds, laplace_is_mds(&m, &ctx));
            positives += fast.is_mds as usize;
        }
        assert!(positives > 0);
    }

    #[test]
    fn ring_check_rejects_constant_modulus() {
        let m = PolyMatrix::identity(2);
        assert!(is_mds_ring(&m, BinPoly::ONE).is_err());
        assert!(is_mds_ring(&m, BinPoly::ZERO).is_err());
    }

    #[test]
    fn ring_check_with_irreducible_modulus_matches_field() {
        let ctx = gf16();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let entries: Vec<BinPoly> =
                (0..9).map(|_| BinPoly::new(rng.gen_range(1..64))).collect();
            let sym = PolyMatrix::from_entries(3, entries).unwrap();
            let at_alpha = sym.eval_at(&ctx);
            assert_eq!(
                is_mds_ring(&sym, ctx.modulus()).unwrap(),
                is_mds(&at_alpha, &ctx).is_mds
            );
        }
    }

    #[test]
    fn ring_check_satisfies_chinese_remainder_split() {
        let p1 = BinPoly::new(0b111);
        let p2 = BinPoly::new(0b1011);
        let (f1, f2) = (FieldCtx::new(p1).unwrap(), FieldCtx::new(p2).unwrap());
        let m = p1.mul(p2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut seen = [0usize; 2];
        for _ in 0..100 {
            let entries: Vec<BinPoly> =
                (0..9).map(|_| BinPoly::new(rng.gen_range(0..32))).collect();
            let sym = PolyMatrix::from_entries(3, entries).unwrap();
            let split =
                is_mds(&sym.eval_at(&f1), &f1).is_mds && is_mds(&sym.eval_at(&f2), &f2).is_mds;
            assert_eq!(is_mds_ring(&sym, m).unwrap(), split);
            seen[split as usize] += 1;
        }
        assert!(seen[0] > 0);
    }

    #[test]
    fn ring_check_for_prime_power_reduces_to_the_prime() {
        let p1 = BinPoly::new(0b111);
        let f1 = FieldCtx::new(p1).unwrap();
        let m = p1.mul(p1).unwrap().mul(p1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut positives = 0;
        for _ in 0..300 {
            let entries: Vec<BinPoly> =
                (0..4).map(|_| BinPoly::new(rng.gen_range(0..64))).collect();
            let sym = PolyMatrix::from_entries(2, entries).unwrap();
            let want = is_mds(&sym.eval_at(&f1), &f1).is_mds;
            assert_eq!(is_mds_ring(&sym, m).unwrap(), want);
            positives += want as usize;
        }
        assert!(positives > 0);
    }
}
