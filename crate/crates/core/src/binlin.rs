//! Binary linear operators `L` and the block matrices `M(X <- L)`.
//!
//! A [`BinMatrix`] of dimension `n <= 128` stores row `i` as a bitmask whose
//! bit `j` is entry `(i, j)`; it acts on column vectors, with bit `j` of a
//! word being coordinate `j`. Shift and rotate operators use bit 0 as the
//! least significant bit: `shl k` sends bit `i` to bit `i + k` (overflow is
//! dropped) and `rotr k` sends bit `i` to bit `i - k mod n`.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::field::FieldCtx;
use crate::minors::{is_mds, MinorReport};
use crate::oracle::{min_weight_sum, ORACLE_MAX_BITS};
use crate::poly::BinPoly;
use crate::symbolic::PolyMatrix;

pub const MAX_BIN_DIM: usize = 128;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinMatrix {
    n: usize,
    rows: Vec<u128>,
}

fn row_mask(n: usize) -> u128 {
    if n == 128 {
        u128::MAX
    } else {
        (1u128 << n) - 1
    }
}

impl BinMatrix {
    pub fn zero(n: usize) -> Self {
        assert!((1..=MAX_BIN_DIM).contains(&n), "dimension {n} out of range");
        BinMatrix {
            n,
            rows: vec![0; n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for (i, r) in m.rows.iter_mut().enumerate() {
            *r = 1 << i;
        }
        m
    }

    /// Rows as bitmasks; fails when a row has a bit at or beyond `rows.len()`.
    pub fn from_rows(rows: Vec<u128>) -> Result<Self> {
        let n = rows.len();
        if !(1..=MAX_BIN_DIM).contains(&n) {
            return invalid(format!(
                "binary matrix dimension {n} outside 1..={MAX_BIN_DIM}"
            ));
        }
        if let Some(r) = rows.iter().find(|&&r| r & !row_mask(n) != 0) {
            return invalid(format!("row {r:#x} is wider than the {n}x{n} matrix"));
        }
        Ok(BinMatrix { n, rows })
    }

    /// Companion matrix realizing `p`: its minimal polynomial is `p`.
    pub fn companion_of(p: BinPoly) -> Result<Self> {
        let n = p.degree();
        if n < 1 {
            return invalid(format!("companion of the constant {p:#x}"));
        }
        let n = n as usize;
        // L e_i = e_{i+1}, L e_{n-1} = sum p_i e_i
        let mut m = Self::zero(n);
        for i in 1..n {
            m.rows[i] |= 1 << (i - 1);
        }
        for i in 0..n {
            if p.coeff(i as u32) {
                m.rows[i] |= 1 << (n - 1);
            }
        }
        Ok(m)
    }

    pub fn block_diag(blocks: &[BinMatrix]) -> Result<Self> {
        let n: usize = blocks.iter().map(|b| b.n).sum();
        if !(1..=MAX_BIN_DIM).contains(&n) {
            return invalid(format!("block diagonal dimension {n} out of range"));
        }
        let mut rows = Vec::with_capacity(n);
        let mut off = 0;
        for b in blocks {
            rows.extend(b.rows.iter().map(|&r| r << off));
            off += b.n;
        }
        Ok(BinMatrix { n, rows })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[u128] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i] >> j & 1 == 1
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|&r| r == 0)
    }

    /// `L x` for a column vector `x`.
    pub fn apply(&self, x: u128) -> u128 {
        self.rows.iter().enumerate().fold(0, |acc, (i, &r)| {
            acc | (((r & x).count_ones() & 1) as u128) << i
        })
    }

    pub fn column(&self, j: usize) -> u128 {
        self.apply(1 << j)
    }

    pub fn add(&self, other: &BinMatrix) -> BinMatrix {
        assert_eq!(self.n, other.n, "dimension mismatch");
        BinMatrix {
            n: self.n,
            rows: self
                .rows
                .iter()
                .zip(&other.rows)
                .map(|(a, b)| a ^ b)
                .collect(),
        }
    }

    pub fn mul(&self, other: &BinMatrix) -> BinMatrix {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let rows = self
            .rows
            .iter()
            .map(|&r| {
                let mut acc = 0u128;
                let mut bits = r;
                while bits != 0 {
                    let k = bits.trailing_zeros() as usize;
                    acc ^= other.rows[k];
                    bits &= bits - 1;
                }
                acc
            })
            .collect();
        BinMatrix { n: self.n, rows }
    }

    /// `p(L)` by Horner's rule.
    pub fn eval_poly(&self, p: BinPoly) -> BinMatrix {
        let mut acc = BinMatrix::zero(self.n);
        if p.is_zero() {
            return acc;
        }
        let id = BinMatrix::identity(self.n);
        for i in (0..=p.degree() as u32).rev() {
            acc = acc.mul(self);
            if p.coeff(i) {
                acc = acc.add(&id);
            }
        }
        acc
    }

    /// Monic minimal polynomial: lcm over the standard basis of each vector's
    /// Krylov dependency `e_j, L e_j, L^2 e_j, ...`.
    pub fn min_poly(&self) -> Result<BinPoly> {
        if self.n > 63 {
            return invalid(format!(
                "minimal polynomial supports dimension <= 63, got {}",
                self.n
            ));
        }
        let mut acc = BinPoly::ONE;
        for j in 0..self.n {
            let local = self.vector_min_poly(1 << j);
            let g = acc.gcd(local)?;
            acc = acc.exact_div(g)?.mul(local)?;
        }
        Ok(acc)
    }

    /// Monic generator of `{p : p(L) v = 0}`.
    fn vector_min_poly(&self, v: u128) -> BinPoly {
        // basis[pivot] = (vector with top bit `pivot`, combination of powers)
        let mut basis: Vec<Option<(u128, u64)>> = vec![None; self.n];
        let mut w = v;
        for k in 0..=self.n {
            let mut x = w;
            let mut comb = 1u64 << k;
            while x != 0 {
                let p = 127 - x.leading_zeros() as usize;
                match basis[p] {
                    Some((bv, bc)) => {
                        x ^= bv;
                        comb ^= bc;
                    }
                    None => break,
                }
            }
            if x == 0 {
                return BinPoly::new(comb);
            }
            let p = 127 - x.leading_zeros() as usize;
            basis[p] = Some((x, comb));
            w = self.apply(w);
        }
        unreachable!("n + 1 vectors in dimension n are dependent")
    }
}

impl fmt::Debug for BinMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinMatrix{}", self.n)?;
        f.debug_list()
            .entries(self.rows.iter().map(|r| format!("{r:#x}")))
            .finish()
    }
}

/// Contract-name wrapper.
pub fn min_poly(l: &BinMatrix) -> Result<BinPoly> {
    l.min_poly()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShiftKind {
    Shl,
    Shr,
    Rotl,
    Rotr,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ShiftTerm {
    pub kind: ShiftKind,
    pub amount: usize,
}

/// XOR of shifted/rotated copies of the input, as a text form like
/// `shl2^rotr1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftSpec(pub Vec<ShiftTerm>);

impl FromStr for ShiftSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let terms = s
            .split('^')
            .map(|tok| {
                let tok = tok.trim();
                let split = tok.find(|c: char| c.is_ascii_digit()).unwrap_or(tok.len());
                let (kind, amount) = tok.split_at(split);
                let kind = match kind {
                    "shl" => ShiftKind::Shl,
                    "shr" => ShiftKind::Shr,
                    "rotl" => ShiftKind::Rotl,
                    "rotr" => ShiftKind::Rotr,
                    _ => return Err(Error::Parse(format!("unknown shift term {tok:?}"))),
                };
                let amount = amount
                    .parse()
                    .map_err(|_| Error::Parse(format!("missing shift amount in {tok:?}")))?;
                Ok(ShiftTerm { kind, amount })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ShiftSpec(terms))
    }
}

impl fmt::Display for ShiftSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("^")?;
            }
            let k = match t.kind {
                ShiftKind::Shl => "shl",
                ShiftKind::Shr => "shr",
                ShiftKind::Rotl => "rotl",
                ShiftKind::Rotr => "rotr",
            };
            write!(f, "{k}{}", t.amount)?;
        }
        Ok(())
    }
}

/// The `s x s` matrix of `x -> XOR of the listed shifts of x`.
pub fn shift_rotate_op(s: usize, shifts: &[ShiftTerm]) -> Result<BinMatrix> {
    if !(1..=MAX_BIN_DIM).contains(&s) {
        return invalid(format!("operator width {s} outside 1..={MAX_BIN_DIM}"));
    }
    let mut m = BinMatrix::zero(s);
    for t in shifts {
        if t.amount >= s {
            return invalid(format!(
                "shift amount {} must be below the width {s}",
                t.amount
            ));
        }
        let k = t.amount;
        for i in 0..s {
            // output bit i reads input bit `src`
            let src = match t.kind {
                ShiftKind::Shl => i.checked_sub(k),
                ShiftKind::Shr => Some(i + k).filter(|&j| j < s),
                ShiftKind::Rotl => Some((i + s - k) % s),
                ShiftKind::Rotr => Some((i + k) % s),
            };
            if let Some(j) = src {
                m.rows[i] ^= 1 << j;
            }
        }
    }
    Ok(m)
}

/// An `(ell*s) x (ell*s)` binary matrix viewed as `ell x ell` blocks of size `s`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BlockMatrix {
    ell: usize,
    s: usize,
    matrix: BinMatrix,
}

impl BlockMatrix {
    pub fn new(ell: usize, s: usize, matrix: BinMatrix) -> Result<Self> {
        if ell * s != matrix.dim() {
            return invalid(format!(
                "{ell} blocks of size {s} do not tile dimension {}",
                matrix.dim()
            ));
        }
        Ok(BlockMatrix { ell, s, matrix })
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn matrix(&self) -> &BinMatrix {
        &self.matrix
    }

    pub fn block(&self, bi: usize, bj: usize) -> BinMatrix {
        let s = self.s;
        let rows = (0..s)
            .map(|a| (self.matrix.rows[bi * s + a] >> (bj * s)) & row_mask(s))
            .collect();
        BinMatrix { n: s, rows }
    }

    /// One XOR equation per output bit, e.g. `y[3] = x[0] ^ x[7]`.
    pub fn xor_program(&self) -> Vec<String> {
        self.matrix
            .rows
            .iter()
            .enumerate()
            .map(|(i, &r)| {
                let terms: Vec<String> = (0..self.matrix.n)
                    .filter(|&j| r >> j & 1 == 1)
                    .map(|j| format!("x[{j}]"))
                    .collect();
                let rhs = if terms.is_empty() {
                    "0".to_string()
                } else {
                    terms.join(" ^ ")
                };
                format!("y[{i}] = {rhs}")
            })
            .collect()
    }
}

/// Replaces each entry `m(X)` by the block `m(L)`.
pub fn instantiate(m: &PolyMatrix, l: &BinMatrix) -> Result<BlockMatrix> {
    let (ell, s) = (m.size(), l.dim());
    if ell * s > MAX_BIN_DIM {
        return invalid(format!(
            "block matrix of dimension {ell}*{s} exceeds {MAX_BIN_DIM}"
        ));
    }
    let mut big = BinMatrix::zero(ell * s);
    for bi in 0..ell {
        for bj in 0..ell {
            let block = l.eval_poly(m.get(bi, bj));
            for a in 0..s {
                big.rows[bi * s + a] |= block.rows[a] << (bj * s);
            }
        }
    }
    BlockMatrix::new(ell, s, big)
}

/// Exact branch number with weights counted in `s`-bit symbols.
pub fn bit_branch_oracle(b: &BlockMatrix) -> Result<u32> {
    let n = b.matrix.dim();
    if n > ORACLE_MAX_BITS {
        return Err(Error::SizeLimit(format!(
            "bit branch oracle needs ell*s <= {ORACLE_MAX_BITS}, got {}*{}",
            b.ell, b.s
        )));
    }
    let columns: Vec<u64> = (0..n).map(|j| b.matrix.column(j) as u64).collect();
    min_weight_sum(&columns, b.s)
}

/// Verdict for one irreducible factor of `Min_L`.
#[derive(Clone, Debug)]
pub struct FactorVerdict {
    pub factor: BinPoly,
    pub multiplicity: u32,
    pub report: MinorReport,
}

/// Per-factor MDS verdicts of `M(X <- α_i)` over F2[X]/p_i for the distinct
/// irreducible factors `p_i` of `Min_L`.
pub fn branch_breakdown(m: &PolyMatrix, l: &BinMatrix) -> Result<Vec<FactorVerdict>> {
    let p = l.min_poly()?;
    p.factorize()?
        .into_iter()
        .map(|(factor, multiplicity)| {
            let ctx = FieldCtx::new(factor)?;
            let report = is_mds(&m.eval_at(&ctx), &ctx);
            Ok(FactorVerdict {
                factor,
                multiplicity,
                report,
            })
        })
        .collect()
}

/// Whether `M(X <- L)` has maximal branch number, for any `L`.
pub fn check_branch_general(m: &PolyMatrix, l: &BinMatrix) -> Result<bool> {
    Ok(branch_breakdown(m, l)?.iter().all(|v| v.report.is_mds))
}
