//! The finite field GF(2^d) = F2[X]/p(X) for an irreducible `p` of degree
//! `1 <= d <= 16`.
//!
//! Elements are `d`-bit masks read as polynomials in `α`, the class of `X`.
//! Multiplication goes through log/antilog tables built from the
//! smallest-bitmask generator of the multiplicative group; for `d <= 8` a full
//! product table is kept as well, since the search kernels live on it.

use std::fmt;

use crate::error::{invalid, Error, Result};
use crate::poly::{mul_mod_unchecked, BinPoly};

pub const MAX_FIELD_DEGREE: u32 = 16;
const PRODUCT_TABLE_MAX_DEGREE: u32 = 8;

/// A field element as a bitmask. It carries no reference to its field.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FieldElem(pub u16);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    pub const fn value(self) -> u16 {
        self.0
    }

    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub const fn as_poly(self) -> BinPoly {
        BinPoly::new(self.0 as u64)
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#x}", self.0)
    }
}

impl fmt::LowerHex for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::LowerHex::fmt(&self.0, f)
    }
}

#[derive(Clone)]
pub struct FieldCtx {
    modulus: BinPoly,
    degree: u32,
    generator: FieldElem,
    exp: Vec<u16>,
    log: Vec<u16>,
    products: Option<Vec<u16>>,
    alpha_log: Option<u32>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldCtx")
            .field("modulus", &self.modulus)
            .field("degree", &self.degree)
            .field("generator", &self.generator)
            .finish()
    }
}

impl FieldCtx {
    pub fn new(modulus: BinPoly) -> Result<Self> {
        let d = modulus.degree();
        if d < 1 || d as u32 > MAX_FIELD_DEGREE {
            return invalid(format!(
                "field modulus must have degree 1..={MAX_FIELD_DEGREE}, {modulus:#x} has degree {d}"
            ));
        }
        if !modulus.is_irreducible()? {
            return Err(Error::Reducible(modulus));
        }
        let degree = d as u32;
        let size = 1usize << degree;
        let group = size - 1;

        let generator = (1..size as u64)
            .map(BinPoly::new)
            .find(|&g| multiplicative_order(g, modulus, group) == group)
            .map(|g| FieldElem(g.bits() as u16))
            .ok_or_else(|| Error::Internal(format!("no generator for {modulus:#x}")))?;

        let mut exp = vec![0u16; 2 * group];
        let mut log = vec![0u16; size];
        let mut x = BinPoly::ONE;
        for (i, slot) in exp.iter_mut().enumerate() {
            *slot = x.bits() as u16;
            if i < group {
                log[x.bits() as usize] = i as u16;
            }
            x = mul_mod_unchecked(x, generator.as_poly(), modulus);
        }

        let alpha = BinPoly::X.rem(modulus)?;
        let alpha_log = if alpha.is_zero() {
            None
        } else {
            let k = log[alpha.bits() as usize] as usize;
            // α generates the group iff gcd(log α, 2^d - 1) = 1
            (gcd_usize(k, group) == 1).then_some(k as u32)
        };

        let mut ctx = FieldCtx {
            modulus,
            degree,
            generator,
            exp,
            log,
            products: None,
            alpha_log,
        };
        if degree <= PRODUCT_TABLE_MAX_DEGREE {
            let mut table = vec![0u16; size * size];
            for a in 1..size {
                for b in 1..size {
                    table[(a << degree) | b] = ctx.mul_by_logs(a as u16, b as u16);
                }
            }
            ctx.products = Some(table);
        }
        Ok(ctx)
    }

    pub fn modulus(&self) -> BinPoly {
        self.modulus
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Number of elements, `2^d`.
    pub fn size(&self) -> usize {
        1 << self.degree
    }

    pub fn generator(&self) -> FieldElem {
        self.generator
    }

    /// The class of `X`, a root of the modulus.
    pub fn alpha(&self) -> FieldElem {
        self.from_poly(BinPoly::X)
    }

    pub fn contains(&self, e: FieldElem) -> bool {
        (e.0 as usize) < self.size()
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElem> {
        (0..self.size() as u32).map(|v| FieldElem(v as u16))
    }

    /// Nonzero elements in ascending bitmask order.
    pub fn nonzero_elements(&self) -> impl Iterator<Item = FieldElem> {
        (1..self.size() as u32).map(|v| FieldElem(v as u16))
    }

    /// Reduces a polynomial modulo the field modulus, i.e. evaluates it at α.
    pub fn from_poly(&self, p: BinPoly) -> FieldElem {
        FieldElem(p.rem(self.modulus).expect("nonzero modulus").bits() as u16)
    }

    #[inline]
    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        FieldElem(a.0 ^ b.0)
    }

    #[inline]
    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        debug_assert!(
            self.contains(a) && self.contains(b),
            "element outside the field"
        );
        FieldElem(self.mul_raw(a.0, b.0))
    }

    #[inline]
    pub(crate) fn mul_raw(&self, a: u16, b: u16) -> u16 {
        match &self.products {
            Some(t) => t[((a as usize) << self.degree) | b as usize],
            None => self.mul_by_logs(a, b),
        }
    }

    /// The row of the product table for `a`, when products are tabulated.
    #[inline]
    pub(crate) fn product_row(&self, a: u16) -> Option<&[u16]> {
        self.products.as_ref().map(|t| {
            let start = (a as usize) << self.degree;
            &t[start..start + self.size()]
        })
    }

    #[inline]
    fn mul_by_logs(&self, a: u16, b: u16) -> u16 {
        if a == 0 || b == 0 {
            0
        } else {
            self.exp[self.log[a as usize] as usize + self.log[b as usize] as usize]
        }
    }

    pub fn inv(&self, a: FieldElem) -> Result<FieldElem> {
        if a.is_zero() {
            return invalid("zero has no inverse");
        }
        let group = self.size() - 1;
        let l = self.log[a.0 as usize] as usize;
        Ok(FieldElem(self.exp[(group - l) % group]))
    }

    /// `a^e` for any integer exponent; negative exponents need `a != 0`.
    pub fn pow(&self, a: FieldElem, e: i64) -> Result<FieldElem> {
        if a.is_zero() {
            return match e {
                0 => Ok(FieldElem::ONE),
                e if e > 0 => Ok(FieldElem::ZERO),
                _ => invalid("negative power of zero"),
            };
        }
        let group = (self.size() - 1) as i64;
        let l = self.log[a.0 as usize] as i64;
        let k = (l * (e.rem_euclid(group))).rem_euclid(group);
        Ok(FieldElem(self.exp[k as usize]))
    }

    /// `α^k`; negative `k` gives inverses.
    pub fn alpha_pow(&self, k: i64) -> Result<FieldElem> {
        self.pow(self.alpha(), k)
    }

    /// The `k` with `e = α^k`, when α generates the multiplicative group.
    pub fn alpha_log(&self, e: FieldElem) -> Option<u32> {
        let base = self.alpha_log? as u64;
        if e.is_zero() {
            return None;
        }
        let group = (self.size() - 1) as u64;
        let l = self.log[e.0 as usize] as u64;
        // e = g^l, α = g^base, so k = l * base^-1 mod group
        let inv = mod_inverse(base, group)?;
        Some(((l * inv) % group.max(1)) as u32)
    }

    /// `e^2`.
    pub fn frobenius(&self, e: FieldElem) -> FieldElem {
        self.mul(e, e)
    }

    /// Evaluates `p` at `x` by Horner's rule.
    pub fn eval_poly(&self, p: BinPoly, x: FieldElem) -> FieldElem {
        let mut acc = FieldElem::ZERO;
        for i in (0..=p.degree().max(0) as u32).rev() {
            acc = self.mul(acc, x);
            if p.coeff(i) {
                acc = self.add(acc, FieldElem::ONE);
            }
        }
        acc
    }

    /// Every root of `p` in the field, found by evaluating at all elements.
    pub fn roots(&self, p: BinPoly) -> Result<Vec<FieldElem>> {
        if p.degree() < 1 {
            return invalid(format!("roots of the constant {p:#x}"));
        }
        Ok(self
            .elements()
            .filter(|&e| self.eval_poly(p, e).is_zero())
            .collect())
    }

    /// `a^k` alias relative to α, or `None` for zero and when α is not primitive.
    pub fn alias(&self, e: FieldElem) -> Option<String> {
        self.alpha_log(e).map(|k| format!("a^{k}"))
    }
}

/// `field_roots` under its contract name.
pub fn field_roots(p: BinPoly, ctx: &FieldCtx) -> Result<Vec<FieldElem>> {
    ctx.roots(p)
}

fn multiplicative_order(g: BinPoly, m: BinPoly, group: usize) -> usize {
    let mut x = g;
    for k in 1..=group {
        if x.is_one() {
            return k;
        }
        x = mul_mod_unchecked(x, g, m);
    }
    usize::MAX
}

fn gcd_usize(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut t, mut new_t) = (0i64, 1i64);
    let (mut r, mut new_r) = (m as i64, a as i64);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    (r == 1).then(|| t.rem_euclid(m as i64) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gf16() -> FieldCtx {
        FieldCtx::new(BinPoly::new(0x13)).unwrap()
    }

    #[test]
    fn rejects_bad_moduli() {
        assert!(matches!(
            FieldCtx::new(BinPoly::new(0b101)),
            Err(Error::Reducible(_))
        ));
        assert!(FieldCtx::new(BinPoly::ONE).is_err());
        assert!(FieldCtx::new(BinPoly::new(1 << 17 | 0b1001)).is_err());
    }

    #[test]
    fn generator_has_full_order() {
        for m in [
            0x3u64, 0x2, 0x7, 0xb, 0x13, 0x19, 0x1f, 0x25, 0x11b, 0x1002b,
        ] {
            let ctx = FieldCtx::new(BinPoly::new(m)).unwrap();
            let group = ctx.size() - 1;
            let g = ctx.generator();
            let mut x = FieldElem::ONE;
            for k in 1..=group {
                x = ctx.mul(x, g);
                assert_eq!(x == FieldElem::ONE, k == group, "modulus {m:#x}");
            }
        }
    }

    #[test]
    fn x4_x3_x2_x_1_has_non_primitive_alpha() {
        let ctx = FieldCtx::new(BinPoly::new(0x1f)).unwrap();
        assert_eq!(ctx.alpha(), FieldElem(2));
        assert_eq!(ctx.alpha_log(FieldElem(2)), None);
        assert_eq!(ctx.alias(FieldElem(2)), None);
        // the generator is not α, so the smallest one must be X + 1
        assert_eq!(ctx.generator(), FieldElem(3));
    }

    #[test]
    fn degree_one_fields() {
        let x_plus_1 = FieldCtx::new(BinPoly::new(0b11)).unwrap();
        assert_eq!(x_plus_1.alpha(), FieldElem::ONE);
        let x = FieldCtx::new(BinPoly::X).unwrap();
        assert_eq!(x.alpha(), FieldElem::ZERO);
        assert_eq!(x.mul(FieldElem::ONE, FieldElem::ONE), FieldElem::ONE);
    }

    #[test]
    fn frobenius_examples() {
        let ctx = gf16();
        assert_eq!(ctx.frobenius(FieldElem::ZERO), FieldElem::ZERO);
        assert_eq!(ctx.frobenius(FieldElem::ONE), FieldElem::ONE);
        assert_eq!(ctx.frobenius(ctx.alpha()), FieldElem(0b0100));
        let a3 = ctx.alpha_pow(3).unwrap();
        assert_eq!(ctx.frobenius(a3), ctx.alpha_pow(6).unwrap());
        // α^6 = α^3 * α^3 = X^6 mod X^4+X+1 = X^3 + X^2
        assert_eq!(ctx.alpha_pow(6).unwrap(), FieldElem(0b1100));
    }

    #[test]
    fn roots_examples() {
        let ctx = gf16();
        assert!(ctx.roots(ctx.modulus()).unwrap().contains(&ctx.alpha()));
        assert_eq!(ctx.roots(BinPoly::new(0b11)).unwrap(), vec![FieldElem::ONE]);
        let other = FieldCtx::new(BinPoly::new(0x19)).unwrap();
        assert_eq!(other.roots(BinPoly::new(0x13)).unwrap().len(), 4);
        // X^2 + X + 1 has no root in GF(8)
        let gf8 = FieldCtx::new(BinPoly::new(0xb)).unwrap();
        assert!(gf8.roots(BinPoly::new(0b111)).unwrap().is_empty());
        assert!(gf8.roots(BinPoly::ONE).is_err());
    }

    #[test]
    fn alias_and_negative_powers() {
        let ctx = gf16();
        assert_eq!(
            ctx.alias(ctx.alpha_pow(12).unwrap()).as_deref(),
            Some("a^12")
        );
        assert_eq!(ctx.alpha_pow(-3).unwrap(), ctx.alpha_pow(12).unwrap());
        assert_eq!(ctx.alias(FieldElem::ONE).as_deref(), Some("a^0"));
        assert_eq!(ctx.alias(FieldElem::ZERO), None);
    }

    #[test]
    fn log_and_table_products_agree_with_polynomial_product() {
        for m in [0x13u64, 0x25, 0x11d, 0x1100b] {
            let ctx = FieldCtx::new(BinPoly::new(m)).unwrap();
            let step = (ctx.size() / 97).max(1);
            for a in (0..ctx.size()).step_by(step) {
                for b in (0..ctx.size()).step_by(step) {
                    let want = BinPoly::new(a as u64)
                        .mul_mod(BinPoly::new(b as u64), ctx.modulus())
                        .unwrap();
                    assert_eq!(
                        ctx.mul(FieldElem(a as u16), FieldElem(b as u16)).as_poly(),
                        want
                    );
                }
            }
        }
    }

    proptest! {
        #[test]
        fn field_axioms(a in 0u16..32, b in 0u16..32, c in 0u16..32) {
            let ctx = FieldCtx::new(BinPoly::new(0x25)).unwrap();
            let (a, b, c) = (FieldElem(a), FieldElem(b), FieldElem(c));
            prop_assert_eq!(ctx.mul(ctx.mul(a, b), c), ctx.mul(a, ctx.mul(b, c)));
            prop_assert_eq!(ctx.mul(a, ctx.add(b, c)), ctx.add(ctx.mul(a, b), ctx.mul(a, c)));
            if !a.is_zero() {
                prop_assert_eq!(ctx.mul(a, ctx.inv(a).unwrap()), FieldElem::ONE);
            }
            prop_assert_eq!(ctx.frobenius(ctx.add(a, b)), ctx.add(ctx.frobenius(a), ctx.frobenius(b)));
            prop_assert_eq!(ctx.frobenius(ctx.mul(a, b)), ctx.mul(ctx.frobenius(a), ctx.frobenius(b)));
            let mut x = a;
            for _ in 0..ctx.degree() {
                x = ctx.frobenius(x);
            }
            prop_assert_eq!(x, a);
        }
    }
}
