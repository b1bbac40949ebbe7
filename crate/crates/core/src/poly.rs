//! Polynomials over F2 packed into a `u64` bitmask.
//!
//! Bit `i` holds the coefficient of `X^i`, so `X^4 + X + 1` is `0x13`. This is
//! also the wire format: polynomials serialize as lowercase `0x`-prefixed hex.
//! Degrees up to 63 are representable; operations whose exact result would not
//! fit report an error instead of truncating.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BinPoly(pub u64);

impl BinPoly {
    pub const ZERO: BinPoly = BinPoly(0);
    pub const ONE: BinPoly = BinPoly(1);
    pub const X: BinPoly = BinPoly(2);

    pub const fn new(bits: u64) -> Self {
        BinPoly(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    /// `X^k`, for `k <= 63`.
    pub fn monomial(k: u32) -> Result<Self> {
        if k > 63 {
            return invalid(format!("X^{k} exceeds the supported degree 63"));
        }
        Ok(BinPoly(1 << k))
    }

    /// Degree, with `-1` for the zero polynomial.
    pub const fn degree(self) -> i32 {
        63 - self.0.leading_zeros() as i32
    }

    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub const fn is_one(self) -> bool {
        self.0 == 1
    }

    pub const fn coeff(self, i: u32) -> bool {
        i < 64 && (self.0 >> i) & 1 == 1
    }

    pub const fn add(self, other: BinPoly) -> BinPoly {
        BinPoly(self.0 ^ other.0)
    }

    /// Exact carry-less product.
    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, other: BinPoly) -> Result<BinPoly> {
        if self.is_zero() || other.is_zero() {
            return Ok(BinPoly::ZERO);
        }
        if self.degree() + other.degree() > 63 {
            return invalid(format!(
                "product of {self:#x} and {other:#x} exceeds degree 63"
            ));
        }
        let mut acc = 0u64;
        let mut b = other.0;
        while b != 0 {
            let i = b.trailing_zeros();
            acc ^= self.0 << i;
            b &= b - 1;
        }
        Ok(BinPoly(acc))
    }

    pub fn div_rem(self, divisor: BinPoly) -> Result<(BinPoly, BinPoly)> {
        if divisor.is_zero() {
            return invalid("division by the zero polynomial");
        }
        let dd = divisor.degree();
        let mut q = 0u64;
        let mut r = self.0;
        while r != 0 {
            let shift = (63 - r.leading_zeros() as i32) - dd;
            if shift < 0 {
                break;
            }
            q |= 1 << shift;
            r ^= divisor.0 << shift;
        }
        Ok((BinPoly(q), BinPoly(r)))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn rem(self, modulus: BinPoly) -> Result<BinPoly> {
        Ok(self.div_rem(modulus)?.1)
    }

    /// Exact quotient; errors when `divisor` does not divide `self`.
    pub fn exact_div(self, divisor: BinPoly) -> Result<BinPoly> {
        let (q, r) = self.div_rem(divisor)?;
        if !r.is_zero() {
            return Err(Error::Internal(format!(
                "{divisor:#x} does not divide {self:#x}"
            )));
        }
        Ok(q)
    }

    /// `self * other mod modulus` by shift-and-reduce; never overflows.
    pub fn mul_mod(self, other: BinPoly, modulus: BinPoly) -> Result<BinPoly> {
        if modulus.is_zero() {
            return invalid("zero modulus");
        }
        Ok(mul_mod_unchecked(
            self.rem(modulus)?,
            other.rem(modulus)?,
            modulus,
        ))
    }

    pub fn pow_mod(self, mut e: u64, modulus: BinPoly) -> Result<BinPoly> {
        if modulus.is_zero() {
            return invalid("zero modulus");
        }
        let mut base = self.rem(modulus)?;
        let mut acc = BinPoly::ONE.rem(modulus)?;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_mod_unchecked(acc, base, modulus);
            }
            base = mul_mod_unchecked(base, base, modulus);
            e >>= 1;
        }
        Ok(acc)
    }

    /// `self(inner) mod modulus` by Horner's rule.
    pub fn compose_mod(self, inner: BinPoly, modulus: BinPoly) -> Result<BinPoly> {
        if modulus.is_zero() {
            return invalid("zero modulus");
        }
        let inner = inner.rem(modulus)?;
        let mut acc = BinPoly::ZERO;
        for i in (0..=self.degree().max(0) as u32).rev() {
            acc = mul_mod_unchecked(acc, inner, modulus);
            if self.coeff(i) {
                acc = acc.add(BinPoly::ONE).rem(modulus)?;
            }
        }
        Ok(acc)
    }

    /// Formal derivative (over F2 only odd-degree terms survive).
    pub const fn derivative(self) -> BinPoly {
        BinPoly((self.0 >> 1) & 0x5555_5555_5555_5555)
    }

    /// Monic gcd; `gcd(a, 0) = a`.
    pub fn gcd(self, other: BinPoly) -> Result<BinPoly> {
        if self.is_zero() && other.is_zero() {
            return invalid("gcd(0, 0) is undefined");
        }
        let (mut a, mut b) = (self, other);
        while !b.is_zero() {
            let r = a.rem(b)?;
            a = b;
            b = r;
        }
        Ok(a)
    }

    /// Rabin's test: `gcd(p, X^(2^i) - X) = 1` for `i <= deg/2` and
    /// `X^(2^deg) = X mod p`.
    pub fn is_irreducible(self) -> Result<bool> {
        let n = self.degree();
        if n < 1 {
            return invalid(format!("irreducibility of the constant {self:#x}"));
        }
        if n == 1 {
            return Ok(true);
        }
        let x = BinPoly::X;
        let mut h = x;
        for i in 1..=n {
            h = mul_mod_unchecked(h, h, self);
            if i <= n / 2 && !self.gcd(h.add(x))?.is_one() {
                return Ok(false);
            }
        }
        Ok(h == x)
    }

    /// Complete factorization into irreducibles, sorted by ascending bitmask.
    pub fn factorize(self) -> Result<Vec<(BinPoly, u32)>> {
        if self.degree() < 1 {
            return invalid(format!("factorization of the constant {self:#x}"));
        }
        let mut out = Vec::new();
        for (sqfree, mult) in square_free(self)? {
            for (part, d) in distinct_degree(sqfree)? {
                for f in equal_degree(part, d)? {
                    out.push((f, mult));
                }
            }
        }
        out.sort();
        Ok(out)
    }

    /// Lowercase hex with `0x` prefix.
    pub fn to_hex(self) -> String {
        format!("{:#x}", self.0)
    }

    pub fn from_hex(s: &str) -> Result<Self> {
        let t = s.trim();
        let digits = t
            .strip_prefix("0x")
            .or_else(|| t.strip_prefix("0X"))
            .ok_or_else(|| Error::Parse(format!("expected 0x-prefixed hex, got {s:?}")))?;
        u64::from_str_radix(digits, 16)
            .map(BinPoly)
            .map_err(|e| Error::Parse(format!("bad hex polynomial {s:?}: {e}")))
    }
}

/// Both operands must already be reduced modulo a nonzero `m`.
pub(crate) fn mul_mod_unchecked(a: BinPoly, b: BinPoly, m: BinPoly) -> BinPoly {
    let dm = m.degree();
    if dm <= 0 {
        return BinPoly::ZERO;
    }
    let top = 1u64 << dm;
    let mut a = a.0;
    let mut b = b.0;
    let mut acc = 0u64;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a & top != 0 {
            a ^= m.0;
        }
    }
    BinPoly(acc)
}

/// All irreducible polynomials of the given degree, ascending.
pub fn irreducibles(degree: u32) -> Result<Vec<BinPoly>> {
    if !(1..=24).contains(&degree) {
        return invalid(format!(
            "irreducible enumeration supports degrees 1..=24, got {degree}"
        ));
    }
    let lo = 1u64 << degree;
    let mut out = Vec::new();
    for bits in lo..(lo << 1) {
        // every irreducible of degree >= 2 has a nonzero constant term
        if degree >= 2 && bits & 1 == 0 {
            continue;
        }
        let p = BinPoly(bits);
        if p.is_irreducible()? {
            out.push(p);
        }
    }
    Ok(out)
}

fn sqrt_of_square(p: BinPoly) -> BinPoly {
    let mut out = 0u64;
    let mut bits = p.0;
    while bits != 0 {
        let i = bits.trailing_zeros();
        debug_assert!(i.is_multiple_of(2), "not a square");
        out |= 1 << (i / 2);
        bits &= bits - 1;
    }
    BinPoly(out)
}

fn square_free(f: BinPoly) -> Result<Vec<(BinPoly, u32)>> {
    let mut out = Vec::new();
    let mut c = f.gcd(f.derivative())?;
    let mut w = f.exact_div(c)?;
    let mut i = 1;
    while !w.is_one() {
        let y = w.gcd(c)?;
        let fac = w.exact_div(y)?;
        if !fac.is_one() {
            out.push((fac, i));
        }
        w = y;
        c = c.exact_div(y)?;
        i += 1;
    }
    if !c.is_one() {
        for (g, m) in square_free(sqrt_of_square(c))? {
            out.push((g, 2 * m));
        }
    }
    Ok(out)
}

fn distinct_degree(mut f: BinPoly) -> Result<Vec<(BinPoly, u32)>> {
    let mut out = Vec::new();
    let mut h = BinPoly::X.rem(f)?;
    let mut i = 1;
    while f.degree() >= 2 * i as i32 {
        h = mul_mod_unchecked(h, h, f);
        let g = f.gcd(h.add(BinPoly::X))?;
        if !g.is_one() {
            out.push((g, i));
            f = f.exact_div(g)?;
            h = h.rem(f)?;
        }
        i += 1;
    }
    if f.degree() >= 1 {
        out.push((f, f.degree() as u32));
    }
    Ok(out)
}

/// Splits a product of distinct irreducibles of degree `d` with the trace map,
/// trying `X, X+1, X^2, ...` in order so the output is deterministic.
fn equal_degree(f: BinPoly, d: u32) -> Result<Vec<BinPoly>> {
    if f.degree() == d as i32 {
        return Ok(vec![f]);
    }
    let limit = 1u64 << f.degree();
    for a in 2..limit {
        let a = BinPoly(a);
        let mut t = a;
        let mut acc = a;
        for _ in 1..d {
            t = mul_mod_unchecked(t, t, f);
            acc = acc.add(t);
        }
        let g = f.gcd(acc)?;
        if g.degree() > 0 && g.degree() < f.degree() {
            let mut out = equal_degree(g, d)?;
            out.extend(equal_degree(f.exact_div(g)?, d)?);
            return Ok(out);
        }
    }
    Err(Error::Internal(format!(
        "failed to split {f:#x} into degree-{d} factors"
    )))
}

impl fmt::Debug for BinPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinPoly({:#x})", self.0)
    }
}

impl fmt::LowerHex for BinPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::LowerHex::fmt(&self.0, f)
    }
}

/// Human-readable form, e.g. `X^4 + X + 1`.
impl fmt::Display for BinPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for i in (0..=self.degree() as u32).rev() {
            if !self.coeff(i) {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match i {
                0 => f.write_str("1")?,
                1 => f.write_str("X")?,
                _ => write!(f, "X^{i}")?,
            }
        }
        Ok(())
    }
}

impl FromStr for BinPoly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BinPoly::from_hex(s)
    }
}

impl Serialize for BinPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for BinPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        BinPoly::from_hex(&s).map_err(serde::de::Error::custom)
    }
}
