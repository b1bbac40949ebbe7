//! JSON Lines solution records and coefficient parsing.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElem};
use crate::matrix::CoeffVec;
use crate::poly::BinPoly;
use crate::search::{SearchResult, SearchSpec};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionRecord {
    pub ell: usize,
    pub degree: u32,
    pub modulus: BinPoly,
    pub coeffs: Vec<String>,
    pub class_rep: Vec<String>,
    pub orbit_size: usize,
    pub symmetric: bool,
}

impl SolutionRecord {
    pub fn new(cv: &CoeffVec, ctx: &FieldCtx) -> Self {
        let orbit = cv.frobenius_orbit(ctx);
        let rep = orbit.iter().min().expect("orbit contains cv");
        SolutionRecord {
            ell: cv.ell(),
            degree: ctx.degree(),
            modulus: ctx.modulus(),
            coeffs: coeffs_to_hex(cv),
            class_rep: coeffs_to_hex(rep),
            orbit_size: orbit.len(),
            symmetric: cv.is_symmetric(),
        }
    }

    pub fn coeff_vec(&self) -> Result<CoeffVec> {
        let cv = coeffs_from_hex(&self.coeffs)?;
        if cv.ell() != self.ell {
            return Err(Error::Parse(format!(
                "record has ell {} but {} coefficients",
                self.ell,
                cv.ell()
            )));
        }
        Ok(cv)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SummaryRecord {
    pub summary: bool,
    pub ell: usize,
    pub degree: u32,
    pub modulus: BinPoly,
    pub mode: String,
    pub solutions: usize,
    pub classes: usize,
    pub symmetric_classes: usize,
    pub candidates_tested: u64,
    pub complete: bool,
    pub elapsed_secs: f64,
}

impl SummaryRecord {
    pub fn new(spec: &SearchSpec, result: &SearchResult) -> Self {
        SummaryRecord {
            summary: true,
            ell: spec.ell,
            degree: spec.ctx.degree(),
            modulus: spec.ctx.modulus(),
            mode: spec.mode.to_string(),
            solutions: result.solutions.len(),
            classes: result.classes.len(),
            symmetric_classes: result.classes.iter().filter(|c| c.symmetric).count(),
            candidates_tested: result.candidates_tested,
            complete: result.complete,
            elapsed_secs: result.elapsed.as_secs_f64(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Record {
    Solution(SolutionRecord),
    Summary(SummaryRecord),
}

pub fn write_records<W: Write>(mut out: W, records: &[Record]) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_records<R: BufRead>(input: R) -> Result<Vec<Record>> {
    let mut records = Vec::new();
    for (n, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let r = serde_json::from_str(&line)
            .map_err(|e| Error::Parse(format!("line {}: {e}", n + 1)))?;
        records.push(r);
    }
    Ok(records)
}

pub fn coeffs_to_hex(cv: &CoeffVec) -> Vec<String> {
    cv.coeffs().iter().map(|c| format!("{c:#x}")).collect()
}

pub fn coeffs_from_hex(hex: &[String]) -> Result<CoeffVec> {
    let coeffs = hex
        .iter()
        .map(|h| {
            let p: BinPoly = h.parse()?;
            u16::try_from(p.bits())
                .map(FieldElem)
                .map_err(|_| Error::Parse(format!("{h} is too wide for a field element")))
        })
        .collect::<Result<Vec<_>>>()?;
    CoeffVec::new(coeffs)
}

/// Parses one coefficient: a hex bitmask (`0x..`), `0`, `1`, or a power of α
/// written `a`, `a^k`, `L`, `L^k`, `L^-k` (negative powers are inverses).
pub fn parse_coeff(token: &str, ctx: &FieldCtx) -> Result<FieldElem> {
    let t = token.trim();
    let bad = || Error::Parse(format!("cannot read coefficient {t:?}"));
    let e = if t.starts_with("0x") || t.starts_with("0X") {
        let p: BinPoly = t.to_ascii_lowercase().parse()?;
        let e = u16::try_from(p.bits()).map(FieldElem).map_err(|_| bad())?;
        if !ctx.contains(e) {
            return Err(Error::Parse(format!(
                "{t} is not an element of GF(2^{})",
                ctx.degree()
            )));
        }
        e
    } else if t == "0" {
        FieldElem::ZERO
    } else if t == "1" {
        FieldElem::ONE
    } else {
        let rest = ["a", "L", "α"]
            .iter()
            .find_map(|base| t.strip_prefix(base))
            .ok_or_else(bad)?;
        let k: i64 = if rest.is_empty() {
            1
        } else {
            let exp = rest.strip_prefix('^').ok_or_else(bad)?;
            let exp = exp.trim_start_matches('{').trim_end_matches('}');
            exp.parse().map_err(|_| bad())?
        };
        ctx.alpha_pow(k)?
    };
    Ok(e)
}

/// Parses a coefficient list such as `[1, L^-3, L, 0x8]`.
pub fn parse_coeff_list(text: &str, ctx: &FieldCtx) -> Result<CoeffVec> {
    let inner = text.trim().trim_start_matches('[').trim_end_matches(']');
    let coeffs = inner
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| parse_coeff(s.trim_matches('"'), ctx))
        .collect::<Result<Vec<_>>>()?;
    CoeffVec::new(coeffs)
}
