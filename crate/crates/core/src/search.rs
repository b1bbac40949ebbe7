//! Exhaustive search for coefficient vectors whose companion matrix, raised
//! to the power `ell`, is MDS.
//!
//! Candidates are numbered by an odometer over the free coefficients, most
//! significant first, each digit running over the nonzero field elements in
//! ascending bitmask order (or over the middle representatives for the
//! central coefficient of a restricted symmetric search). Worker `i` of `n`
//! owns the indices congruent to `i` mod `n`. Work proceeds in blocks of
//! [`CHECKPOINT_INTERVAL`] candidates of the worker's stratum; a block is the
//! unit of checkpointing and of interruption.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::error::{invalid, Error, Result};
use crate::field::{FieldCtx, FieldElem};
use crate::matrix::CoeffVec;
use crate::minors::{MinorChecker, INCREMENTAL_MAX_ELL};
use crate::poly::BinPoly;
use crate::records::{coeffs_from_hex, coeffs_to_hex};

pub const CHECKPOINT_INTERVAL: u64 = 1 << 20;
const CHUNK: u64 = 1 << 13;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    Full,
    Symmetric,
}

impl fmt::Display for SearchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SearchMode::Full => "full",
            SearchMode::Symmetric => "symmetric",
        })
    }
}

impl std::str::FromStr for SearchMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(SearchMode::Full),
            "symmetric" => Ok(SearchMode::Symmetric),
            _ => Err(Error::Parse(format!("unknown search mode {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Partition {
    pub index: u64,
    pub count: u64,
}

impl Partition {
    pub const SINGLE: Partition = Partition { index: 0, count: 1 };
}

#[derive(Clone, Debug)]
pub struct SearchSpec {
    pub ell: usize,
    pub ctx: FieldCtx,
    pub mode: SearchMode,
    /// Allowed values of the central coefficient (symmetric mode, even `ell`).
    pub middle_reps: Option<Vec<FieldElem>>,
    pub partition: Partition,
}

impl SearchSpec {
    pub fn new(ell: usize, modulus: BinPoly, mode: SearchMode) -> Result<Self> {
        let spec = SearchSpec {
            ell,
            ctx: FieldCtx::new(modulus)?,
            mode,
            middle_reps: None,
            partition: Partition::SINGLE,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_middle_reps(mut self, reps: Vec<FieldElem>) -> Result<Self> {
        self.middle_reps = Some(reps);
        self.validate()?;
        Ok(self)
    }

    pub fn with_partition(mut self, index: u64, count: u64) -> Result<Self> {
        self.partition = Partition { index, count };
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=INCREMENTAL_MAX_ELL).contains(&self.ell) {
            return invalid(format!(
                "search size ell={} outside 2..={INCREMENTAL_MAX_ELL}",
                self.ell
            ));
        }
        if self.partition.count == 0 || self.partition.index >= self.partition.count {
            return invalid(format!(
                "worker index {} must be below worker count {}",
                self.partition.index, self.partition.count
            ));
        }
        if let Some(reps) = &self.middle_reps {
            if self.mode != SearchMode::Symmetric || !self.ell.is_multiple_of(2) {
                return invalid("middle representatives need symmetric mode and an even size");
            }
            if reps.is_empty() {
                return invalid("empty middle representative list");
            }
            let mut sorted = reps.clone();
            sorted.sort();
            sorted.dedup();
            if sorted.len() != reps.len()
                || reps.iter().any(|&e| e.is_zero() || !self.ctx.contains(e))
            {
                return invalid("middle representatives must be distinct nonzero field elements");
            }
        }
        Ok(())
    }

    /// Stable identifier of everything that determines the candidate stream.
    pub fn hash(&self) -> String {
        let reps = match &self.middle_reps {
            Some(r) => r
                .iter()
                .map(|e| format!("{e:#x}"))
                .collect::<Vec<_>>()
                .join(","),
            None => "all".into(),
        };
        let desc = format!(
            "ell={};modulus={:#x};mode={};middle={};partition={}/{}",
            self.ell,
            self.ctx.modulus(),
            self.mode,
            reps,
            self.partition.index,
            self.partition.count
        );
        let digest = Sha256::digest(desc.as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    fn space(&self) -> CandidateSpace {
        CandidateSpace::new(self)
    }
}

/// Necessary condition for an `ell x ell` MDS matrix over GF(2^d), assuming
/// the MDS conjecture: `2 ell <= 2^d`.
pub fn check_bound(ell: usize, d: u32) -> bool {
    d >= 64 || (2 * ell as u128) <= (1u128 << d)
}

/// One element per Frobenius orbit of the nonzero elements, the smallest
/// bitmask of each orbit, ascending.
pub fn middle_representatives(ctx: &FieldCtx) -> Vec<FieldElem> {
    let mut seen = vec![false; ctx.size()];
    let mut reps = Vec::new();
    for e in ctx.nonzero_elements() {
        if seen[e.value() as usize] {
            continue;
        }
        reps.push(e);
        let mut x = e;
        loop {
            seen[x.value() as usize] = true;
            x = ctx.frobenius(x);
            if x == e {
                break;
            }
        }
    }
    reps
}

/// Free coefficient positions and their alphabets.
struct CandidateSpace {
    ell: usize,
    symmetric: bool,
    alphabets: Vec<Vec<u16>>,
}

impl CandidateSpace {
    fn new(spec: &SearchSpec) -> Self {
        let nonzero: Vec<u16> = spec.ctx.nonzero_elements().map(|e| e.value()).collect();
        let ell = spec.ell;
        let (free, symmetric) = match spec.mode {
            SearchMode::Full => (ell - 1, false),
            SearchMode::Symmetric => (ell / 2, true),
        };
        let mut alphabets = vec![nonzero; free];
        if let (Some(reps), true) = (&spec.middle_reps, symmetric) {
            alphabets[ell / 2 - 1] = reps.iter().map(|e| e.value()).collect();
        }
        CandidateSpace {
            ell,
            symmetric,
            alphabets,
        }
    }

    fn total(&self) -> u128 {
        self.alphabets.iter().map(|a| a.len() as u128).product()
    }

    fn digits_of(&self, mut index: u64) -> Vec<usize> {
        let mut digits = vec![0; self.alphabets.len()];
        for (d, a) in digits.iter_mut().zip(&self.alphabets).rev() {
            let r = a.len() as u64;
            *d = (index % r) as usize;
            index /= r;
        }
        digits
    }

    /// Adds `step` (given as digits) to `digits`; returns false on wrap-around.
    fn advance(&self, digits: &mut [usize], step: &[usize]) -> bool {
        let mut carry = 0;
        for i in (0..digits.len()).rev() {
            let r = self.alphabets[i].len();
            let v = digits[i] + step[i] + carry;
            digits[i] = v % r;
            carry = v / r;
        }
        carry == 0
    }

    fn fill(&self, digits: &[usize], coeffs: &mut [u16]) {
        coeffs[0] = 1;
        for (i, (&d, a)) in digits.iter().zip(&self.alphabets).enumerate() {
            coeffs[i + 1] = a[d];
            if self.symmetric {
                coeffs[self.ell - 1 - i] = a[d];
            }
        }
    }
}

/// Number of candidates of the whole space (all workers).
pub fn candidate_count(spec: &SearchSpec) -> u128 {
    spec.space().total()
}

/// Candidates owned by this spec's worker, in index order.
pub fn enumerate_candidates(spec: &SearchSpec) -> impl Iterator<Item = CoeffVec> {
    let space = spec.space();
    let total = space.total();
    let Partition { index, count } = spec.partition;
    let mut next = index as u128;
    std::iter::from_fn(move || {
        if next >= total {
            return None;
        }
        let mut coeffs = vec![0u16; space.ell];
        space.fill(&space.digits_of(next as u64), &mut coeffs);
        next += count as u128;
        Some(CoeffVec::new(coeffs.into_iter().map(FieldElem).collect()).expect("valid length"))
    })
}

/// Tests candidates: builds the rows of `C^ell` one at a time, rejecting as
/// soon as a zero entry appears, then runs the full minor check.
struct Kernel<'a> {
    ctx: &'a FieldCtx,
    ell: usize,
    rows: Vec<u16>,
    checker: MinorChecker<u16>,
}

impl<'a> Kernel<'a> {
    fn new(ctx: &'a FieldCtx, ell: usize) -> Self {
        Kernel {
            ctx,
            ell,
            rows: vec![0; ell * ell],
            checker: MinorChecker::new(),
        }
    }

    /// Row `m` of `C^ell` is `r_{ell+m}` of the sequence `r_j = e_j` (`j < ell`),
    /// `r_{j+ell} = sum_i c_i r_{j+i}`.
    fn diffusion_rows(&mut self, coeffs: &[u16]) -> bool {
        let n = self.ell;
        for m in 0..n {
            let (done, rest) = self.rows.split_at_mut(m * n);
            let row = &mut rest[..n];
            row.fill(0);
            for i in 0..n - m {
                row[i + m] ^= coeffs[i];
            }
            for i in n - m..n {
                let prev = &done[(i + m - n) * n..(i + m - n + 1) * n];
                let c = coeffs[i];
                match self.ctx.product_row(c) {
                    Some(t) => {
                        for (out, &p) in row.iter_mut().zip(prev) {
                            *out ^= t[p as usize];
                        }
                    }
                    None => {
                        for (out, &p) in row.iter_mut().zip(prev) {
                            *out ^= self.ctx.mul_raw(c, p);
                        }
                    }
                }
            }
            if row.contains(&0) {
                return false;
            }
        }
        true
    }

    fn is_solution(&mut self, coeffs: &[u16]) -> bool {
        self.diffusion_rows(coeffs) && self.checker.check(self.ctx, self.ell, &self.rows).is_mds
    }
}

/// A Frobenius class of solutions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionClass {
    pub representative: CoeffVec,
    /// Size of the full Frobenius orbit.
    pub orbit_size: usize,
    pub symmetric: bool,
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    /// Sorted ascending.
    pub solutions: Vec<CoeffVec>,
    /// Sorted by representative.
    pub classes: Vec<SolutionClass>,
    /// Candidates of this worker's stratum covered so far, including any
    /// covered before a resume.
    pub candidates_tested: u64,
    pub elapsed: Duration,
    /// False when interrupted; `next_index` then says where to resume.
    pub complete: bool,
    pub next_index: u64,
}

impl SearchResult {
    pub fn class_of(&self, cv: &CoeffVec, ctx: &FieldCtx) -> Option<&SolutionClass> {
        let rep = cv.class_representative(ctx);
        self.classes.iter().find(|c| c.representative == rep)
    }
}

/// Resume point: all candidates of the stratum with global index below
/// `next_index` have been tested.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Checkpoint {
    pub next_index: u64,
    pub spec_hash: String,
    pub solutions: Vec<CoeffVec>,
}

impl Checkpoint {
    /// Decimal index line, spec hash line, then one JSON array of hex
    /// coefficients per solution found so far.
    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n{}\n", self.next_index, self.spec_hash);
        for cv in &self.solutions {
            s.push_str(&serde_json::to_string(&coeffs_to_hex(cv)).expect("strings serialize"));
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let next_index = lines
            .next()
            .and_then(|l| l.trim().parse().ok())
            .ok_or_else(|| Error::Parse("checkpoint must start with a decimal index".into()))?;
        let spec_hash = lines
            .next()
            .map(|l| l.trim().to_string())
            .ok_or_else(|| Error::Parse("checkpoint is missing the parameter hash".into()))?;
        let solutions = lines
            .filter(|l| !l.trim().is_empty())
            .map(|l| coeffs_from_hex(&serde_json::from_str::<Vec<String>>(l)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(Checkpoint {
            next_index,
            spec_hash,
            solutions,
        })
    }
}

/// Receives each saved checkpoint.
pub type CheckpointSink<'a> = Box<dyn FnMut(&Checkpoint) + Send + 'a>;

#[derive(Default)]
pub struct SearchOptions<'a> {
    /// Thread count for this process; `None` uses rayon's default.
    pub workers: Option<usize>,
    pub resume: Option<Checkpoint>,
    pub stop: Option<Arc<AtomicBool>>,
    /// Called after every completed block.
    pub on_checkpoint: Option<CheckpointSink<'a>>,
}

pub fn run_search(spec: &SearchSpec) -> Result<SearchResult> {
    run_search_with(spec, SearchOptions::default())
}

pub fn run_search_with(spec: &SearchSpec, mut opts: SearchOptions<'_>) -> Result<SearchResult> {
    spec.validate()?;
    if !check_bound(spec.ell, spec.ctx.degree()) {
        return Err(Error::BoundViolated {
            ell: spec.ell,
            degree: spec.ctx.degree(),
        });
    }
    let start = Instant::now();
    let space = spec.space();
    let total = u64::try_from(space.total()).map_err(|_| {
        Error::SizeLimit(format!(
            "{} candidates do not fit a 64-bit index",
            space.total()
        ))
    })?;
    let Partition {
        index: first,
        count: stride,
    } = spec.partition;
    let stratum_len = if first < total {
        (total - first).div_ceil(stride)
    } else {
        0
    };
    let hash = spec.hash();

    let (mut position, mut solutions) = match opts.resume.take() {
        Some(cp) => {
            if cp.spec_hash != hash {
                return invalid(format!(
                    "checkpoint belongs to spec {}, not {hash}",
                    cp.spec_hash
                ));
            }
            let offset = cp
                .next_index
                .checked_sub(first)
                .filter(|o| o % stride == 0 || cp.next_index >= total);
            let Some(offset) = offset else {
                return invalid(format!(
                    "checkpoint index {} is not in this worker's stratum",
                    cp.next_index
                ));
            };
            (offset.div_ceil(stride).min(stratum_len), cp.solutions)
        }
        None => (0, Vec::new()),
    };

    let pool = match opts.workers {
        Some(n) => Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Internal(e.to_string()))?,
        ),
        None => None,
    };
    let step_digits = space.digits_of(stride);

    let mut complete = true;
    while position < stratum_len {
        if opts
            .stop
            .as_ref()
            .is_some_and(|s| s.load(Ordering::Relaxed))
        {
            complete = false;
            break;
        }
        let block_end = (position + CHECKPOINT_INTERVAL).min(stratum_len);
        let chunks: Vec<(u64, u64)> = (position..block_end)
            .step_by(CHUNK as usize)
            .map(|s| (s, (s + CHUNK).min(block_end)))
            .collect();
        let work = || -> Vec<CoeffVec> {
            chunks
                .par_iter()
                .flat_map_iter(|&(lo, hi)| {
                    let mut kernel = Kernel::new(&spec.ctx, spec.ell);
                    let mut coeffs = vec![0u16; spec.ell];
                    let mut digits = space.digits_of(first + lo * stride);
                    let mut found = Vec::new();
                    for pos in lo..hi {
                        space.fill(&digits, &mut coeffs);
                        if kernel.is_solution(&coeffs) {
                            found.push(
                                CoeffVec::new(coeffs.iter().map(|&c| FieldElem(c)).collect())
                                    .expect("valid length"),
                            );
                        }
                        if pos + 1 < hi {
                            space.advance(&mut digits, &step_digits);
                        }
                    }
                    found
                })
                .collect()
        };
        let found = match &pool {
            Some(p) => p.install(work),
            None => work(),
        };
        solutions.extend(found);
        position = block_end;
        if let Some(cb) = opts.on_checkpoint.as_mut() {
            cb(&Checkpoint {
                next_index: (first + position * stride).min(total),
                spec_hash: hash.clone(),
                solutions: solutions.clone(),
            });
        }
    }

    solutions.sort();
    solutions.dedup();
    let classes = group_classes(&solutions, &spec.ctx);
    Ok(SearchResult {
        solutions,
        classes,
        candidates_tested: position,
        elapsed: start.elapsed(),
        complete,
        next_index: (first + position * stride).min(total),
    })
}

pub fn group_classes(solutions: &[CoeffVec], ctx: &FieldCtx) -> Vec<SolutionClass> {
    let mut classes: BTreeMap<CoeffVec, SolutionClass> = BTreeMap::new();
    for cv in solutions {
        let orbit = cv.frobenius_orbit(ctx);
        let representative = orbit.iter().min().expect("nonempty").clone();
        classes
            .entry(representative.clone())
            .or_insert_with(|| SolutionClass {
                symmetric: representative.is_symmetric(),
                representative,
                orbit_size: orbit.len(),
            });
    }
    classes.into_values().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minors::is_mds;

    fn gf8() -> BinPoly {
        BinPoly::new(0xb)
    }

    #[test]
    fn bounds() {
        assert!(check_bound(8, 4));
        assert!(check_bound(16, 5));
        assert!(!check_bound(8, 3));
        assert!(check_bound(4, 3));
        assert!(!check_bound(5, 3));
    }

    #[test]
    fn middle_representative_counts() {
        let reps = middle_representatives(&FieldCtx::new(BinPoly::new(0x25)).unwrap());
        assert_eq!(reps.len(), 7);
        let gf16 = FieldCtx::new(BinPoly::new(0x13)).unwrap();
        let reps = middle_representatives(&gf16);
        assert_eq!(reps.len(), 5);
        let mut sizes: Vec<usize> = reps
            .iter()
            .map(|&r| CoeffVec::new(vec![r]).unwrap().frobenius_orbit(&gf16).len())
            .collect();
        sizes.sort();
        assert_eq!(sizes, vec![1, 2, 4, 4, 4]);
        assert_eq!(
            middle_representatives(&FieldCtx::new(BinPoly::new(0b11)).unwrap()),
            vec![FieldElem::ONE]
        );
    }

    #[test]
    fn published_middle_values_hit_every_orbit_once() {
        let ctx = FieldCtx::new(BinPoly::new(0x25)).unwrap();
        let reps = middle_representatives(&ctx);
        let mut hit: Vec<FieldElem> = [0, 1, 3, 5, 7, 11, 15]
            .iter()
            .map(|&k| {
                let e = ctx.alpha_pow(k).unwrap();
                CoeffVec::new(vec![e])
                    .unwrap()
                    .class_representative(&ctx)
                    .coeffs()[0]
            })
            .collect();
        hit.sort();
        assert_eq!(hit, reps);
    }

    #[test]
    fn candidate_counts() {
        let full8 = SearchSpec::new(8, BinPoly::new(0x13), SearchMode::Full).unwrap();
        assert_eq!(candidate_count(&full8), 15u128.pow(7));
        let sym16 = SearchSpec::new(16, BinPoly::new(0x25), SearchMode::Symmetric).unwrap();
        assert_eq!(candidate_count(&sym16), 31u128.pow(8));
        let reps = middle_representatives(&sym16.ctx);
        let restricted = sym16.with_middle_reps(reps).unwrap();
        assert_eq!(candidate_count(&restricted), 7 * 31u128.pow(7));
        let sym5 = SearchSpec::new(5, BinPoly::new(0x13), SearchMode::Symmetric).unwrap();
        assert_eq!(candidate_count(&sym5), 15u128.pow(2));
    }

    #[test]
    fn enumeration_order_and_symmetry() {
        let spec = SearchSpec::new(4, gf8(), SearchMode::Full).unwrap();
        let all: Vec<CoeffVec> = enumerate_candidates(&spec).collect();
        assert_eq!(all.len(), 343);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(all[0].coeffs(), &[FieldElem(1); 4]);
        let sym = SearchSpec::new(5, gf8(), SearchMode::Symmetric).unwrap();
        let all: Vec<CoeffVec> = enumerate_candidates(&sym).collect();
        assert_eq!(all.len(), 49);
        assert!(all.iter().all(CoeffVec::is_symmetric));
    }

    #[test]
    fn partitions_are_disjoint_and_cover() {
        let base = SearchSpec::new(4, gf8(), SearchMode::Full).unwrap();
        let all: Vec<CoeffVec> = enumerate_candidates(&base).collect();
        for n in [2, 3, 7] {
            let mut union = Vec::new();
            for i in 0..n {
                let part: Vec<CoeffVec> =
                    enumerate_candidates(&base.clone().with_partition(i, n).unwrap()).collect();
                assert_eq!(
                    part.len(),
                    all.iter().skip(i as usize).step_by(n as usize).count()
                );
                union.extend(part);
            }
            union.sort();
            assert_eq!(union, all);
        }
    }

    #[test]
    fn middle_reps_validation() {
        let odd = SearchSpec::new(5, gf8(), SearchMode::Symmetric).unwrap();
        assert!(odd.with_middle_reps(vec![FieldElem::ONE]).is_err());
        let full = SearchSpec::new(4, gf8(), SearchMode::Full).unwrap();
        assert!(full.with_middle_reps(vec![FieldElem::ONE]).is_err());
        let sym = SearchSpec::new(4, gf8(), SearchMode::Symmetric).unwrap();
        assert!(sym.clone().with_middle_reps(vec![FieldElem::ZERO]).is_err());
        assert!(sym
            .with_middle_reps(vec![FieldElem(3), FieldElem(3)])
            .is_err());
    }

    #[test]
    fn four_by_four_over_gf8() {
        let spec = SearchSpec::new(4, gf8(), SearchMode::Full).unwrap();
        let r = run_search(&spec).unwrap();
        assert_eq!(r.solutions.len(), 3);
        assert_eq!(r.classes.len(), 1);
        assert_eq!(r.candidates_tested, 343);
        assert!(r.complete);
        let published = CoeffVec::from_alpha_powers(&[0, 3, 1, 3], &spec.ctx).unwrap();
        assert!(r.solutions.contains(&published));
        for s in &r.solutions {
            assert!(is_mds(&s.diffusion_matrix(&spec.ctx).unwrap(), &spec.ctx).is_mds);
        }
    }

    #[test]
    fn kernel_agrees_with_reference_check() {
        let ctx = FieldCtx::new(BinPoly::new(0x13)).unwrap();
        let spec = SearchSpec::new(5, ctx.modulus(), SearchMode::Full).unwrap();
        let mut kernel = Kernel::new(&ctx, 5);
        for cv in enumerate_candidates(&spec).step_by(97) {
            let raw: Vec<u16> = cv.coeffs().iter().map(|c| c.value()).collect();
            let want = is_mds(&cv.diffusion_matrix(&ctx).unwrap(), &ctx).is_mds;
            assert_eq!(kernel.is_solution(&raw), want);
        }
        // the log-table path (no product table for d > 8)
        let big = FieldCtx::new(BinPoly::new(0x211)).unwrap();
        let mut kernel = Kernel::new(&big, 3);
        let mut compared = 0;
        for k in 0..50 {
            let cv = CoeffVec::from_alpha_powers(&[0, 5 + k, 300 + 7 * k], &big).unwrap();
            let raw: Vec<u16> = cv.coeffs().iter().map(|c| c.value()).collect();
            let m = cv.diffusion_matrix(&big).unwrap();
            let has_zero = m.entries().contains(&FieldElem::ZERO);
            assert_eq!(kernel.diffusion_rows(&raw), !has_zero);
            if !has_zero {
                let want: Vec<u16> = m.entries().iter().map(|e| e.value()).collect();
                assert_eq!(kernel.rows, want);
                compared += 1;
            }
        }
        assert!(compared > 0);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let base = SearchSpec::new(4, gf8(), SearchMode::Full).unwrap();
        let reference = run_search(&base).unwrap().solutions;
        for n in [1u64, 2, 7] {
            let mut union = Vec::new();
            let mut tested = 0;
            for i in 0..n {
                let r = run_search(&base.clone().with_partition(i, n).unwrap()).unwrap();
                tested += r.candidates_tested;
                union.extend(r.solutions);
            }
            union.sort();
            assert_eq!(union, reference);
            assert_eq!(tested, 343);
        }
        let threaded = run_search_with(
            &base,
            SearchOptions {
                workers: Some(3),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(threaded.solutions, reference);
    }

    #[test]
    fn stop_and_resume() {
        let spec = SearchSpec::new(5, BinPoly::new(0x13), SearchMode::Full).unwrap();
        let stop = Arc::new(AtomicBool::new(true));
        let r = run_search_with(
            &spec,
            SearchOptions {
                stop: Some(stop),
                ..Default::default()
            },
        )
        .unwrap();
        assert!(!r.complete);
        assert_eq!(r.candidates_tested, 0);

        let cp = Checkpoint {
            next_index: 0,
            spec_hash: spec.hash(),
            solutions: vec![],
        };
        let text = cp.to_text();
        assert_eq!(Checkpoint::from_text(&text).unwrap(), cp);
        let done = run_search_with(
            &spec,
            SearchOptions {
                resume: Some(cp),
                ..Default::default()
            },
        )
        .unwrap();
        assert!(done.complete);
        assert_eq!(done.solutions.len(), 60);

        let wrong = Checkpoint {
            next_index: 0,
            spec_hash: "deadbeef".into(),
            solutions: vec![],
        };
        assert!(run_search_with(
            &spec,
            SearchOptions {
                resume: Some(wrong),
                ..Default::default()
            }
        )
        .is_err());
    }

    #[test]
    fn checkpoint_resume_mid_stream_matches_uninterrupted_run() {
        // a partitioned ell = 6 search so there are several blocks
        let spec = SearchSpec::new(6, BinPoly::new(0x13), SearchMode::Full).unwrap();
        let mut checkpoints = Vec::new();
        let full = run_search_with(
            &spec,
            SearchOptions {
                on_checkpoint: Some(Box::new(|c: &Checkpoint| checkpoints.push(c.clone()))),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(full.candidates_tested, 15u64.pow(5));
        assert!(!checkpoints.is_empty());
        let first = checkpoints[0].clone();
        assert_eq!(first.next_index, CHECKPOINT_INTERVAL.min(15u64.pow(5)));
        let resumed = run_search_with(
            &spec,
            SearchOptions {
                resume: Some(first),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(resumed.solutions, full.solutions);
        assert_eq!(resumed.candidates_tested, full.candidates_tested);
    }

    #[test]
    fn bound_violation_is_refused() {
        let spec = SearchSpec::new(8, gf8(), SearchMode::Full).unwrap();
        assert!(matches!(
            run_search(&spec),
            Err(Error::BoundViolated { ell: 8, degree: 3 })
        ));
    }
}
