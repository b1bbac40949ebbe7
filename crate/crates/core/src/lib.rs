//! Recursive MDS diffusion layers: matrices `C^ell` where `C` is a companion
//! matrix over GF(2^d).
//!
//! The crate covers binary polynomials ([`poly`]), table-driven field
//! arithmetic ([`field`]), MDS checking by minors ([`minors`]) and by brute
//! force ([`oracle`]), the exhaustive coefficient search ([`search`]),
//! binary-operator instantiation ([`binlin`]) and moving solutions between
//! isomorphic fields ([`retarget`]).
//!
//! ```
//! use recmds::{BinPoly, CoeffVec, FieldCtx, is_mds};
//!
//! let ctx = FieldCtx::new(BinPoly::new(0xb))?;
//! let cv = CoeffVec::from_alpha_powers(&[0, 3, 1, 3], &ctx)?;
//! assert!(is_mds(&cv.diffusion_matrix(&ctx)?, &ctx).is_mds);
//! # Ok::<(), recmds::Error>(())
//! ```

pub mod binlin;
pub mod catalog;
pub mod error;
pub mod field;
pub mod matrix;
pub mod minors;
pub mod oracle;
pub mod poly;
pub mod records;
pub mod retarget;
pub mod search;
pub mod symbolic;

pub use binlin::{
    bit_branch_oracle, branch_breakdown, check_branch_general, instantiate, min_poly,
    shift_rotate_op, BinMatrix, BlockMatrix, FactorVerdict, ShiftSpec,
};
pub use error::{Error, Result};
pub use field::{FieldCtx, FieldElem};
pub use matrix::{companion, frobenius_orbit, inverse_symmetric, mat_pow, CoeffVec, FieldMatrix};
pub use minors::{is_mds, is_mds_ring, MinorReport};
pub use oracle::branch_number_oracle;
pub use poly::{irreducibles, BinPoly};
pub use retarget::{find_k, retarget_solution, RetargetMap};
pub use search::{
    candidate_count, check_bound, enumerate_candidates, middle_representatives, run_search,
    run_search_with, Checkpoint, SearchMode, SearchOptions, SearchResult, SearchSpec,
    SolutionClass,
};
pub use symbolic::PolyMatrix;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/fields.md")]
    mod fields {}
    #[doc = include_str!("../../../book/src/mds.md")]
    mod mds {}
    #[doc = include_str!("../../../book/src/search.md")]
    mod search {}
    #[doc = include_str!("../../../book/src/operators.md")]
    mod operators {}
    #[doc = include_str!("../../../book/src/retarget.md")]
    mod retarget {}
}
