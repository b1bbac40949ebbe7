//! Moving solutions between F2[X]/p1 and F2[X]/p2 for two irreducibles of the
//! same degree, through the substitution `X <- K(X)` where `K(α2)` is a root of
//! `p1` in the target field.

use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElem};
use crate::matrix::CoeffVec;
use crate::poly::BinPoly;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RetargetMap {
    pub source: BinPoly,
    pub target: BinPoly,
    /// Satisfies `source(K) = 0 mod target`, `deg K < deg target`.
    pub k: BinPoly,
}

/// Picks the smallest-bitmask root of `source` in F2[X]/target. Other roots
/// differ by a Frobenius power and give equivalent results.
pub fn find_k(source: BinPoly, target: BinPoly) -> Result<RetargetMap> {
    if source.degree() != target.degree() {
        return Err(Error::DegreeMismatch(
            source,
            source.degree(),
            target,
            target.degree(),
        ));
    }
    if !source.is_irreducible()? {
        return Err(Error::Reducible(source));
    }
    let ctx = FieldCtx::new(target)?;
    let root =
        ctx.roots(source)?.into_iter().min().ok_or_else(|| {
            Error::Internal(format!("{source:#x} has no root modulo {target:#x}"))
        })?;
    Ok(RetargetMap {
        source,
        target,
        k: root.as_poly(),
    })
}

impl RetargetMap {
    /// Image of one element of F2[X]/source.
    pub fn map_elem(&self, e: FieldElem) -> Result<FieldElem> {
        let image = e.as_poly().compose_mod(self.k, self.target)?;
        Ok(FieldElem(image.bits() as u16))
    }
}

/// Transports every coefficient through the field isomorphism.
pub fn retarget_solution(cv: &CoeffVec, map: &RetargetMap) -> Result<CoeffVec> {
    let coeffs = cv
        .coeffs()
        .iter()
        .map(|&c| map.map_elem(c))
        .collect::<Result<Vec<_>>>()?;
    CoeffVec::new(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minors::is_mds;
    use crate::poly::irreducibles;
    use crate::symbolic::PolyMatrix;

    const P1: BinPoly = BinPoly::new(0x13);
    const P2: BinPoly = BinPoly::new(0x19);

    fn s2(ctx: &FieldCtx) -> CoeffVec {
        CoeffVec::from_alpha_powers(&[0, 12, 1, 3, 2, 3, 1, 12], ctx).unwrap()
    }

    #[test]
    fn identity_map() {
        let map = find_k(P1, P1).unwrap();
        assert_eq!(map.k, BinPoly::X);
        let ctx = FieldCtx::new(P1).unwrap();
        assert_eq!(retarget_solution(&s2(&ctx), &map).unwrap(), s2(&ctx));
    }

    #[test]
    fn k_is_a_root() {
        let map = find_k(P1, P2).unwrap();
        assert!(P1.compose_mod(map.k, P2).unwrap().is_zero());
        assert!(map.k.degree() < P2.degree());
        assert_eq!(map.map_elem(FieldElem::ONE).unwrap(), FieldElem::ONE);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            find_k(P1, BinPoly::new(0x25)),
            Err(Error::DegreeMismatch(..))
        ));
        assert!(matches!(
            find_k(BinPoly::new(0b10101), P1),
            Err(Error::Reducible(_))
        ));
    }

    #[test]
    fn transported_solution_stays_mds() {
        let src = FieldCtx::new(P1).unwrap();
        let dst = FieldCtx::new(P2).unwrap();
        let out = retarget_solution(&s2(&src), &find_k(P1, P2).unwrap()).unwrap();
        assert!(is_mds(&out.diffusion_matrix(&dst).unwrap(), &dst).is_mds);
    }

    #[test]
    fn composition_lands_in_the_direct_orbit() {
        let degree4 = irreducibles(4).unwrap();
        let src = FieldCtx::new(P1).unwrap();
        let cv = s2(&src);
        for &mid in &degree4 {
            for &dst in &degree4 {
                let two_step = retarget_solution(
                    &retarget_solution(&cv, &find_k(P1, mid).unwrap()).unwrap(),
                    &find_k(mid, dst).unwrap(),
                )
                .unwrap();
                let direct = retarget_solution(&cv, &find_k(P1, dst).unwrap()).unwrap();
                let dst_ctx = FieldCtx::new(dst).unwrap();
                assert!(direct.frobenius_orbit(&dst_ctx).contains(&two_step));
            }
        }
    }

    #[test]
    fn reduction_commutes_with_substitution() {
        let src = FieldCtx::new(P1).unwrap();
        let map = find_k(P1, P2).unwrap();
        let cv = s2(&src);
        let sym = PolyMatrix::companion_of(&cv).unwrap();
        // power first (reduced mod p1), then substitute and reduce mod p2
        let before = sym
            .pow(8, Some(P1))
            .unwrap()
            .compose_mod(map.k, P2)
            .unwrap();
        // substitute first, then power reduced mod p2
        let after = sym
            .compose_mod(map.k, P2)
            .unwrap()
            .pow(8, Some(P2))
            .unwrap();
        assert_eq!(before, after);
        let transported = retarget_solution(&cv, &map).unwrap();
        assert_eq!(
            after.eval_at(&FieldCtx::new(P2).unwrap()),
            transported
                .diffusion_matrix(&FieldCtx::new(P2).unwrap())
                .unwrap()
        );
    }
}
