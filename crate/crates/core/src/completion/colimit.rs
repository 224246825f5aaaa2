//! Directed colimits of isometry chains and codirected ℓ²-limits.
//!
//! A finite chain `X₀ → X₁ → … → Xₙ` of isometries has colimit `Xₙ` with
//! legs the suffix composites. Codirected sequences `X₀ ← X₁ ← …` of
//! contractions are limited through the supremum of the cone Grams.

use std::sync::Arc;

use crate::completion::dilation::{codilation, Codilation};
use crate::completion::sup::{monotone_supremum, Direction, MonotoneChain};
use crate::error::{Error, Result};
use crate::linalg::{FieldTag, HermMat, Mat, Tolerance, C64};
use crate::star::{classify_morphism, gram, HermEndo, Mor, Obj};

#[derive(Clone, Debug, PartialEq)]
pub struct IsometryColimit {
    pub apex: Obj,
    /// `X₀, …, Xₙ`.
    pub objects: Vec<Obj>,
    /// `legs[j] : X_j → apex`; the last leg is the identity.
    pub legs: Vec<Mor>,
}

pub fn finite_directed_colimit_isometries(base: &Obj, chain: &[Mor], tol: &Tolerance) -> Result<IsometryColimit> {
    let mut objects = vec![base.clone()];
    for (j, f) in chain.iter().enumerate() {
        if f.dom() != objects.last().expect("nonempty") {
            return Err(Error::NotComposable(format!(
                "chain map {j} does not start where map {} ends",
                j.wrapping_sub(1) as isize
            )));
        }
        if !classify_morphism(f, tol)?.isometry {
            return Err(Error::NotIsometric(format!("chain map {j}")));
        }
        objects.push(f.cod().clone());
    }
    let apex = objects.last().expect("nonempty").clone();
    let mut legs = vec![apex.identity()];
    for f in chain.iter().rev() {
        let next = legs.last().expect("nonempty").compose(f)?;
        legs.push(next);
    }
    legs.reverse();
    Ok(IsometryColimit { apex, objects, legs })
}

/// `max_j ‖c_{j+1} f_j − c_j‖` for a candidate cocone on the chain behind `colim`.
pub fn cocone_defect(colim: &IsometryColimit, cocone: &[Mor]) -> Result<f64> {
    if cocone.len() != colim.objects.len() {
        return Err(Error::NotCocone(format!(
            "{} legs for {} objects",
            cocone.len(),
            colim.objects.len()
        )));
    }
    let target = cocone[0].cod();
    for (j, c) in cocone.iter().enumerate() {
        if c.dom() != &colim.objects[j] || c.cod() != target {
            return Err(Error::NotCocone(format!("leg {j} has the wrong domain or codomain")));
        }
    }
    // The chain map X_j → X_{j+1} is recovered as leg_{j+1}* leg_j.
    let mut worst = 0.0f64;
    for j in 0..cocone.len() - 1 {
        let f = colim.legs[j + 1].dag().compose(&colim.legs[j])?;
        worst = worst.max((cocone[j + 1].compose(&f)?.mat() - cocone[j].mat()).norm());
    }
    Ok(worst)
}

fn check_cocone(colim: &IsometryColimit, cocone: &[Mor], tol: &Tolerance) -> Result<()> {
    let d = cocone_defect(colim, cocone)?;
    let scale = cocone.iter().map(Mor::norm).fold(0.0, f64::max);
    if tol.close(d, scale) {
        Ok(())
    } else {
        Err(Error::NotCocone(format!("compatibility residual {d:e}")))
    }
}

#[derive(Clone, Debug)]
pub struct ColimitMediator {
    pub m: Mor,
    /// `max_j ‖m leg_j − c_j‖`.
    pub residual: f64,
    /// `‖m* m − 1‖`.
    pub isometry_defect: f64,
}

/// The mediating map out of the colimit: the top cocone leg, since the top
/// leg of the colimit is the identity.
pub fn colimit_mediating(colim: &IsometryColimit, cocone: &[Mor], tol: &Tolerance) -> Result<ColimitMediator> {
    check_cocone(colim, cocone, tol)?;
    let m = cocone.last().expect("cocones are nonempty").clone();
    let mut residual = 0.0f64;
    for (leg, c) in colim.legs.iter().zip(cocone) {
        residual = residual.max((m.compose(leg)?.mat() - c.mat()).norm());
    }
    let n = m.dom().dim();
    let isometry_defect = (gram(&m).as_mor().mat() - &Mat::identity(n, m.field())).norm();
    Ok(ColimitMediator {
        m,
        residual,
        isometry_defect,
    })
}

/// The contraction `a` out of the colimit with `a leg_j = a_j`, with a
/// codilation of `a` as witness.
pub fn mediating_via_codilator(colim: &IsometryColimit, cone: &[Mor], tol: &Tolerance) -> Result<(Mor, Codilation)> {
    for (j, a) in cone.iter().enumerate() {
        if !classify_morphism(a, tol)?.contraction {
            return Err(Error::NotContraction(format!("cocone leg {j}")));
        }
    }
    check_cocone(colim, cone, tol)?;
    let a = cone.last().expect("cocones are nonempty").clone();
    let witness = codilation(&a, tol)?;
    Ok((a, witness))
}

/// The map between two colimits induced by naturality squares
/// `c_{j+1} f_j = g_j c_j`, with its coisometry residual `‖m m* − 1‖`.
pub fn induced_colimit_map(
    from: &IsometryColimit,
    to: &IsometryColimit,
    squares: &[Mor],
    tol: &Tolerance,
) -> Result<(Mor, f64)> {
    if squares.len() != from.objects.len() || squares.len() != to.objects.len() {
        return Err(Error::ShapeMismatch(
            "naturality squares do not match the chains".into(),
        ));
    }
    let cocone: Vec<Mor> = squares
        .iter()
        .zip(&to.legs)
        .map(|(c, leg)| leg.compose(c))
        .collect::<Result<_>>()?;
    let med = colimit_mediating(from, &cocone, tol)?;
    let n = med.m.cod().dim();
    let defect = (&(med.m.mat() * &med.m.mat().adjoint()) - &Mat::identity(n, med.m.field())).norm();
    Ok((med.m, defect))
}

pub type MorFn = Arc<dyn Fn(usize) -> Mor + Send + Sync>;

/// A codirected sequence `X₀ ← X₁ ← …` of contractions with a cone `x_j : A → X_j`.
#[derive(Clone)]
pub enum CodirectedCone {
    /// `maps[j] : X_{j+1} → X_j`, `cone.len() == maps.len() + 1`.
    Finite { maps: Vec<Mor>, cone: Vec<Mor> },
    Lazy {
        apex: Obj,
        map: MorFn,
        cone: MorFn,
        bound: Option<HermMat>,
    },
}

#[derive(Clone, Debug)]
pub struct L2Limit {
    pub mediating_gram: HermEndo,
    /// The cone component at `level`.
    pub truncated_mediating: Mor,
    pub level: usize,
    /// Cauchy gap of the Gram sequence where it was stopped (zero when finite).
    pub epsilon: f64,
}

fn cone_step_defect(map: &Mor, upper: &Mor, lower: &Mor, j: usize) -> Result<f64> {
    let composed = map
        .compose(upper)
        .map_err(|_| Error::NotCone(format!("cone leg {} does not compose with map {j}", j + 1)))?;
    if composed.cod() != lower.cod() || composed.dom() != lower.dom() {
        return Err(Error::NotCone(format!("cone leg {j} has the wrong domain or codomain")));
    }
    Ok((composed.mat() - lower.mat()).norm())
}

pub fn l2_limit_truncated(diagram: &CodirectedCone, tol: &Tolerance) -> Result<L2Limit> {
    match diagram {
        CodirectedCone::Finite { maps, cone } => {
            if cone.len() != maps.len() + 1 {
                return Err(Error::NotCone(format!(
                    "{} legs for {} objects",
                    cone.len(),
                    maps.len() + 1
                )));
            }
            for (j, f) in maps.iter().enumerate() {
                let d = cone_step_defect(f, &cone[j + 1], &cone[j], j)?;
                if !tol.close(d, cone[j].norm().max(cone[j + 1].norm())) {
                    return Err(Error::NotCone(format!("square {j} residual {d:e}")));
                }
            }
            let top = cone.last().expect("nonempty").clone();
            Ok(L2Limit {
                mediating_gram: gram(&top),
                truncated_mediating: top,
                level: maps.len(),
                epsilon: 0.0,
            })
        }
        CodirectedCone::Lazy { apex, map, cone, bound } => {
            let bound = bound.clone().ok_or(Error::NoBound)?;
            let grams = {
                let cone = cone.clone();
                Arc::new(move |n: usize| gram(&cone(n)).to_herm_mat())
            };
            let chain =
                MonotoneChain::lazy(apex.dim(), apex.field(), grams, Direction::Increasing).with_bound(bound)?;
            let sup = monotone_supremum(&chain, tol)?;
            for j in 0..sup.index {
                let (lower, upper) = (cone(j), cone(j + 1));
                let d = cone_step_defect(&map(j), &upper, &lower, j)?;
                if !tol.close(d, lower.norm().max(upper.norm())) {
                    return Err(Error::NotCone(format!("square {j} residual {d:e}")));
                }
            }
            let top = cone(sup.index);
            Ok(L2Limit {
                mediating_gram: HermEndo::from_herm(apex, sup.value),
                truncated_mediating: top,
                level: sup.index,
                epsilon: sup.last_gap,
            })
        }
    }
}

/// The truncation chain `𝕂 ← 𝕂² ← 𝕂³ ← …` with cone `x_k = (2⁻¹, …, 2⁻ᵏ)ᵀ`,
/// indexed from `k = 1` at position 0.
pub fn truncation_chain_cone(field: FieldTag) -> CodirectedCone {
    let apex = Obj::fd(1, field);
    let map: MorFn = Arc::new(move |j| {
        let m = Mat::from_fn(j + 1, j + 2, field, |r, c| {
            C64::new(if r == c { 1.0 } else { 0.0 }, 0.0)
        });
        Mor::new(Obj::fd(j + 2, field), Obj::fd(j + 1, field), m).expect("truncation shape")
    });
    let cone: MorFn = Arc::new(move |j| archimedean_witness(j + 1, field));
    CodirectedCone::Lazy {
        apex,
        map,
        cone,
        bound: Some(HermMat::identity(1, field).scale(1.0 / 3.0)),
    }
}

/// The column `(2⁻¹, …, 2⁻ⁿ)ᵀ : 𝕂 → 𝕂ⁿ`, a strict contraction with Gram `(1 − 4⁻ⁿ)/3`.
pub fn archimedean_witness(n: usize, field: FieldTag) -> Mor {
    let m = Mat::from_fn(n, 1, field, |r, _| C64::new(0.5f64.powi(r as i32 + 1), 0.0));
    Mor::new(Obj::fd(1, field), Obj::fd(n, field), m).expect("column shape")
}

#[cfg(test)]
mod tests {
    use super::*;

    const R: FieldTag = FieldTag::Real;

    fn t() -> Tolerance {
        Tolerance::default()
    }

    fn embed(m: usize, n: usize) -> Mor {
        let mat = Mat::from_fn(n, m, R, |r, c| C64::new(if r == c { 1.0 } else { 0.0 }, 0.0));
        Mor::new(Obj::fd(m, R), Obj::fd(n, R), mat).unwrap()
    }

    #[test]
    fn empty_chain() {
        let o = Obj::fd(2, R);
        let c = finite_directed_colimit_isometries(&o, &[], &t()).unwrap();
        assert_eq!(c.apex, o);
        assert_eq!(c.legs, vec![o.identity()]);
    }

    #[test]
    fn standard_embeddings() {
        let c = finite_directed_colimit_isometries(&Obj::fd(1, R), &[embed(1, 2), embed(2, 3)], &t()).unwrap();
        assert_eq!(c.apex.dim(), 3);
        assert_eq!(c.legs[0], embed(1, 3));
        assert_eq!(cocone_defect(&c, &c.legs).unwrap(), 0.0);
        let med = colimit_mediating(&c, &c.legs, &t()).unwrap();
        assert_eq!(med.residual, 0.0);
    }

    #[test]
    fn rejects_non_isometries() {
        let f = embed(1, 2).scale(0.5);
        assert!(matches!(
            finite_directed_colimit_isometries(&Obj::fd(1, R), &[f], &t()),
            Err(Error::NotIsometric(_))
        ));
        assert!(matches!(
            finite_directed_colimit_isometries(&Obj::fd(1, R), &[embed(2, 3)], &t()),
            Err(Error::NotComposable(_))
        ));
    }

    #[test]
    fn zero_cocone_mediates_to_zero() {
        let c = finite_directed_colimit_isometries(&Obj::fd(1, R), &[embed(1, 2)], &t()).unwrap();
        let target = Obj::fd(3, R);
        let cone: Vec<Mor> = c.objects.iter().map(|o| Mor::zero(o, &target)).collect();
        let (a, w) = mediating_via_codilator(&c, &cone, &t()).unwrap();
        assert_eq!(a.norm(), 0.0);
        assert!(w.jointly_epic);
    }

    #[test]
    fn witness_grams() {
        assert_eq!(gram(&archimedean_witness(1, R)).as_mor().mat().get(0, 0).re, 0.25);
        assert_eq!(gram(&archimedean_witness(2, R)).as_mor().mat().get(0, 0).re, 0.3125);
        assert!(
            classify_morphism(&archimedean_witness(5, R), &t())
                .unwrap()
                .strict_contraction
        );
    }

    #[test]
    fn truncation_chain_limit_is_one_third() {
        let l = l2_limit_truncated(&truncation_chain_cone(R), &t()).unwrap();
        let g = l.mediating_gram.as_mor().mat().get(0, 0).re;
        assert!((g - 1.0 / 3.0).abs() <= 1e-9, "{g}");
    }

    #[test]
    fn finite_codirected_returns_top() {
        let maps = vec![embed(2, 3).dag(), embed(3, 4).dag()];
        let x = Mor::new(
            Obj::fd(1, R),
            Obj::fd(4, R),
            Mat::from_real(4, 1, &[1.0, 2.0, 3.0, 4.0]).unwrap(),
        )
        .unwrap();
        let cone = vec![
            embed(2, 4).dag().compose(&x).unwrap(),
            embed(3, 4).dag().compose(&x).unwrap(),
            x.clone(),
        ];
        let l = l2_limit_truncated(&CodirectedCone::Finite { maps, cone }, &t()).unwrap();
        assert_eq!(l.truncated_mediating, x);
        assert_eq!(l.mediating_gram.as_mor().mat().get(0, 0).re, 30.0);
    }
}
