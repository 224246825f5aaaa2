//! Codilations `(T, t₁, t₂)` of contractions: isometries with `t₂* t₁ = f`.

use crate::error::{Error, Result};
use crate::linalg::{pinv, positive_sqrt, range_null_bases, HermMat, Mat, Tolerance};
use crate::star::{classify_morphism, orthonormal_product, HermEndo, Mor, Obj};

#[derive(Clone, Debug, PartialEq)]
pub struct Codilation {
    pub apex: Obj,
    pub t1: Mor,
    pub t2: Mor,
    pub jointly_epic: bool,
}

/// Residuals of the codilation equations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CodilationResiduals {
    pub t1_isometry: f64,
    pub t2_isometry: f64,
    pub factorization: f64,
}

impl Codilation {
    pub fn residuals(&self, f: &Mor) -> CodilationResiduals {
        let iso = |m: &Mat| (&(&m.adjoint() * m) - &Mat::identity(m.cols(), m.field())).norm();
        CodilationResiduals {
            t1_isometry: iso(self.t1.mat()),
            t2_isometry: iso(self.t2.mat()),
            factorization: (&(&self.t2.mat().adjoint() * self.t1.mat()) - f.mat()).norm(),
        }
    }

    /// Numerical rank of `[t₁ t₂]` against the apex dimension.
    pub fn joint_rank(&self, tol: &Tolerance) -> Result<usize> {
        let joint = Mat::hstack(&[self.t1.mat(), self.t2.mat()], self.apex.dim(), self.apex.field())?;
        Ok(range_null_bases(&joint, tol)?.rank)
    }
}

/// The column codilation on `dom(f) ⊕ cod(f)`:
/// `t₁ = (√(1 − f*f); f)`, `t₂ = i₂`. Jointly epic exactly when `f` is strict.
pub fn codilation(f: &Mor, tol: &Tolerance) -> Result<Codilation> {
    let class = classify_morphism(f, tol)?;
    if !class.contraction {
        return Err(Error::NotContraction("codilations exist only for contractions".into()));
    }
    let (x, y) = (f.dom(), f.cod());
    let m = f.mat();
    let defect = HermMat::symmetrize(&(&Mat::identity(x.dim(), m.field()) - &(&m.adjoint() * m)));
    let root = HermEndo::from_herm(x, positive_sqrt(&defect, tol)?);
    let bp = orthonormal_product(&f.instance(), &[x.clone(), y.clone()])?;
    let t1 = bp.injections[0]
        .compose(root.as_mor())?
        .add(&bp.injections[1].compose(f)?)?;
    Ok(Codilation {
        apex: bp.apex.clone(),
        t1,
        t2: bp.injections[1].clone(),
        jointly_epic: class.strict_contraction,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UniversalityStatus {
    /// Jointly epic codilation of a strict contraction.
    Universal,
    /// `f` is not strict; whether the compressed codilation is universal is not decided.
    UniversalityUnverified,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Codilator {
    pub codilation: Codilation,
    pub status: UniversalityStatus,
}

/// Compresses the column codilation onto the joint range of `t₁` and `t₂`.
pub fn codilator(f: &Mor, tol: &Tolerance) -> Result<Codilator> {
    let base = codilation(f, tol)?;
    let joint = Mat::hstack(&[base.t1.mat(), base.t2.mat()], base.apex.dim(), base.apex.field())?;
    let q = range_null_bases(&joint, tol)?.range_basis;
    let incl = base.apex.restrict(&q, tol)?;
    let back = incl.dag();
    let t1 = back.compose(&base.t1)?;
    let t2 = back.compose(&base.t2)?;
    let status = if base.jointly_epic {
        UniversalityStatus::Universal
    } else {
        UniversalityStatus::UniversalityUnverified
    };
    Ok(Codilator {
        codilation: Codilation {
            apex: incl.dom().clone(),
            t1,
            t2,
            jointly_epic: true,
        },
        status,
    })
}

/// The mediating map from a codilator into another codilation of the same morphism.
#[derive(Clone, Debug)]
pub struct Mediator {
    pub t: Mor,
    /// `max(‖t f₁ − t₁'‖, ‖t f₂ − t₂'‖)`.
    pub residual: f64,
    /// `‖t* t − 1‖`.
    pub isometry_defect: f64,
}

/// Solves `t f₁ = t₁'`, `t f₂ = t₂'` by least squares on the jointly epic legs.
pub fn codilator_mediator(codilator: &Codilation, other: &Codilation, tol: &Tolerance) -> Result<Mediator> {
    if codilator.t1.dom() != other.t1.dom() || codilator.t2.dom() != other.t2.dom() {
        return Err(Error::ShapeMismatch("codilations of different morphisms".into()));
    }
    let field = codilator.apex.field();
    let legs = Mat::hstack(&[codilator.t1.mat(), codilator.t2.mat()], codilator.apex.dim(), field)?;
    let targets = Mat::hstack(&[other.t1.mat(), other.t2.mat()], other.apex.dim(), field)?;
    let tm = &targets * &pinv(&legs, tol)?;
    let t = Mor::new_with_tol(codilator.apex.clone(), other.apex.clone(), tm, tol)?;
    let r1 = (&(t.mat() * codilator.t1.mat()) - other.t1.mat()).norm();
    let r2 = (&(t.mat() * codilator.t2.mat()) - other.t2.mat()).norm();
    let isometry_defect = (&(&t.mat().adjoint() * t.mat()) - &Mat::identity(t.dom().dim(), field)).norm();
    Ok(Mediator {
        t,
        residual: r1.max(r2),
        isometry_defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::FieldTag;

    fn t() -> Tolerance {
        Tolerance::default()
    }

    fn scalar(x: f64) -> Mor {
        let o = Obj::fd(1, FieldTag::Real);
        Mor::new(o.clone(), o, Mat::from_real(1, 1, &[x]).unwrap()).unwrap()
    }

    #[test]
    fn zero_morphism_codilation() {
        let c = codilation(&scalar(0.0), &t()).unwrap();
        assert_eq!(c.t1.mat(), &Mat::from_real(2, 1, &[1.0, 0.0]).unwrap());
        assert_eq!(c.t2.mat(), &Mat::from_real(2, 1, &[0.0, 1.0]).unwrap());
        let cd = codilator(&scalar(0.0), &t()).unwrap();
        assert_eq!(cd.codilation.apex.dim(), 2);
    }

    #[test]
    fn half_scalar() {
        let c = codilation(&scalar(0.5), &t()).unwrap();
        assert!((c.t1.mat().get(0, 0).re - 3f64.sqrt() / 2.0).abs() < 1e-15);
        assert_eq!(c.t1.mat().get(1, 0).re, 0.5);
        assert!(c.jointly_epic);
        let r = c.residuals(&scalar(0.5));
        assert!(r.t1_isometry < 1e-15 && r.t2_isometry == 0.0 && r.factorization < 1e-15);
        let cd = codilator(&scalar(0.5), &t()).unwrap();
        assert_eq!(cd.status, UniversalityStatus::Universal);
        assert_eq!(cd.codilation.apex.dim(), 2);
    }

    #[test]
    fn isometry_compresses_to_codomain() {
        let o1 = Obj::fd(1, FieldTag::Real);
        let o2 = Obj::fd(2, FieldTag::Real);
        let f = Mor::new(o1, o2, Mat::from_real(2, 1, &[0.6, 0.8]).unwrap()).unwrap();
        let cd = codilator(&f, &t()).unwrap();
        assert_eq!(cd.codilation.apex.dim(), 2);
        assert_eq!(cd.status, UniversalityStatus::UniversalityUnverified);
        let c = classify_morphism(&cd.codilation.t2, &t()).unwrap();
        assert!(c.unitary);
    }

    #[test]
    fn rejects_expansions() {
        assert!(matches!(codilation(&scalar(1.5), &t()), Err(Error::NotContraction(_))));
    }
}
