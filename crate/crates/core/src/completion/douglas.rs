//! Douglas factorization: given `f : A → X` and `g : A → Y` with equal
//! Gram matrices, find `h : X → Y` with `h f = g`.
//!
//! With `F = ⟨f, g⟩ : A → X ⊕ Y` and `a = F*F / 2`, the increasing sequence
//! `d_n = F (a + 4⁻ⁿ)⁻¹ F*` is bounded by 2; its supremum `d` satisfies
//! `d² = 2d`, and `h = p₂ d i₁` factors `g` through `f`.

use std::sync::Arc;

use crate::completion::sup::{monotone_supremum, Direction, MonotoneChain};
use crate::error::{Error, Result};
use crate::linalg::{svd, HermMat, Mat, Tolerance};
use crate::star::{gram, orthonormal_product, HermEndo, Mor};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DouglasResiduals {
    /// `‖d² − 2d‖`.
    pub idempotence: f64,
    /// `‖h f − g‖`.
    pub factorization: f64,
}

#[derive(Clone, Debug)]
pub struct DouglasTrace {
    pub a: HermEndo,
    pub d_terms: Vec<HermMat>,
    pub d: HermEndo,
    pub h: Mor,
    /// Index of the `d_n` returned as the supremum.
    pub iterations: usize,
    pub residuals: DouglasResiduals,
}

pub fn douglas_factor(f: &Mor, g: &Mor, tol: &Tolerance) -> Result<DouglasTrace> {
    if f.dom() != g.dom() {
        return Err(Error::ShapeMismatch("f and g must share their domain".into()));
    }
    let (gf, gg) = (gram(f).to_herm_mat(), gram(g).to_herm_mat());
    let residual = gf.sub(&gg).norm();
    let threshold = tol.threshold(gf.norm().max(gg.norm()));
    if residual > threshold {
        return Err(Error::GramMismatch { residual, threshold });
    }

    let bp = orthonormal_product(&f.instance(), &[f.cod().clone(), g.cod().clone()])?;
    let pair = bp.injections[0].compose(f)?.add(&bp.injections[1].compose(g)?)?;
    let a = gram(&pair).to_herm_mat().scale(0.5);

    // With pair = U Σ V*, d_n = U diag(σ² / (σ²/2 + 4⁻ⁿ)) U*. Working from the
    // SVD keeps every d_n below 2 exactly; forming F V from the eigenvectors
    // of `a` lets rounding push small directions past the bound. Directions
    // with σ²/2 below the PSD slack of `a` are annihilated by the pair up to
    // rounding and are dropped.
    let dec = svd(pair.mat(), tol)?;
    let cut = tol.threshold(a.norm());
    let kept: Vec<usize> = (0..dec.singular_values.len())
        .filter(|&i| dec.singular_values[i].powi(2) / 2.0 > cut)
        .collect();
    let sq: Arc<Vec<f64>> = Arc::new(kept.iter().map(|&i| dec.singular_values[i].powi(2)).collect());
    let w: Arc<Mat> = Arc::new(dec.u.columns(&kept));

    let apex_dim = bp.apex.dim();
    let field = f.field();
    let d_n = {
        let (w, sq) = (w.clone(), sq.clone());
        move |n: usize| {
            let eps = 0.25f64.powi(n as i32);
            let scaled = Mat::from_fn(w.rows(), w.cols(), w.field(), |i, j| {
                w.get(i, j) * (sq[j] / (sq[j] / 2.0 + eps))
            });
            HermMat::symmetrize(&(&scaled * &w.adjoint()))
        }
    };
    let chain = MonotoneChain::lazy(apex_dim, field, Arc::new(d_n), Direction::Increasing)
        .with_bound(HermMat::identity(apex_dim, field).scale(2.0))?;
    let sup = monotone_supremum(&chain, tol)?;

    let d = HermEndo::from_herm(&bp.apex, sup.value.clone());
    let h = bp.projections[1].compose(&d.as_mor().compose(&bp.injections[0])?)?;
    let dm = d.as_mor().mat();
    let idempotence = (&(dm * dm) - &dm.scale(2.0)).norm();
    let factorization = (&(h.mat() * f.mat()) - g.mat()).norm();
    Ok(DouglasTrace {
        a: HermEndo::from_herm(f.dom(), a),
        d_terms: sup.terms,
        d,
        h,
        iterations: sup.index,
        residuals: DouglasResiduals {
            idempotence,
            factorization,
        },
    })
}
