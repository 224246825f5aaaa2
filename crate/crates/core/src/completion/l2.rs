//! ℓ²-products and the maps into and out of them.
//!
//! Finite ℓ²-products are orthonormal products. Countable ones are realized
//! as a truncation to the first `n` components, carrying the declared
//! allowance `eps` for the missing tail.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{Mat, Tolerance};
use crate::star::{
    classify_morphism, gram, orthonormal_product, range_isometry, BiproductStructure, Instance, Mor, Obj,
};

pub type ObjectFn = Arc<dyn Fn(usize) -> Obj + Send + Sync>;

#[derive(Clone)]
pub enum L2Components {
    Finite(Vec<Obj>),
    Truncated { generator: ObjectFn, n: usize, eps: f64 },
}

#[derive(Clone, Debug)]
pub struct L2Product {
    pub biproduct: BiproductStructure,
    /// Tail allowance relative to the intended infinite apex (zero when finite).
    pub epsilon: f64,
    /// `(max |p_j i_k − δ_jk|, max |Σ i_j p_j − 1|)` on the realized apex.
    pub equation_defects: (f64, f64),
}

pub fn l2_product(instance: &Instance, components: &L2Components) -> Result<L2Product> {
    let (objs, epsilon) = match components {
        L2Components::Finite(v) => (v.clone(), 0.0),
        L2Components::Truncated { generator, n, eps } => {
            if !(eps.is_finite() && *eps >= 0.0) {
                return Err(Error::InvalidInput(format!("truncation allowance {eps}")));
            }
            ((0..*n).map(|j| generator(j)).collect(), *eps)
        }
    };
    let biproduct = orthonormal_product(instance, &objs)?;
    let equation_defects = biproduct.equation_defects();
    Ok(L2Product {
        biproduct,
        epsilon,
        equation_defects,
    })
}

/// The map `g : Y → ⊕_j X_j` with `r_j g = g_j`, assembled as the order sum
/// of `i_j g_j` (accumulated from the first term, so the binary case is
/// literally `i₁g₁ + i₂g₂`).
pub fn l2_mediating(bp: &BiproductStructure, dom: &Obj, span: &[Mor], tol: &Tolerance) -> Result<Mor> {
    if span.len() != bp.len() {
        return Err(Error::NotL2Span(format!(
            "{} legs for {} components",
            span.len(),
            bp.len()
        )));
    }
    for (j, g) in span.iter().enumerate() {
        if g.dom() != dom || g.cod() != &bp.components[j] {
            return Err(Error::NotL2Span(format!(
                "leg {j} does not run from the common domain to component {j}"
            )));
        }
    }
    let mut terms = span.iter().zip(&bp.injections).map(|(g, i)| i.compose(g));
    let g = match terms.next() {
        None => Mor::zero(dom, &bp.apex),
        Some(first) => terms.try_fold(first?, |acc, t| acc.add(&t?))?,
    };
    // Finite spans are always bounded; the Gram identity is the residual check.
    let total = span
        .iter()
        .fold(Mat::zeros(dom.dim(), dom.dim(), dom.field()), |acc, gj| {
            &acc + gram(gj).as_mor().mat()
        });
    let res = (gram(&g).as_mor().mat() - &total).norm();
    if !tol.close(res, total.norm()) {
        return Err(Error::NotL2Span(format!("gram identity residual {res:e}")));
    }
    Ok(g)
}

/// `x = m y` with `m` an isometry onto the range of `x` and `y = m* x` epic.
pub fn epi_iso_factor(x: &Mor, tol: &Tolerance) -> Result<(Mor, Mor)> {
    let m = range_isometry(x, tol)?;
    let y = m.dag().compose(x)?;
    Ok((y, m))
}

/// The unique isometry `m` out of the coproduct with `m i_j = m_j`.
pub fn glue_isometries(cospan: &[Mor], coproduct: &BiproductStructure, tol: &Tolerance) -> Result<Mor> {
    if cospan.len() != coproduct.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} legs for {} components",
            cospan.len(),
            coproduct.len()
        )));
    }
    let Some(cod) = cospan.first().map(|m| m.cod().clone()) else {
        return Ok(Mor::zero(&coproduct.apex, &coproduct.apex.instance().zero_object()));
    };
    for (j, m) in cospan.iter().enumerate() {
        if m.dom() != &coproduct.components[j] || m.cod() != &cod {
            return Err(Error::ShapeMismatch(format!("leg {j} does not match the coproduct")));
        }
        if !classify_morphism(m, tol)?.isometry {
            return Err(Error::NotIsometric(format!("cospan leg {j}")));
        }
    }
    for j in 0..cospan.len() {
        for k in j + 1..cospan.len() {
            let ip = cospan[j].mat().adjoint().checked_mul(cospan[k].mat())?;
            if !tol.close(ip.norm(), 1.0) {
                return Err(Error::NotOrthogonalCospan(j, k));
            }
        }
    }
    let mut terms = cospan.iter().zip(&coproduct.projections).map(|(m, p)| m.compose(p));
    let first = terms.next().expect("nonempty cospan")?;
    let m = terms.try_fold(first, |acc, t| acc.add(&t?))?;
    if !classify_morphism(&m, tol)?.isometry {
        return Err(Error::NotIsometric("glued map".into()));
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::FieldTag;

    const C: FieldTag = FieldTag::Complex;

    fn t() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn truncated_l2_has_exact_block_identity() {
        let comps = L2Components::Truncated {
            generator: Arc::new(|_| Obj::fd(1, C)),
            n: 20,
            eps: 1e-6,
        };
        let p = l2_product(&Instance::Fd(C), &comps).unwrap();
        assert_eq!(p.biproduct.apex.dim(), 20);
        assert_eq!(p.equation_defects, (0.0, 0.0));
        assert_eq!(p.epsilon, 1e-6);
    }

    #[test]
    fn binary_mediating_is_column() {
        let y = Obj::fd(1, C);
        let g1 = Mor::new(
            y.clone(),
            Obj::fd(1, C),
            Mat::from_real(1, 1, &[2.0]).unwrap().to_complex(),
        )
        .unwrap();
        let g2 = Mor::new(
            y.clone(),
            Obj::fd(2, C),
            Mat::from_real(2, 1, &[3.0, 4.0]).unwrap().to_complex(),
        )
        .unwrap();
        let p = l2_product(
            &Instance::Fd(C),
            &L2Components::Finite(vec![Obj::fd(1, C), Obj::fd(2, C)]),
        )
        .unwrap();
        let g = l2_mediating(&p.biproduct, &y, &[g1.clone(), g2.clone()], &t()).unwrap();
        assert_eq!(g.mat(), &Mat::from_real(3, 1, &[2.0, 3.0, 4.0]).unwrap().to_complex());
        assert_eq!(p.biproduct.projections[1].compose(&g).unwrap(), g2);
    }

    #[test]
    fn epi_iso_of_rank_one() {
        let x = Mor::new(
            Obj::fd(2, C),
            Obj::fd(3, C),
            Mat::from_real(3, 2, &[1.0, 2.0, 0.0, 0.0, 1.0, 2.0])
                .unwrap()
                .to_complex(),
        )
        .unwrap();
        let (y, m) = epi_iso_factor(&x, &t()).unwrap();
        assert_eq!(m.dom().dim(), 1);
        assert!((m.compose(&y).unwrap().mat() - x.mat()).norm() < 1e-12);
        let (y0, m0) = epi_iso_factor(&Mor::zero(&Obj::fd(2, C), &Obj::fd(3, C)), &t()).unwrap();
        assert_eq!((y0.cod().dim(), m0.dom().dim()), (0, 0));
    }

    #[test]
    fn glue_two_embeddings_is_unitary() {
        let o = Obj::fd(1, C);
        let e = |i: usize| Mor::new(o.clone(), Obj::fd(2, C), Mat::identity(2, C).column(i)).unwrap();
        let bp = orthonormal_product(&Instance::Fd(C), &[o.clone(), o.clone()]).unwrap();
        let m = glue_isometries(&[e(1), e(0)], &bp, &t()).unwrap();
        assert!(classify_morphism(&m, &t()).unwrap().unitary);
        assert!(matches!(
            glue_isometries(&[e(0), e(0)], &bp, &t()),
            Err(Error::NotOrthogonalCospan(0, 1))
        ));
    }
}
