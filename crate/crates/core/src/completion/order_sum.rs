//! Orthogonal families and their order sums.
//!
//! An order sum `s` of an orthogonal family `(x_j)` satisfies
//! `⟨s, x_j⟩ = |x_j|²` for every `j` and `|s|² = sup_F Σ_{j∈F} |x_j|²`.
//! Finite families sum to their plain sum. Infinite families are lazy
//! generators with a tail certificate `N(ε)`; their codomain is realized as
//! a growing coordinate prefix, so later terms may have more rows and
//! partial sums are zero-padded.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{loewner_leq, FieldTag, HermMat, Mat, Tolerance};

pub type FamilyFn = Arc<dyn Fn(usize) -> Mat + Send + Sync>;

#[derive(Clone)]
pub enum FamilyTerms {
    Finite(Vec<Mat>),
    Lazy(FamilyFn),
}

/// `N(ε)`: every term with index above `N(ε)` together has Gram sum at most `ε·1`.
#[derive(Clone)]
pub struct TailCertificate(Arc<dyn Fn(f64) -> usize + Send + Sync>);

impl TailCertificate {
    pub fn new(f: impl Fn(f64) -> usize + Send + Sync + 'static) -> Self {
        TailCertificate(Arc::new(f))
    }

    /// For Gram masses bounded by `first · ratio^j` (`0 <= ratio < 1`).
    pub fn geometric(first: f64, ratio: f64) -> Self {
        TailCertificate::new(move |eps| {
            let mut n = 0usize;
            let mut tail = first * ratio / (1.0 - ratio);
            while tail > eps && n < 100_000 {
                tail *= ratio;
                n += 1;
            }
            n
        })
    }

    pub fn cutoff(&self, eps: f64) -> usize {
        (self.0)(eps)
    }
}

#[derive(Clone)]
pub struct OrthFamily {
    pub field: FieldTag,
    pub dom_dim: usize,
    pub terms: FamilyTerms,
    pub bound: Option<HermMat>,
    pub tail: Option<TailCertificate>,
}

impl OrthFamily {
    pub fn finite(field: FieldTag, dom_dim: usize, terms: Vec<Mat>) -> Result<Self> {
        let rows = terms.first().map(Mat::rows);
        for t in &terms {
            field.check_same(t.field())?;
            if t.cols() != dom_dim || Some(t.rows()) != rows {
                return Err(Error::ShapeMismatch(format!("family term of shape {:?}", t.shape())));
            }
        }
        Ok(OrthFamily {
            field,
            dom_dim,
            terms: FamilyTerms::Finite(terms),
            bound: None,
            tail: None,
        })
    }

    pub fn lazy(field: FieldTag, dom_dim: usize, terms: FamilyFn) -> Self {
        OrthFamily {
            field,
            dom_dim,
            terms: FamilyTerms::Lazy(terms),
            bound: None,
            tail: None,
        }
    }

    pub fn with_bound(mut self, bound: HermMat) -> Self {
        self.bound = Some(bound);
        self
    }

    pub fn with_tail(mut self, tail: TailCertificate) -> Self {
        self.tail = Some(tail);
        self
    }

    fn materialize(&self, count: usize) -> Vec<Mat> {
        match &self.terms {
            FamilyTerms::Finite(v) => v.iter().take(count).cloned().collect(),
            FamilyTerms::Lazy(f) => (0..count).map(|n| f(n)).collect(),
        }
    }
}

fn common_rows(terms: &[Mat]) -> usize {
    terms.iter().map(Mat::rows).max().unwrap_or(0)
}

fn padded(terms: &[Mat]) -> Vec<Mat> {
    let rows = common_rows(terms);
    terms
        .iter()
        .map(|t| if t.rows() == rows { t.clone() } else { t.pad_rows(rows) })
        .collect()
}

/// Pairwise orthogonality `x_j* x_k ≈ 0` for `j ≠ k`.
pub fn check_orthogonal(terms: &[Mat], tol: &Tolerance) -> Result<()> {
    let terms = padded(terms);
    for j in 0..terms.len() {
        for k in j + 1..terms.len() {
            let ip = &terms[j].adjoint() * &terms[k];
            if !tol.close(ip.norm(), terms[j].norm() * terms[k].norm()) {
                return Err(Error::NotOrthogonal(j, k));
            }
        }
    }
    Ok(())
}

/// Sum of the listed terms, starting from the first term (no leading zero).
pub fn plain_sum(terms: &[Mat], rows: usize, cols: usize, field: FieldTag) -> Mat {
    let mut it = terms
        .iter()
        .map(|t| if t.rows() == rows { t.clone() } else { t.pad_rows(rows) });
    match it.next() {
        None => Mat::zeros(rows, cols, field),
        Some(first) => it.fold(first, |acc, t| &acc + &t),
    }
}

/// Residuals of the two defining equations, plus the tail allowance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrderSumCertificate {
    /// `max_j ‖⟨s, x_j⟩ − |x_j|²‖`.
    pub inner_residual: f64,
    /// `‖|s|² − Σ_j |x_j|²‖` over the summed terms.
    pub gram_residual: f64,
    /// Allowance for the unsummed tail (zero for finite families).
    pub eps: f64,
}

#[derive(Clone, Debug)]
pub struct OrderSum {
    pub sum: Mat,
    pub terms_used: usize,
    pub certificate: OrderSumCertificate,
}

fn certify(sum: &Mat, terms: &[Mat], eps: f64) -> OrderSumCertificate {
    let st = sum.adjoint();
    let mut inner = 0.0f64;
    let mut grams = Mat::zeros(sum.cols(), sum.cols(), sum.field());
    for t in padded(terms).iter().map(|t| {
        if t.rows() < sum.rows() {
            t.pad_rows(sum.rows())
        } else {
            t.clone()
        }
    }) {
        let g = &t.adjoint() * &t;
        inner = inner.max((&(&st * &t) - &g).norm());
        grams = &grams + &g;
    }
    OrderSumCertificate {
        inner_residual: inner,
        gram_residual: (&(&st * sum) - &grams).norm(),
        eps,
    }
}

/// The order sum. Lazy families are summed up to the certified cutoff `N(eps)`.
pub fn order_sum(family: &OrthFamily, eps: f64, tol: &Tolerance) -> Result<OrderSum> {
    let (terms, allowance) = match &family.terms {
        FamilyTerms::Finite(v) => (v.clone(), 0.0),
        FamilyTerms::Lazy(_) => {
            let tail = family.tail.as_ref().ok_or(Error::NoTailCertificate)?;
            (family.materialize(tail.cutoff(eps) + 1), eps)
        }
    };
    check_orthogonal(&terms, tol)?;
    let rows = common_rows(&terms);
    let sum = plain_sum(&terms, rows, family.dom_dim, family.field);
    let certificate = certify(&sum, &terms, allowance);
    Ok(OrderSum {
        sum,
        terms_used: terms.len(),
        certificate,
    })
}

/// `‖|s − Σ_{j<k} x_j|²‖` for every prefix length `k = 0..=len`.
pub fn partial_sum_defects(sum: &Mat, terms: &[Mat]) -> Vec<f64> {
    let mut rest = sum.clone();
    let mut out = Vec::with_capacity(terms.len() + 1);
    out.push((&rest.adjoint() * &rest).norm());
    for t in terms {
        let t = if t.rows() < rest.rows() {
            t.pad_rows(rest.rows())
        } else {
            t.clone()
        };
        rest = &rest - &t;
        out.push((&rest.adjoint() * &rest).norm());
    }
    out
}

#[derive(Clone, Debug)]
pub struct L2Verdict {
    pub is_l2: bool,
    /// A certified upper bound for the Gram sums (when `is_l2`).
    pub bound: Option<HermMat>,
    pub terms_examined: usize,
}

/// Decides whether the finite Gram sums of the family are bounded.
///
/// Lazy families need both a bound and a tail certificate; the bound is
/// probed on a materialized prefix, and any violation answers `false`.
pub fn is_l2_family(family: &OrthFamily, tol: &Tolerance) -> Result<L2Verdict> {
    let n = family.dom_dim;
    match &family.terms {
        FamilyTerms::Finite(v) => {
            check_orthogonal(v, tol)?;
            let total = v.iter().fold(HermMat::zeros(n, family.field), |acc, t| {
                acc.add(&HermMat::symmetrize(&(&t.adjoint() * t)))
            });
            Ok(L2Verdict {
                is_l2: true,
                bound: Some(total),
                terms_examined: v.len(),
            })
        }
        FamilyTerms::Lazy(_) => {
            let eps = tol.atol.max(f64::EPSILON);
            let certified = family.tail.as_ref().map(|t| t.cutoff(eps) + 1);
            let probe = certified.unwrap_or(0).max(16 * tol.max_iter);
            let terms = family.materialize(probe);
            check_orthogonal(&terms[..terms.len().min(certified.unwrap_or(64).max(64))], tol)?;
            let Some(bound) = &family.bound else {
                return Ok(L2Verdict {
                    is_l2: false,
                    bound: None,
                    terms_examined: 0,
                });
            };
            let mut partial = HermMat::zeros(n, family.field);
            for (k, t) in terms.iter().enumerate() {
                partial = partial.add(&HermMat::symmetrize(&(&t.adjoint() * t)));
                let with_tail = if Some(k + 1) >= certified {
                    partial.shift(eps)
                } else {
                    partial.clone()
                };
                if !loewner_leq(&with_tail, bound, tol)? {
                    return Ok(L2Verdict {
                        is_l2: false,
                        bound: None,
                        terms_examined: k + 1,
                    });
                }
            }
            let is_l2 = certified.is_some();
            Ok(L2Verdict {
                is_l2,
                bound: is_l2.then(|| bound.clone()),
                terms_examined: terms.len(),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;

    fn t() -> Tolerance {
        Tolerance::default()
    }

    /// x_n = 2^{-(n+1)} e_n : 𝕂 → 𝕂^{n+1}, Gram 4^{-(n+1)}.
    fn geometric() -> OrthFamily {
        OrthFamily::lazy(
            FieldTag::Real,
            1,
            Arc::new(|n| {
                Mat::from_fn(n + 1, 1, FieldTag::Real, |i, _| {
                    C64::new(if i == n { 0.5f64.powi(n as i32 + 1) } else { 0.0 }, 0.0)
                })
            }),
        )
        .with_tail(TailCertificate::geometric(0.25, 0.25))
    }

    #[test]
    fn empty_family_sums_to_zero() {
        let fam = OrthFamily::finite(FieldTag::Real, 2, vec![]).unwrap();
        let s = order_sum(&fam, 0.0, &t()).unwrap();
        assert_eq!(s.sum.shape(), (0, 2));
        assert_eq!(s.certificate.gram_residual, 0.0);
    }

    #[test]
    fn two_orthogonal_columns() {
        let x1 = Mat::from_real(2, 1, &[3.0, 0.0]).unwrap();
        let x2 = Mat::from_real(2, 1, &[0.0, -2.0]).unwrap();
        let fam = OrthFamily::finite(FieldTag::Real, 1, vec![x1, x2]).unwrap();
        let s = order_sum(&fam, 0.0, &t()).unwrap();
        assert_eq!(s.sum, Mat::from_real(2, 1, &[3.0, -2.0]).unwrap());
        let g = &s.sum.adjoint() * &s.sum;
        assert_eq!(g.get(0, 0).re, 13.0);
        assert_eq!(s.certificate.inner_residual, 0.0);
    }

    #[test]
    fn non_orthogonal_rejected() {
        let x = Mat::from_real(2, 1, &[1.0, 1.0]).unwrap();
        let y = Mat::from_real(2, 1, &[1.0, 0.0]).unwrap();
        let fam = OrthFamily::finite(FieldTag::Real, 1, vec![x, y]).unwrap();
        assert!(matches!(order_sum(&fam, 0.0, &t()), Err(Error::NotOrthogonal(0, 1))));
    }

    #[test]
    fn geometric_family_gram_is_one_third() {
        let s = order_sum(&geometric(), 1e-12, &t()).unwrap();
        let g = (&s.sum.adjoint() * &s.sum).get(0, 0).re;
        assert!((g - 1.0 / 3.0).abs() <= 1e-9, "{g}");
        let v = is_l2_family(
            &geometric().with_bound(HermMat::identity(1, FieldTag::Real).scale(1.0 / 3.0)),
            &t(),
        )
        .unwrap();
        assert!(v.is_l2);
    }

    #[test]
    fn lazy_without_certificate() {
        let fam = OrthFamily {
            tail: None,
            ..geometric()
        };
        assert!(matches!(order_sum(&fam, 1e-6, &t()), Err(Error::NoTailCertificate)));
    }

    #[test]
    fn harmonic_family_is_not_l2() {
        let fam = OrthFamily::lazy(
            FieldTag::Real,
            1,
            Arc::new(|n| {
                Mat::from_fn(n + 1, 1, FieldTag::Real, |i, _| {
                    C64::new(if i == n { 1.0 / ((n + 1) as f64).sqrt() } else { 0.0 }, 0.0)
                })
            }),
        )
        .with_bound(HermMat::identity(1, FieldTag::Real).scale(2.0))
        .with_tail(TailCertificate::new(|_| 10));
        let v = is_l2_family(&fam, &t()).unwrap();
        assert!(!v.is_l2);
        assert_eq!(v.terms_examined, 4);
    }

    #[test]
    fn finite_families_are_l2() {
        let x = Mat::from_real(2, 1, &[1.0, 0.0]).unwrap();
        let fam = OrthFamily::finite(FieldTag::Real, 1, vec![x]).unwrap();
        let v = is_l2_family(&fam, &t()).unwrap();
        assert!(v.is_l2);
        assert_eq!(v.bound.unwrap().as_mat().get(0, 0).re, 1.0);
    }
}
