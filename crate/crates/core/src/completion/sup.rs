//! Suprema of bounded increasing sequences of Hermitian matrices.
//!
//! Finite chains have their last term as supremum. Lazy chains are
//! materialized until consecutive terms differ by less than
//! `atol + rtol * ‖bound‖` (Frobenius); a bounded increasing sequence in
//! finite dimensions converges, so this gap is the observable stopping rule.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{eigh_hermitian, loewner_leq, order_margin, FieldTag, HermMat, Mat, Tolerance};

/// Lazily generated chain terms; must be replayable (same index, same value).
pub type TermFn = Arc<dyn Fn(usize) -> HermMat + Send + Sync>;

#[derive(Clone)]
pub enum ChainTerms {
    Finite(Vec<HermMat>),
    Lazy(TermFn),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Increasing,
    Decreasing,
}

/// A monotone sequence of Hermitian matrices on a fixed space, with an
/// optional bound (upper for increasing chains, lower for decreasing ones).
#[derive(Clone)]
pub struct MonotoneChain {
    dim: usize,
    field: FieldTag,
    terms: ChainTerms,
    direction: Direction,
    bound: Option<HermMat>,
}

/// Later terms inspected after the stopping rule fires.
const POSTHOC_TERMS: usize = 10;
/// Slack, in stopping thresholds, allowed to those later terms.
const POSTHOC_SLACK: f64 = 10.0;

impl MonotoneChain {
    pub fn finite(terms: Vec<HermMat>, direction: Direction) -> Result<Self> {
        let first = terms.first().ok_or_else(|| Error::InvalidInput("empty chain".into()))?;
        let (dim, field) = (first.dim(), first.field());
        for t in &terms {
            field.check_same(t.field())?;
            if t.dim() != dim {
                return Err(Error::ShapeMismatch(format!(
                    "chain term of dimension {} in a {dim}-chain",
                    t.dim()
                )));
            }
        }
        Ok(MonotoneChain {
            dim,
            field,
            terms: ChainTerms::Finite(terms),
            direction,
            bound: None,
        })
    }

    pub fn lazy(dim: usize, field: FieldTag, terms: TermFn, direction: Direction) -> Self {
        MonotoneChain {
            dim,
            field,
            terms: ChainTerms::Lazy(terms),
            direction,
            bound: None,
        }
    }

    pub fn with_bound(mut self, bound: HermMat) -> Result<Self> {
        self.field.check_same(bound.field())?;
        if bound.dim() != self.dim {
            return Err(Error::ShapeMismatch("bound dimension differs from the chain".into()));
        }
        self.bound = Some(bound);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn field(&self) -> FieldTag {
        self.field
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn bound(&self) -> Option<&HermMat> {
        self.bound.as_ref()
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.terms, ChainTerms::Finite(_))
    }

    /// Term `n`, or `None` past the end of a finite chain.
    pub fn term(&self, n: usize) -> Option<HermMat> {
        match &self.terms {
            ChainTerms::Finite(v) => v.get(n).cloned(),
            ChainTerms::Lazy(f) => Some(f(n)),
        }
    }

    /// Applies `f` termwise and to the bound. `f` must preserve monotonicity.
    pub fn map(&self, dim: usize, f: impl Fn(&HermMat) -> HermMat + Send + Sync + 'static) -> MonotoneChain {
        let f = Arc::new(f);
        let terms = match &self.terms {
            ChainTerms::Finite(v) => ChainTerms::Finite(v.iter().map(|t| f(t)).collect()),
            ChainTerms::Lazy(g) => {
                let (g, f) = (g.clone(), f.clone());
                ChainTerms::Lazy(Arc::new(move |n| f(&g(n))))
            }
        };
        MonotoneChain {
            dim,
            field: self.field,
            terms,
            direction: self.direction,
            bound: self.bound.as_ref().map(|b| f(b)),
        }
    }

    fn negated(&self) -> MonotoneChain {
        let mut c = self.map(self.dim, |t| t.scale(-1.0));
        c.direction = match self.direction {
            Direction::Increasing => Direction::Decreasing,
            Direction::Decreasing => Direction::Increasing,
        };
        c
    }
}

/// A computed supremum with the materialized prefix that produced it.
#[derive(Clone, Debug)]
pub struct Supremum {
    pub value: HermMat,
    pub terms: Vec<HermMat>,
    /// Index of the term returned as the supremum.
    pub index: usize,
    /// Frobenius distance between the last two materialized terms.
    pub last_gap: f64,
}

fn check_step(prev: &HermMat, next: &HermMat, index: usize, tol: &Tolerance) -> Result<()> {
    if loewner_leq(prev, next, tol)? {
        Ok(())
    } else {
        let margin = order_margin(prev, next, tol)?;
        Err(Error::NotMonotone {
            index,
            detail: format!("smallest eigenvalue of the increment is {margin:e}"),
        })
    }
}

fn check_bound(term: &HermMat, bound: Option<&HermMat>, index: usize, tol: &Tolerance) -> Result<()> {
    match bound {
        Some(b) if !loewner_leq(term, b, tol)? => Err(Error::BoundViolated { index }),
        _ => Ok(()),
    }
}

/// Supremum of an increasing chain.
pub fn monotone_supremum(chain: &MonotoneChain, tol: &Tolerance) -> Result<Supremum> {
    if chain.direction != Direction::Increasing {
        return Err(Error::PreconditionViolated(
            "monotone_supremum needs an increasing chain".into(),
        ));
    }
    match &chain.terms {
        ChainTerms::Finite(terms) => {
            for (n, w) in terms.windows(2).enumerate() {
                check_step(&w[0], &w[1], n + 1, tol)?;
            }
            for (n, t) in terms.iter().enumerate() {
                check_bound(t, chain.bound.as_ref(), n, tol)?;
            }
            let last_gap = match terms.len() {
                0 | 1 => 0.0,
                k => terms[k - 1].sub(&terms[k - 2]).norm(),
            };
            let value = terms.last().expect("finite chains are nonempty").clone();
            Ok(Supremum {
                value,
                terms: terms.clone(),
                index: terms.len() - 1,
                last_gap,
            })
        }
        ChainTerms::Lazy(gen) => {
            let bound = chain.bound.as_ref().ok_or(Error::NoBound)?;
            let stop = tol.threshold(bound.norm());
            let mut terms = vec![gen(0)];
            check_bound(&terms[0], Some(bound), 0, tol)?;
            for n in 1..=tol.max_iter {
                let next = gen(n);
                let prev = terms.last().expect("nonempty");
                check_step(prev, &next, n, tol)?;
                check_bound(&next, Some(bound), n, tol)?;
                let gap = next.sub(prev).norm();
                terms.push(next);
                if gap <= stop {
                    let value = terms[n].clone();
                    posthoc_check(&value, gen.as_ref(), n, stop, tol)?;
                    return Ok(Supremum {
                        value,
                        terms,
                        index: n,
                        last_gap: gap,
                    });
                }
            }
            Err(Error::ConvergenceFailure {
                what: "monotone supremum (Cauchy gap)".into(),
                iterations: tol.max_iter,
            })
        }
    }
}

/// Later terms must not rise above the returned value by more than the slack.
fn posthoc_check(
    value: &HermMat,
    gen: &(dyn Fn(usize) -> HermMat + Send + Sync),
    n: usize,
    stop: f64,
    tol: &Tolerance,
) -> Result<()> {
    for k in 1..=POSTHOC_TERMS {
        let later = gen(n + k);
        let margin = eigh_hermitian(&value.sub(&later), tol)?.min();
        let slack = tol.threshold(value.norm()) + POSTHOC_SLACK * stop;
        if margin < -slack {
            return Err(Error::ConvergenceFailure {
                what: format!("term {} exceeds the stopped value by {:e}", n + k, -margin),
                iterations: n,
            });
        }
    }
    Ok(())
}

/// Infimum of a decreasing chain, as `-sup(-a_n)`.
pub fn monotone_infimum(chain: &MonotoneChain, tol: &Tolerance) -> Result<Supremum> {
    if chain.direction != Direction::Decreasing {
        return Err(Error::PreconditionViolated(
            "monotone_infimum needs a decreasing chain".into(),
        ));
    }
    let s = monotone_supremum(&chain.negated(), tol)?;
    Ok(Supremum {
        value: s.value.scale(-1.0),
        terms: s.terms.iter().map(|t| t.scale(-1.0)).collect(),
        index: s.index,
        last_gap: s.last_gap,
    })
}

/// Both sides of `sup r a_j r* = r (sup a_j) r*`, each computed independently.
#[derive(Clone, Debug)]
pub struct SupConjugation {
    pub lhs: HermMat,
    pub rhs: HermMat,
    pub residual: f64,
}

pub fn sup_conjugation(chain: &MonotoneChain, r: &Mat, tol: &Tolerance) -> Result<SupConjugation> {
    chain.field.check_same(r.field())?;
    if r.cols() != chain.dim {
        return Err(Error::ShapeMismatch(format!(
            "r has {} columns for a {}-chain",
            r.cols(),
            chain.dim
        )));
    }
    let rr = r.clone();
    let conj = chain.map(r.rows(), move |a| a.conjugate_by(&rr));
    let lhs = monotone_supremum(&conj, tol)?.value;
    let rhs = monotone_supremum(chain, tol)?.value.conjugate_by(r);
    let residual = lhs.sub(&rhs).norm();
    Ok(SupConjugation { lhs, rhs, residual })
}

/// `a − a²(a + 4⁻ⁿ)⁻¹`, evaluated spectrally as `4⁻ⁿ a (a + 4⁻ⁿ)⁻¹`.
pub fn approx_inverse_defect(a: &HermMat, n: u32, tol: &Tolerance) -> Result<HermMat> {
    let eig = eigh_hermitian(a, tol)?;
    let slack = tol.threshold(a.norm());
    if eig.min() < -slack {
        return Err(Error::NotPositive {
            min_eigenvalue: eig.min(),
            threshold: slack,
        });
    }
    let eps = 0.25f64.powi(n as i32);
    Ok(eig.apply(|l| {
        let l = l.max(0.0);
        eps * l / (l + eps)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t() -> Tolerance {
        Tolerance::default()
    }

    fn scalar_chain(f: impl Fn(usize) -> f64 + Send + Sync + 'static) -> MonotoneChain {
        MonotoneChain::lazy(
            2,
            FieldTag::Real,
            Arc::new(move |n| HermMat::identity(2, FieldTag::Real).scale(f(n))),
            Direction::Increasing,
        )
    }

    #[test]
    fn one_minus_quarter_powers_tends_to_identity() {
        let chain = scalar_chain(|n| 1.0 - 0.25f64.powi(n as i32))
            .with_bound(HermMat::identity(2, FieldTag::Real))
            .unwrap();
        let s = monotone_supremum(&chain, &t()).unwrap();
        assert!(s.value.sub(&HermMat::identity(2, FieldTag::Real)).norm() < 1e-9);
    }

    #[test]
    fn constant_and_finite_chains() {
        let c = HermMat::identity(2, FieldTag::Real).scale(0.3);
        let lazy = MonotoneChain::lazy(2, FieldTag::Real, Arc::new(move |_| c.clone()), Direction::Increasing)
            .with_bound(HermMat::identity(2, FieldTag::Real))
            .unwrap();
        let s = monotone_supremum(&lazy, &t()).unwrap();
        assert_eq!(s.index, 1);
        assert_eq!(s.value.as_mat().get(0, 0).re, 0.3);

        let terms: Vec<HermMat> = (1..=4)
            .map(|k| HermMat::identity(1, FieldTag::Real).scale(k as f64))
            .collect();
        let fin = MonotoneChain::finite(terms.clone(), Direction::Increasing).unwrap();
        assert_eq!(monotone_supremum(&fin, &t()).unwrap().value, terms[3]);
    }

    #[test]
    fn chain_errors() {
        let unbounded = scalar_chain(|n| n as f64);
        assert!(matches!(monotone_supremum(&unbounded, &t()), Err(Error::NoBound)));
        let decreasing = MonotoneChain::finite(
            vec![HermMat::identity(1, FieldTag::Real), HermMat::zeros(1, FieldTag::Real)],
            Direction::Increasing,
        )
        .unwrap();
        assert!(matches!(
            monotone_supremum(&decreasing, &t()),
            Err(Error::NotMonotone { index: 1, .. })
        ));
        let slow = scalar_chain(|n| 1.0 - 1.0 / (n as f64 + 1.0))
            .with_bound(HermMat::identity(2, FieldTag::Real))
            .unwrap();
        assert!(matches!(
            monotone_supremum(&slow, &t()),
            Err(Error::ConvergenceFailure { .. })
        ));
        let over = scalar_chain(|n| 2.0 - 0.5f64.powi(n as i32))
            .with_bound(HermMat::identity(2, FieldTag::Real))
            .unwrap();
        assert!(matches!(
            monotone_supremum(&over, &t()),
            Err(Error::BoundViolated { .. })
        ));
    }

    #[test]
    fn infimum_of_quarter_powers_is_zero() {
        let chain = MonotoneChain::lazy(
            1,
            FieldTag::Real,
            Arc::new(|n| HermMat::identity(1, FieldTag::Real).scale(0.25f64.powi(n as i32))),
            Direction::Decreasing,
        )
        .with_bound(HermMat::zeros(1, FieldTag::Real))
        .unwrap();
        let inf = monotone_infimum(&chain, &t()).unwrap();
        assert!(inf.value.norm() < 1e-9);
    }

    #[test]
    fn conjugation_by_identity_is_exact() {
        let chain = scalar_chain(|n| 1.0 - 0.5f64.powi(n as i32))
            .with_bound(HermMat::identity(2, FieldTag::Real))
            .unwrap();
        let sc = sup_conjugation(&chain, &Mat::identity(2, FieldTag::Real), &t()).unwrap();
        assert_eq!(sc.residual, 0.0);
    }

    #[test]
    fn defect_examples() {
        let z = approx_inverse_defect(&HermMat::zeros(3, FieldTag::Complex), 5, &t()).unwrap();
        assert_eq!(z.norm(), 0.0);
        let d = approx_inverse_defect(&HermMat::identity(2, FieldTag::Real), 2, &t()).unwrap();
        let expected = (1.0 / 16.0) / (1.0 + 1.0 / 16.0);
        assert!((d.as_mat().get(0, 0).re - expected).abs() < 1e-16);
        assert!((expected - 1.0 / 17.0).abs() < 1e-17);
        let neg = HermMat::identity(1, FieldTag::Real).scale(-1.0);
        assert!(matches!(
            approx_inverse_defect(&neg, 1, &t()),
            Err(Error::NotPositive { .. })
        ));
    }
}
