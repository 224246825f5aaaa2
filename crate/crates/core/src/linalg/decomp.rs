//! Hermitian eigendecomposition, singular value decomposition and the
//! spectral utilities built on them (square roots, Löwner order, range and
//! null-space bases, pseudo-inverses).
//!
//! Eigendecompositions are delegated to `nalgebra`, with real matrices
//! decomposed over `f64` so that their factors stay real. The SVD is a
//! one-sided Jacobi iteration, which stays accurate on rank-deficient input.

use nalgebra::{ComplexField, DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::mat::{FieldTag, Mat, C64};
use crate::error::{Error, Result};

/// Absolute/relative tolerance pair plus an iteration cap.
///
/// Every approximate comparison in the crate has the form
/// `residual <= atol + rtol * scale`, with Frobenius norms as scales.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub atol: f64,
    pub rtol: f64,
    pub max_iter: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            atol: 1e-12,
            rtol: 1e-9,
            max_iter: 60,
        }
    }
}

impl Tolerance {
    pub fn new(atol: f64, rtol: f64, max_iter: usize) -> Result<Self> {
        if !(atol >= 0.0 && rtol >= 0.0) || !atol.is_finite() || !rtol.is_finite() || max_iter == 0 {
            return Err(Error::InvalidInput(format!(
                "tolerance needs atol, rtol >= 0 and max_iter >= 1 (got {atol}, {rtol}, {max_iter})"
            )));
        }
        Ok(Tolerance { atol, rtol, max_iter })
    }

    pub fn with_max_iter(self, max_iter: usize) -> Self {
        Tolerance {
            max_iter: max_iter.max(1),
            ..self
        }
    }

    #[inline]
    pub fn threshold(&self, scale: f64) -> f64 {
        self.atol + self.rtol * scale
    }

    #[inline]
    pub fn close(&self, residual: f64, scale: f64) -> bool {
        residual <= self.threshold(scale)
    }

    /// Iteration cap handed to the eigen/SVD backends for an `n`-dimensional problem.
    pub(crate) fn decomposition_cap(&self, n: usize) -> usize {
        self.max_iter.max(1) * 50 * (n + 1)
    }
}

/// A square matrix that is Hermitian up to tolerance.
#[derive(Clone, Debug, PartialEq)]
pub struct HermMat(Mat);

impl HermMat {
    /// Validates `m` as Hermitian within `tol`, then symmetrizes it exactly.
    pub fn new(m: Mat, tol: &Tolerance) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::ShapeMismatch(format!(
                "Hermitian matrix must be square, got {:?}",
                m.shape()
            )));
        }
        let residual = (&m - &m.adjoint()).norm();
        if !tol.close(residual, m.norm()) {
            return Err(Error::PreconditionViolated(format!(
                "matrix is not Hermitian (residual {residual:e})"
            )));
        }
        Ok(HermMat::symmetrize(&m))
    }

    /// `(m + m*) / 2`.
    pub fn symmetrize(m: &Mat) -> Self {
        assert!(m.is_square(), "symmetrize needs a square matrix");
        HermMat((m + &m.adjoint()).scale(0.5))
    }

    pub fn identity(n: usize, field: FieldTag) -> Self {
        HermMat(Mat::identity(n, field))
    }

    pub fn zeros(n: usize, field: FieldTag) -> Self {
        HermMat(Mat::zeros(n, n, field))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn field(&self) -> FieldTag {
        self.0.field()
    }

    pub fn as_mat(&self) -> &Mat {
        &self.0
    }

    pub fn into_mat(self) -> Mat {
        self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn add(&self, other: &HermMat) -> HermMat {
        HermMat(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &HermMat) -> HermMat {
        HermMat(&self.0 - &other.0)
    }

    pub fn scale(&self, c: f64) -> HermMat {
        HermMat(self.0.scale(c))
    }

    /// `self + c * 1`.
    pub fn shift(&self, c: f64) -> HermMat {
        HermMat(&self.0 + &Mat::identity(self.dim(), self.field()).scale(c))
    }

    /// `r * self * r*`, symmetrized.
    pub fn conjugate_by(&self, r: &Mat) -> HermMat {
        HermMat::symmetrize(&(&(r * &self.0) * &r.adjoint()))
    }
}

/// Result of [`eigh_hermitian`]: ascending eigenvalues with orthonormal eigenvector columns.
#[derive(Clone, Debug)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: Mat,
}

impl Eigh {
    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(f64::INFINITY)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(f64::NEG_INFINITY)
    }

    /// `V diag(f(λ)) V*`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> HermMat {
        let v = &self.vectors;
        let n = v.rows();
        let w: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        let scaled = Mat::from_fn(n, n, v.field(), |i, j| v.get(i, j) * w[j]);
        HermMat::symmetrize(&(&scaled * &v.adjoint()))
    }
}

pub(crate) trait Scalar: ComplexField<RealField = f64> + Copy {
    fn from_c64(z: C64) -> Self;
    fn to_c64(self) -> C64;
}

impl Scalar for f64 {
    fn from_c64(z: C64) -> Self {
        z.re
    }
    fn to_c64(self) -> C64 {
        C64::new(self, 0.0)
    }
}

impl Scalar for C64 {
    fn from_c64(z: C64) -> Self {
        z
    }
    fn to_c64(self) -> C64 {
        self
    }
}

fn to_na<T: Scalar>(m: &Mat) -> DMatrix<T> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| T::from_c64(m.get(i, j)))
}

fn from_na<T: Scalar>(m: &DMatrix<T>, field: FieldTag) -> Mat {
    Mat::from_fn(m.nrows(), m.ncols(), field, |i, j| m[(i, j)].to_c64())
}

fn eigh_generic<T: Scalar>(a: &Mat, tol: &Tolerance) -> Result<Eigh> {
    let n = a.rows();
    let cap = tol.decomposition_cap(n);
    let eig = SymmetricEigen::try_new(to_na::<T>(a), f64::EPSILON, cap).ok_or_else(|| Error::ConvergenceFailure {
        what: "Hermitian eigendecomposition".into(),
        iterations: cap,
    })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = from_na(&eig.eigenvectors, a.field());
    Ok(Eigh {
        values,
        vectors: vecs.columns(&order).phase_normalize_columns(),
    })
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
pub fn eigh_hermitian(a: &HermMat, tol: &Tolerance) -> Result<Eigh> {
    let m = a.as_mat();
    if m.rows() == 0 {
        return Ok(Eigh {
            values: vec![],
            vectors: Mat::zeros(0, 0, m.field()),
        });
    }
    match m.field() {
        FieldTag::Real => eigh_generic::<f64>(m, tol),
        FieldTag::Complex => eigh_generic::<C64>(m, tol),
    }
}

/// The PSD boundary: eigenvalues above `-psd_slack(a)` count as nonnegative.
pub fn psd_slack(a: &HermMat, tol: &Tolerance) -> f64 {
    tol.threshold(a.norm())
}

/// Positive square root. Eigenvalues within the PSD slack below zero are clamped to zero.
pub fn positive_sqrt(a: &HermMat, tol: &Tolerance) -> Result<HermMat> {
    let eig = eigh_hermitian(a, tol)?;
    let slack = psd_slack(a, tol);
    if eig.min() < -slack {
        return Err(Error::NotPositive {
            min_eigenvalue: eig.min(),
            threshold: slack,
        });
    }
    Ok(eig.apply(|l| l.max(0.0).sqrt()))
}

/// Smallest eigenvalue of `b - a`.
pub fn order_margin(a: &HermMat, b: &HermMat, tol: &Tolerance) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::ShapeMismatch(format!(
            "Löwner comparison of {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    a.field().check_same(b.field())?;
    Ok(eigh_hermitian(&b.sub(a), tol)?.min())
}

/// Löwner order test `a <= b`: the spectrum of `b - a` is nonnegative up to tolerance.
pub fn loewner_leq(a: &HermMat, b: &HermMat, tol: &Tolerance) -> Result<bool> {
    let margin = order_margin(a, b, tol)?;
    Ok(margin >= -tol.threshold(a.norm().max(b.norm())))
}

/// Thin SVD with singular values descending: `f = U diag(σ) V*`, with `V` square.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: Mat,
    pub singular_values: Vec<f64>,
    pub v: Mat,
}

/// One-sided Jacobi: plane rotations orthogonalize the columns of `W = f V`
/// until every pair is orthogonal to working precision. Singular values come
/// out with small relative error even when `f` is rank deficient.
fn svd_jacobi(f: &Mat, tol: &Tolerance) -> Result<Svd> {
    let (m, n) = f.shape();
    let field = f.field();
    let mut w: Vec<Vec<C64>> = (0..n).map(|j| (0..m).map(|i| f.get(i, j)).collect()).collect();
    let mut v: Vec<Vec<C64>> = (0..n)
        .map(|j| (0..n).map(|i| C64::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect())
        .collect();
    let cap = tol.decomposition_cap(n.max(m));
    // Inner products carry roundoff of order m·ε relative to the column norms.
    let orth_tol = f64::EPSILON * (m.max(1) as f64);
    // Columns below this norm are roundoff; rotating them against each other never settles.
    let negligible = (f64::EPSILON * f.norm()).powi(2);
    let mut converged = false;
    for _ in 0..cap {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = w[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = w[q].iter().map(|z| z.norm_sqr()).sum();
                if alpha.min(beta) <= negligible {
                    continue;
                }
                let gamma: C64 = w[p].iter().zip(&w[q]).map(|(a, b)| a.conj() * b).sum();
                let g = gamma.norm();
                if g == 0.0 || g <= orth_tol * (alpha * beta).sqrt() {
                    continue;
                }
                // Rotating column q by the phase of γ reduces to the real case.
                let phase = gamma.conj() / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                if s == 0.0 {
                    continue;
                }
                rotated = true;
                for cols in [&mut w, &mut v] {
                    for k in 0..cols[p].len() {
                        let a = cols[p][k];
                        let b = cols[q][k] * phase;
                        cols[p][k] = a * c - b * s;
                        cols[q][k] = a * s + b * c;
                    }
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::ConvergenceFailure {
            what: "singular value decomposition".into(),
            iterations: cap,
        });
    }
    let norms: Vec<f64> = w
        .iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let k = m.min(n);
    let singular_values: Vec<f64> = order[..k].iter().map(|&j| norms[j]).collect();
    // Directions of columns at roundoff level carry no information; those
    // slots of U are filled with an orthonormal completion instead.
    let floor = 4.0 * f64::EPSILON * f.norm() * (m.max(n) as f64);
    let mut u: Vec<Vec<C64>> = Vec::with_capacity(k);
    let project_out = |u: &[Vec<C64>], mut cand: Vec<C64>| {
        for _ in 0..2 {
            for q in u {
                let ip: C64 = q.iter().zip(&cand).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in cand.iter_mut().zip(q) {
                    *x -= ip * y;
                }
            }
        }
        let nrm = cand.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        (cand, nrm)
    };
    for (&j, &s) in order[..k].iter().zip(&singular_values) {
        if s > floor {
            let (cand, nrm) = project_out(&u, w[j].iter().map(|z| z / s).collect());
            if nrm > 0.5 {
                u.push(cand.into_iter().map(|z| z / nrm).collect());
            }
        }
    }
    // The standard basis vector furthest from the current span always has
    // residual at least sqrt(codim / m).
    while u.len() < k {
        let (cand, nrm) = (0..m)
            .map(|e| {
                project_out(
                    &u,
                    (0..m).map(|i| C64::new(if i == e { 1.0 } else { 0.0 }, 0.0)).collect(),
                )
            })
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("m >= k > 0");
        u.push(cand.into_iter().map(|z| z / nrm).collect());
    }
    Ok(Svd {
        u: Mat::from_fn(m, k, field, |i, j| u[j][i]),
        singular_values,
        v: Mat::from_fn(n, n, field, |i, j| v[order[j]][i]),
    })
}

/// Singular value decomposition of an arbitrary matrix.
pub fn svd(f: &Mat, tol: &Tolerance) -> Result<Svd> {
    let (m, n) = f.shape();
    if m == 0 || n == 0 {
        return Ok(Svd {
            u: Mat::zeros(m, 0, f.field()),
            singular_values: vec![],
            v: Mat::identity(n, f.field()),
        });
    }
    svd_jacobi(f, tol)
}

/// Largest singular value (operator norm); zero for empty matrices.
pub fn spectral_norm(f: &Mat, tol: &Tolerance) -> Result<f64> {
    Ok(svd(f, tol)?.singular_values.first().copied().unwrap_or(0.0))
}

/// Orthonormal bases of the range and null space of `f`.
#[derive(Clone, Debug)]
pub struct RangeNull {
    pub range_basis: Mat,
    pub null_basis: Mat,
    pub rank: usize,
}

/// Numerical rank counts singular values above `atol + rtol * σ_max`.
/// Both bases are column-phase normalized.
pub fn range_null_bases(f: &Mat, tol: &Tolerance) -> Result<RangeNull> {
    let dec = svd(f, tol)?;
    let smax = dec.singular_values.first().copied().unwrap_or(0.0);
    let cut = tol.threshold(smax);
    let rank = dec.singular_values.iter().filter(|&&s| s > cut).count();
    let range_idx: Vec<usize> = (0..rank).collect();
    let null_idx: Vec<usize> = (rank..f.cols()).collect();
    Ok(RangeNull {
        range_basis: dec.u.columns(&range_idx).phase_normalize_columns(),
        null_basis: dec.v.columns(&null_idx).phase_normalize_columns(),
        rank,
    })
}

/// Moore–Penrose pseudo-inverse with the same rank cut as [`range_null_bases`].
pub fn pinv(f: &Mat, tol: &Tolerance) -> Result<Mat> {
    let dec = svd(f, tol)?;
    let smax = dec.singular_values.first().copied().unwrap_or(0.0);
    let cut = tol.threshold(smax);
    let (m, n) = f.shape();
    let mut out = Mat::zeros(n, m, f.field());
    for (k, &s) in dec.singular_values.iter().enumerate() {
        if s <= cut {
            continue;
        }
        let vk = dec.v.column(k);
        let uk = dec.u.column(k);
        out = &out + &(&vk * &uk.adjoint()).scale(1.0 / s);
    }
    Ok(out)
}

/// Inverse of a Hermitian matrix whose eigenvalues all exceed `atol + rtol * ‖a‖` in modulus.
pub fn hermitian_inverse(a: &HermMat, tol: &Tolerance) -> Result<HermMat> {
    let eig = eigh_hermitian(a, tol)?;
    let cut = tol.threshold(a.norm());
    if eig.values.iter().any(|l| l.abs() <= cut) {
        return Err(Error::PreconditionViolated("Hermitian matrix is not invertible".into()));
    }
    Ok(eig.apply(|l| 1.0 / l))
}
