//! Unitary representations of finite groups and their intertwiners.
//!
//! Groups are given by multiplication tables and representations by their
//! full table of images. Kernels, products and colimits are computed on the
//! underlying matrices and then checked to carry the representation.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::completion::{finite_directed_colimit_isometries, IsometryColimit};
use crate::error::{Error, Result};
use crate::linalg::{eigh_hermitian, FieldTag, HermMat, Mat, Tolerance, C64};
use crate::star::{isometric_kernel, Mor, Obj};

/// A finite group as a multiplication table: `table[g][h] = g·h`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupTable {
    table: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
}

impl GroupTable {
    /// Checks the Latin-square property, the identity, associativity on all
    /// triples, and derives inverses.
    pub fn new(table: Vec<Vec<usize>>, identity: usize) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::InvalidGroup("empty table".into()));
        }
        if identity >= n {
            return Err(Error::InvalidGroup(format!("identity index {identity} out of range")));
        }
        for (g, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidGroup(format!("row {g} has length {}", row.len())));
            }
            let mut seen = vec![false; n];
            for &x in row {
                if x >= n || std::mem::replace(&mut seen[x], true) {
                    return Err(Error::InvalidGroup(format!("row {g} is not a permutation")));
                }
            }
        }
        for h in 0..n {
            let mut seen = vec![false; n];
            for row in &table {
                if std::mem::replace(&mut seen[row[h]], true) {
                    return Err(Error::InvalidGroup(format!("column {h} is not a permutation")));
                }
            }
        }
        for g in 0..n {
            if table[identity][g] != g || table[g][identity] != g {
                return Err(Error::InvalidGroup(format!("{identity} is not an identity")));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::InvalidGroup(format!("associativity fails on ({a},{b},{c})")));
                    }
                }
            }
        }
        let inverse = (0..n)
            .map(|g| {
                (0..n)
                    .find(|&h| table[g][h] == identity)
                    .expect("Latin square has inverses")
            })
            .collect();
        Ok(GroupTable {
            table,
            identity,
            inverse,
        })
    }

    pub fn cyclic(n: usize) -> Self {
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        GroupTable::new(table, 0).expect("cyclic group table")
    }

    /// The dihedral group of order `2n`: element `(s, k)` ↦ index `s·n + k`
    /// stands for `r^k` (s = 0) or `r^k·f` (s = 1).
    pub fn dihedral(n: usize) -> Self {
        let elt = |s: usize, k: usize| s * n + k % n;
        let mul = |a: usize, b: usize| {
            let (sa, ka) = (a / n, a % n);
            let (sb, kb) = (b / n, b % n);
            // r^ka f^sa · r^kb f^sb = r^(ka ± kb) f^(sa+sb)
            let k = if sa == 0 { ka + kb } else { ka + n - kb };
            elt((sa + sb) % 2, k)
        };
        let table = (0..2 * n).map(|a| (0..2 * n).map(|b| mul(a, b)).collect()).collect();
        GroupTable::new(table, 0).expect("dihedral group table")
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn inverse(&self, g: usize) -> usize {
        self.inverse[g]
    }

    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.table[g][h]
    }
}

/// A representation: one matrix per group element.
#[derive(Clone, Debug, PartialEq)]
pub struct Rep {
    group: Arc<GroupTable>,
    dim: usize,
    field: FieldTag,
    images: Vec<Mat>,
}

impl Rep {
    /// Shape checks only; use [`validate_rep`] or [`Rep::validated`] for the laws.
    pub fn new(group: Arc<GroupTable>, field: FieldTag, dim: usize, images: Vec<Mat>) -> Result<Self> {
        if images.len() != group.order() {
            return Err(Error::InvalidInput(format!(
                "{} images for a group of order {}",
                images.len(),
                group.order()
            )));
        }
        for m in &images {
            field.check_same(m.field())?;
            if m.shape() != (dim, dim) {
                return Err(Error::ShapeMismatch(format!(
                    "image of shape {:?} in a {dim}-dimensional rep",
                    m.shape()
                )));
            }
        }
        Ok(Rep {
            group,
            dim,
            field,
            images,
        })
    }

    /// Fails with the residual report if the representation laws do not hold.
    pub fn validated(self, tol: &Tolerance) -> Result<Self> {
        let report = validate_rep(&self, tol);
        if report.pass {
            Ok(self)
        } else {
            Err(Error::InvalidInput(format!(
                "not a unitary representation (unitarity {:e}, homomorphism {:e})",
                report.unitarity_residual, report.homomorphism_residual
            )))
        }
    }

    pub fn trivial(group: Arc<GroupTable>, field: FieldTag, dim: usize) -> Self {
        let images = vec![Mat::identity(dim, field); group.order()];
        Rep {
            group,
            dim,
            field,
            images,
        }
    }

    pub fn zero(group: Arc<GroupTable>, field: FieldTag) -> Self {
        Rep::trivial(group, field, 0)
    }

    /// Left regular representation: `L(g) e_h = e_{gh}`.
    pub fn regular(group: Arc<GroupTable>, field: FieldTag) -> Self {
        let n = group.order();
        let images = (0..n)
            .map(|g| {
                Mat::from_fn(n, n, field, |i, h| {
                    if group.mul(g, h) == i {
                        C64::new(1.0, 0.0)
                    } else {
                        C64::new(0.0, 0.0)
                    }
                })
            })
            .collect();
        Rep {
            group,
            dim: n,
            field,
            images,
        }
    }

    /// The one-dimensional character `k ↦ ω^{jk}` of the cyclic group `C_n`.
    pub fn cyclic_character(group: Arc<GroupTable>, j: usize) -> Self {
        let n = group.order();
        let images = (0..n)
            .map(|k| {
                let theta = 2.0 * std::f64::consts::PI * ((j * k) % n) as f64 / n as f64;
                Mat::from_complex(1, 1, vec![C64::from_polar(1.0, theta)]).expect("1x1")
            })
            .collect();
        Rep {
            group,
            dim: 1,
            field: FieldTag::Complex,
            images,
        }
    }

    /// Conjugates every image by a unitary: `u ρ(g) u*`.
    pub fn conjugate(&self, u: &Mat) -> Result<Self> {
        let images = self
            .images
            .iter()
            .map(|m| u.checked_mul(m)?.checked_mul(&u.adjoint()))
            .collect::<Result<_>>()?;
        Rep::new(self.group.clone(), self.field, self.dim, images)
    }

    pub fn group(&self) -> &Arc<GroupTable> {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn field(&self) -> FieldTag {
        self.field
    }

    pub fn images(&self) -> &[Mat] {
        &self.images
    }

    pub fn image(&self, g: usize) -> &Mat {
        &self.images[g]
    }

    pub(crate) fn direct_sum(group: Arc<GroupTable>, field: FieldTag, reps: &[&Rep]) -> Rep {
        let dim = reps.iter().map(|r| r.dim).sum();
        let images = (0..group.order())
            .map(|g| {
                let mut m = Mat::zeros(dim, dim, field);
                let mut off = 0;
                for r in reps {
                    m.set_block(off, off, &r.images[g]);
                    off += r.dim;
                }
                m
            })
            .collect();
        Rep {
            group,
            dim,
            field,
            images,
        }
    }

    /// The subrepresentation on the span of the orthonormal columns of `basis`.
    pub(crate) fn restrict(&self, basis: &Mat, tol: &Tolerance) -> Result<Rep> {
        let bt = basis.adjoint();
        let mut residual = 0.0f64;
        let mut images = Vec::with_capacity(self.images.len());
        for img in &self.images {
            let moved = img * basis;
            let restricted = &bt * &moved;
            residual = residual.max((&moved - &(basis * &restricted)).norm());
            images.push(restricted);
        }
        if !tol.close(residual, basis.norm().max(1.0)) {
            return Err(Error::InvarianceViolation { residual });
        }
        Ok(Rep {
            group: self.group.clone(),
            dim: basis.cols(),
            field: self.field,
            images,
        })
    }
}

/// `max_g ‖cod(g)·m − m·dom(g)‖`.
pub fn intertwining_residual(dom: &Rep, cod: &Rep, m: &Mat) -> f64 {
    dom.images
        .iter()
        .zip(&cod.images)
        .map(|(d, c)| (&(c * m) - &(m * d)).norm())
        .fold(0.0, f64::max)
}

/// Residuals of the representation laws.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepReport {
    pub unitarity_residual: f64,
    pub homomorphism_residual: f64,
    pub pass: bool,
}

pub fn validate_rep(r: &Rep, tol: &Tolerance) -> RepReport {
    let id = Mat::identity(r.dim, r.field);
    let scale = id.norm().max(1.0);
    let unitarity = r
        .images
        .iter()
        .map(|u| (&(&u.adjoint() * u) - &id).norm())
        .fold(0.0, f64::max);
    let n = r.group.order();
    let mut hom = (&r.images[r.group.identity()] - &id).norm();
    for g in 0..n {
        for h in 0..n {
            let lhs = &r.images[r.group.mul(g, h)];
            hom = hom.max((lhs - &(&r.images[g] * &r.images[h])).norm());
        }
    }
    RepReport {
        unitarity_residual: unitarity,
        homomorphism_residual: hom,
        pass: tol.close(unitarity, scale) && tol.close(hom, scale),
    }
}

pub fn rep_object(rep: Rep) -> Obj {
    Obj::Rep(Arc::new(rep))
}

/// Builds an intertwiner, checking the intertwining equation.
pub fn intertwiner(dom: &Arc<Rep>, cod: &Arc<Rep>, mat: Mat, tol: &Tolerance) -> Result<Mor> {
    Mor::new_with_tol(Obj::Rep(dom.clone()), Obj::Rep(cod.clone()), mat, tol)
}

/// The isometric kernel of an intertwiner, carrying the restricted representation.
pub fn rep_kernel(t: &Mor, tol: &Tolerance) -> Result<Mor> {
    if t.dom().as_rep().is_none() {
        return Err(Error::InvalidInput("rep_kernel needs an intertwiner".into()));
    }
    isometric_kernel(t, tol)
}

/// The directed colimit of a finite chain of isometric intertwiners starting at `base`.
pub fn rep_directed_colimit(base: &Arc<Rep>, chain: &[Mor], tol: &Tolerance) -> Result<IsometryColimit> {
    if chain.iter().any(|m| m.dom().as_rep().is_none()) {
        return Err(Error::InvalidInput(
            "chain of a representation colimit must consist of intertwiners".into(),
        ));
    }
    finite_directed_colimit_isometries(&Obj::Rep(base.clone()), chain, tol)
}

/// Orthonormal basis (as matrices) of the intertwiner space `Hom(dom, cod)`.
///
/// For unitary representations, `T ↦ |G|⁻¹ Σ_g cod(g) T dom(g)*` is the
/// orthogonal projection onto the intertwiners; the basis spans its range.
pub fn intertwiner_space(dom: &Rep, cod: &Rep, tol: &Tolerance) -> Result<Vec<Mat>> {
    dom.field.check_same(cod.field)?;
    let (m, n) = (cod.dim, dom.dim);
    let order = dom.group.order();
    let unknowns = m * n;
    // vec(T)[i + m*j] = T[i][j].
    let mut proj = Mat::zeros(unknowns, unknowns, dom.field);
    let w = 1.0 / order as f64;
    for g in 0..order {
        let (dg, cg) = (&dom.images[g], &cod.images[g]);
        for j in 0..n {
            for l in 0..n {
                let d = dg.get(j, l).conj() * w;
                if d == C64::new(0.0, 0.0) {
                    continue;
                }
                for i in 0..m {
                    for k in 0..m {
                        let (r, c) = (i + m * j, k + m * l);
                        proj.set(r, c, proj.get(r, c) + cg.get(i, k) * d);
                    }
                }
            }
        }
    }
    // For unitary representations the average is an orthogonal projection;
    // its range is spanned by the eigenvectors with eigenvalue 1.
    let eig = eigh_hermitian(&HermMat::symmetrize(&proj), tol)?;
    let basis = eig.vectors.phase_normalize_columns();
    Ok((0..unknowns)
        .filter(|&c| eig.values[c] > 0.5)
        .map(|c| Mat::from_fn(m, n, dom.field, |i, j| basis.get(i + m * j, c)))
        .collect())
}

/// An object of the functor category on the natural numbers: a space with a Hermitian map.
#[derive(Clone, Debug, PartialEq)]
pub struct HermPair {
    pub space_dim: usize,
    pub s: HermMat,
}

impl HermPair {
    /// `(𝕂^n, diag(1, …, n))`.
    pub fn counting(n: usize, field: FieldTag) -> Self {
        let diag: Vec<f64> = (1..=n).map(|k| k as f64).collect();
        HermPair {
            space_dim: n,
            s: HermMat::symmetrize(&Mat::diag_real(&diag, field)),
        }
    }
}

/// One row of the unbounded-norm demonstration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NhilbRow {
    pub n: u64,
    pub norm: u64,
}

/// For each `n <= n_max`, builds `s_n = diag(1..n)`, the basis vector `e_n`
/// and the standard embedding `f_n : 𝕂^n → 𝕂^{n+1}`, and reports the common
/// value of `‖s_{n+1} f_n e_n‖ = ‖f_n s_n e_n‖ = ‖s_n e_n‖`, which is `n`.
/// Any cocone on this diagram would need a Hermitian part dominating every
/// one of these norms.
pub fn nhilb_obstruction_demo(n_max: usize) -> Result<Vec<NhilbRow>> {
    if n_max == 0 {
        return Err(Error::InvalidInput("n_max must be at least 1".into()));
    }
    let field = FieldTag::Real;
    let mut rows = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let s_n = HermPair::counting(n, field);
        let s_next = HermPair::counting(n + 1, field);
        let e_n = Mat::identity(n, field).column(n - 1);
        let embed = Mat::identity(n + 1, field).submatrix(0, n + 1, 0, n);
        let direct = (s_n.s.as_mat() * &e_n).norm();
        let pushed = (&embed * &(s_n.s.as_mat() * &e_n)).norm();
        let pulled = (s_next.s.as_mat() * &(&embed * &e_n)).norm();
        if direct != pushed || direct != pulled || direct.fract() != 0.0 {
            return Err(Error::InvalidInput(format!(
                "inexact norm at n = {n}: {direct}, {pushed}, {pulled}"
            )));
        }
        rows.push(NhilbRow {
            n: n as u64,
            norm: direct as u64,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn group_validation() {
        assert_eq!(GroupTable::cyclic(4).order(), 4);
        let d3 = GroupTable::dihedral(3);
        assert_eq!(d3.order(), 6);
        for g in 0..6 {
            assert_eq!(d3.mul(g, d3.inverse(g)), 0);
        }
        assert!(GroupTable::new(vec![vec![0, 1], vec![0, 1]], 0).is_err());
        assert!(GroupTable::new(vec![vec![1, 0], vec![0, 1]], 0).is_err());
        assert!(GroupTable::new(vec![], 0).is_err());
        // A Latin square that is not associative.
        let bad = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(matches!(GroupTable::new(bad, 0), Err(Error::InvalidGroup(_))));
    }

    #[test]
    fn validate_examples() {
        let c2 = Arc::new(GroupTable::cyclic(2));
        let r = validate_rep(&Rep::trivial(c2.clone(), FieldTag::Real, 3), &t());
        assert!(r.pass);
        let reg = validate_rep(&Rep::regular(c2.clone(), FieldTag::Real), &t());
        assert!(reg.pass);
        assert_eq!((reg.unitarity_residual, reg.homomorphism_residual), (0.0, 0.0));
        let bad = Rep::new(
            c2,
            FieldTag::Real,
            1,
            vec![
                Mat::from_real(1, 1, &[1.0]).unwrap(),
                Mat::from_real(1, 1, &[-0.9]).unwrap(),
            ],
        )
        .unwrap();
        let r = validate_rep(&bad, &t());
        assert!(!r.pass);
        assert!(bad.validated(&t()).is_err());
    }

    #[test]
    fn kernel_examples() {
        let c2 = Arc::new(GroupTable::cyclic(2));
        let reg = Arc::new(Rep::regular(c2.clone(), FieldTag::Real));
        let triv = Arc::new(Rep::trivial(c2.clone(), FieldTag::Real, 1));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let t_sym = intertwiner(&reg, &triv, Mat::from_real(1, 2, &[s, s]).unwrap(), &t()).unwrap();
        let k = rep_kernel(&t_sym, &t()).unwrap();
        assert_eq!(k.dom().dim(), 1);
        assert!((k.mat().get(0, 0).re - s).abs() < 1e-15 && (k.mat().get(1, 0).re + s).abs() < 1e-15);
        let sign = k.dom().as_rep().unwrap();
        assert!((sign.image(1).get(0, 0).re + 1.0).abs() < 1e-15);

        let zero = intertwiner(&reg, &reg, Mat::zeros(2, 2, FieldTag::Real), &t()).unwrap();
        let k = rep_kernel(&zero, &t()).unwrap();
        assert_eq!(k.dom(), &Obj::Rep(reg.clone()));
        let id = Obj::Rep(reg.clone()).identity();
        assert_eq!(rep_kernel(&id, &t()).unwrap().dom().dim(), 0);
    }

    #[test]
    fn non_intertwiner_rejected() {
        let c2 = Arc::new(GroupTable::cyclic(2));
        let reg = Arc::new(Rep::regular(c2.clone(), FieldTag::Real));
        let triv = Arc::new(Rep::trivial(c2, FieldTag::Real, 1));
        let err = intertwiner(&reg, &triv, Mat::from_real(1, 2, &[1.0, 0.0]).unwrap(), &t());
        assert!(matches!(err, Err(Error::NotIntertwiner { .. })));
    }

    #[test]
    fn invariance_violation_detected() {
        let c2 = Arc::new(GroupTable::cyclic(2));
        let reg = Rep::regular(c2, FieldTag::Real);
        let e1 = Mat::identity(2, FieldTag::Real).column(0);
        assert!(matches!(
            reg.restrict(&e1, &t()),
            Err(Error::InvarianceViolation { .. })
        ));
    }

    #[test]
    fn schur_on_c3() {
        let c3 = Arc::new(GroupTable::cyclic(3));
        for j in 0..3 {
            for k in 0..3 {
                let a = Rep::cyclic_character(c3.clone(), j);
                let b = Rep::cyclic_character(c3.clone(), k);
                let dim = intertwiner_space(&a, &b, &t()).unwrap().len();
                assert_eq!(dim, usize::from(j == k), "characters {j}, {k}");
            }
        }
        let reg = Rep::regular(c3.clone(), FieldTag::Complex);
        assert_eq!(intertwiner_space(&reg, &reg, &t()).unwrap().len(), 3);
    }

    #[test]
    fn nhilb_examples() {
        let rows = nhilb_obstruction_demo(7).unwrap();
        assert_eq!(rows[0], NhilbRow { n: 1, norm: 1 });
        assert_eq!(rows[6], NhilbRow { n: 7, norm: 7 });
        assert!(rows.windows(2).all(|w| w[0].norm < w[1].norm));
        assert!(nhilb_obstruction_demo(0).is_err());
    }
}
