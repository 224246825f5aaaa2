use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Scalar field of a matrix or Hilbert space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FieldTag {
    #[serde(rename = "R")]
    Real,
    #[serde(rename = "C")]
    Complex,
}

impl FieldTag {
    pub fn tag(self) -> &'static str {
        match self {
            FieldTag::Real => "R",
            FieldTag::Complex => "C",
        }
    }

    pub(crate) fn check_same(self, other: FieldTag) -> Result<FieldTag> {
        if self == other {
            Ok(self)
        } else {
            Err(Error::FieldMismatch(format!("{} vs {}", self.tag(), other.tag())))
        }
    }
}

impl fmt::Display for FieldTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Dense row-major matrix over ℝ or ℂ.
///
/// Entries are always stored as complex numbers; a matrix tagged
/// [`FieldTag::Real`] has every imaginary part equal to zero, which the
/// arithmetic below preserves exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    field: FieldTag,
    data: Vec<C64>,
}

impl Mat {
    pub fn new(rows: usize, cols: usize, field: FieldTag, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("matrix entries must be finite".into()));
        }
        if field == FieldTag::Real && data.iter().any(|z| z.im != 0.0) {
            return Err(Error::FieldMismatch("real matrix with nonzero imaginary part".into()));
        }
        Ok(Mat {
            rows,
            cols,
            field,
            data,
        })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Mat::new(
            rows,
            cols,
            FieldTag::Real,
            data.iter().map(|&x| C64::new(x, 0.0)).collect(),
        )
    }

    pub fn from_complex(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        Mat::new(rows, cols, FieldTag::Complex, data)
    }

    /// Builds a matrix entry by entry. Imaginary parts are dropped for real matrices.
    pub fn from_fn(rows: usize, cols: usize, field: FieldTag, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let z = f(i, j);
                data.push(match field {
                    FieldTag::Real => C64::new(z.re, 0.0),
                    FieldTag::Complex => z,
                });
            }
        }
        Mat {
            rows,
            cols,
            field,
            data,
        }
    }

    pub fn zeros(rows: usize, cols: usize, field: FieldTag) -> Self {
        Mat {
            rows,
            cols,
            field,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize, field: FieldTag) -> Self {
        Mat::from_fn(n, n, field, |i, j| {
            if i == j {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    pub fn diag_real(values: &[f64], field: FieldTag) -> Self {
        let n = values.len();
        Mat::from_fn(n, n, field, |i, j| {
            if i == j {
                C64::new(values[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn field(&self) -> FieldTag {
        self.field
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, self.field, |i, j| self.get(j, i).conj())
    }

    pub fn checked_add(&self, other: &Mat) -> Result<Mat> {
        self.check_same_shape(other, "add")?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn checked_sub(&self, other: &Mat) -> Result<Mat> {
        self.check_same_shape(other, "sub")?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    pub fn checked_mul(&self, other: &Mat) -> Result<Mat> {
        self.field.check_same(other.field)?;
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "mul {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let (m, k, n) = (self.rows, self.cols, other.cols);
        let mut data = vec![C64::new(0.0, 0.0); m * n];
        for i in 0..m {
            let row = &mut data[i * n..(i + 1) * n];
            for l in 0..k {
                let a = self.data[i * k + l];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let brow = &other.data[l * n..(l + 1) * n];
                for (r, &b) in row.iter_mut().zip(brow) {
                    *r += a * b;
                }
            }
        }
        Ok(Mat {
            rows: m,
            cols: n,
            field: self.field,
            data,
        })
    }

    /// Scales by a complex scalar; a real matrix only accepts real scalars.
    pub fn checked_scale(&self, c: C64) -> Result<Mat> {
        if self.field == FieldTag::Real && c.im != 0.0 {
            return Err(Error::FieldMismatch("complex scalar applied to a real matrix".into()));
        }
        Ok(self.map(|z| z * c))
    }

    pub fn scale(&self, c: f64) -> Mat {
        self.map(|z| z * c)
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Mat {
        let field = self.field;
        let data = self
            .data
            .iter()
            .map(|&z| {
                let w = f(z);
                match field {
                    FieldTag::Real => C64::new(w.re, 0.0),
                    FieldTag::Complex => w,
                }
            })
            .collect();
        Mat {
            rows: self.rows,
            cols: self.cols,
            field,
            data,
        }
    }

    fn zip_with(&self, other: &Mat, f: impl Fn(C64, C64) -> C64) -> Mat {
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Mat {
            rows: self.rows,
            cols: self.cols,
            field: self.field,
            data,
        }
    }

    fn check_same_shape(&self, other: &Mat, what: &str) -> Result<()> {
        self.field.check_same(other.field)?;
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch(format!(
                "{what} {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    /// Rows `r0..r1`, columns `c0..c1`.
    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Mat {
        assert!(
            r0 <= r1 && r1 <= self.rows && c0 <= c1 && c1 <= self.cols,
            "submatrix out of range"
        );
        Mat::from_fn(r1 - r0, c1 - c0, self.field, |i, j| self.get(r0 + i, c0 + j))
    }

    pub fn column(&self, j: usize) -> Mat {
        self.submatrix(0, self.rows, j, j + 1)
    }

    pub fn columns(&self, idx: &[usize]) -> Mat {
        Mat::from_fn(self.rows, idx.len(), self.field, |i, j| self.get(i, idx[j]))
    }

    /// Horizontal concatenation; all parts must share the row count.
    pub fn hstack(parts: &[&Mat], rows: usize, field: FieldTag) -> Result<Mat> {
        for p in parts {
            field.check_same(p.field)?;
            if p.rows != rows {
                return Err(Error::ShapeMismatch(format!("hstack of {} rows into {rows}", p.rows)));
            }
        }
        let cols = parts.iter().map(|p| p.cols).sum();
        let mut out = Mat::zeros(rows, cols, field);
        let mut c0 = 0;
        for p in parts {
            out.set_block(0, c0, p);
            c0 += p.cols;
        }
        Ok(out)
    }

    /// Vertical concatenation; all parts must share the column count.
    pub fn vstack(parts: &[&Mat], cols: usize, field: FieldTag) -> Result<Mat> {
        for p in parts {
            field.check_same(p.field)?;
            if p.cols != cols {
                return Err(Error::ShapeMismatch(format!("vstack of {} cols into {cols}", p.cols)));
            }
        }
        let rows = parts.iter().map(|p| p.rows).sum();
        let mut out = Mat::zeros(rows, cols, field);
        let mut r0 = 0;
        for p in parts {
            out.set_block(r0, 0, p);
            r0 += p.rows;
        }
        Ok(out)
    }

    /// Pads with zero rows at the bottom up to `rows`.
    pub fn pad_rows(&self, rows: usize) -> Mat {
        assert!(rows >= self.rows);
        let mut out = Mat::zeros(rows, self.cols, self.field);
        out.set_block(0, 0, self);
        out
    }

    pub(crate) fn set_block(&mut self, r0: usize, c0: usize, block: &Mat) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.data[(r0 + i) * self.cols + c0 + j] = block.get(i, j);
            }
        }
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, z: C64) {
        self.data[i * self.cols + j] = match self.field {
            FieldTag::Real => C64::new(z.re, 0.0),
            FieldTag::Complex => z,
        };
    }

    /// Reinterprets a real matrix as complex.
    pub fn to_complex(&self) -> Mat {
        Mat {
            field: FieldTag::Complex,
            ..self.clone()
        }
    }

    /// Bitwise equality of all entries, distinguishing `-0.0` from `0.0`.
    /// Exact entrywise equality as IEEE values, so `0.0 == -0.0`.
    pub fn exact_eq(&self, other: &Mat) -> bool {
        self.shape() == other.shape() && self.field == other.field && self.data == other.data
    }

    pub fn bit_eq(&self, other: &Mat) -> bool {
        self.shape() == other.shape()
            && self.field == other.field
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(a, b)| a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits())
    }

    /// Makes the first entry of each column with magnitude above `eps`
    /// (relative to the column's largest entry) real and positive.
    pub fn phase_normalize_columns(&self) -> Mat {
        let mut out = self.clone();
        for j in 0..self.cols {
            let col_max = (0..self.rows).map(|i| self.get(i, j).norm()).fold(0.0, f64::max);
            if col_max == 0.0 {
                continue;
            }
            let pivot = (0..self.rows)
                .map(|i| self.get(i, j))
                .find(|z| z.norm() > 1e-8 * col_max);
            if let Some(p) = pivot {
                let phase = p.conj() / p.norm();
                for i in 0..self.rows {
                    let z = self.get(i, j) * phase;
                    out.set(i, j, z);
                }
            }
        }
        out
    }
}

impl Add for &Mat {
    type Output = Mat;
    /// Panics on shape or field mismatch; use [`Mat::checked_add`] for fallible input.
    fn add(self, rhs: &Mat) -> Mat {
        self.checked_add(rhs).expect("matrix add")
    }
}

impl Sub for &Mat {
    type Output = Mat;
    fn sub(self, rhs: &Mat) -> Mat {
        self.checked_sub(rhs).expect("matrix sub")
    }
}

impl Mul for &Mat {
    type Output = Mat;
    fn mul(self, rhs: &Mat) -> Mat {
        self.checked_mul(rhs).expect("matrix mul")
    }
}

impl Neg for &Mat {
    type Output = Mat;
    fn neg(self) -> Mat {
        self.map(|z| -z)
    }
}

/// The arithmetic operations exposed by [`mat_op`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MatOp {
    Add,
    Sub,
    Mul,
    Adjoint,
    Scale(C64),
}

/// Checked matrix arithmetic. Binary operations require `b`.
pub fn mat_op(a: &Mat, b: Option<&Mat>, op: MatOp) -> Result<Mat> {
    let need_b = || b.ok_or_else(|| Error::InvalidInput("binary operation needs a second operand".into()));
    match op {
        MatOp::Add => a.checked_add(need_b()?),
        MatOp::Sub => a.checked_sub(need_b()?),
        MatOp::Mul => a.checked_mul(need_b()?),
        MatOp::Adjoint => Ok(a.adjoint()),
        MatOp::Scale(c) => a.checked_scale(c),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(rows: usize, cols: usize, d: &[f64]) -> Mat {
        Mat::from_real(rows, cols, d).unwrap()
    }

    #[test]
    fn adjoint_examples() {
        let i2 = Mat::identity(2, FieldTag::Real);
        assert_eq!(i2.adjoint(), i2);
        assert_eq!(r(2, 2, &[0., 1., 0., 0.]).adjoint(), r(2, 2, &[0., 0., 1., 0.]));
        let z = Mat::from_complex(1, 2, vec![C64::new(1.0, 2.0), C64::new(0.0, -1.0)]).unwrap();
        let za = z.adjoint();
        assert_eq!(za.shape(), (2, 1));
        assert_eq!(za.get(0, 0), C64::new(1.0, -2.0));
        assert_eq!(za.get(1, 0), C64::new(0.0, 1.0));
    }

    #[test]
    fn row_times_column() {
        let p = mat_op(&r(1, 2, &[1., 0.]), Some(&r(2, 1, &[1., 0.])), MatOp::Mul).unwrap();
        assert_eq!(p, r(1, 1, &[1.]));
    }

    #[test]
    fn mismatches_are_reported() {
        let a = r(2, 2, &[1., 2., 3., 4.]);
        let b = r(3, 1, &[1., 2., 3.]);
        assert!(matches!(a.checked_add(&b), Err(Error::ShapeMismatch(_))));
        assert!(matches!(a.checked_mul(&b), Err(Error::ShapeMismatch(_))));
        let c = a.to_complex();
        assert!(matches!(a.checked_add(&c), Err(Error::FieldMismatch(_))));
        assert!(matches!(
            a.checked_scale(C64::new(0.0, 1.0)),
            Err(Error::FieldMismatch(_))
        ));
        assert!(matches!(mat_op(&a, None, MatOp::Sub), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn constructor_rejects_bad_data() {
        assert!(Mat::from_real(2, 2, &[1.0]).is_err());
        assert!(Mat::from_real(1, 1, &[f64::NAN]).is_err());
        assert!(Mat::new(1, 1, FieldTag::Real, vec![C64::new(0.0, 1.0)]).is_err());
    }

    #[test]
    fn empty_shapes_multiply() {
        let a = Mat::zeros(3, 0, FieldTag::Complex);
        let b = Mat::zeros(0, 2, FieldTag::Complex);
        let p = &a * &b;
        assert_eq!(p, Mat::zeros(3, 2, FieldTag::Complex));
        assert_eq!((&a.adjoint() * &a).shape(), (0, 0));
    }

    #[test]
    fn stacking() {
        let a = r(1, 2, &[1., 2.]);
        let b = r(1, 1, &[3.]);
        assert_eq!(
            Mat::hstack(&[&a, &b], 1, FieldTag::Real).unwrap(),
            r(1, 3, &[1., 2., 3.])
        );
        let v = Mat::vstack(&[&a, &a], 2, FieldTag::Real).unwrap();
        assert_eq!(v, r(2, 2, &[1., 2., 1., 2.]));
        assert!(Mat::vstack(&[&a, &b], 2, FieldTag::Real).is_err());
    }

    #[test]
    fn phase_normalization_makes_pivot_positive() {
        let m = Mat::from_complex(2, 1, vec![C64::new(0.0, -1.0), C64::new(1.0, 0.0)]).unwrap();
        let n = m.phase_normalize_columns();
        assert!((n.get(0, 0) - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((n.get(1, 0) - C64::new(0.0, 1.0)).norm() < 1e-15);
    }
}
