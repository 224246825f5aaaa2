//! Dense linear algebra over ℝ and ℂ.

mod decomp;
mod json;
mod mat;

pub use decomp::{
    eigh_hermitian, hermitian_inverse, loewner_leq, order_margin, pinv, positive_sqrt, psd_slack, range_null_bases,
    spectral_norm, svd, Eigh, HermMat, RangeNull, Svd, Tolerance,
};
pub use mat::{mat_op, FieldTag, Mat, MatOp, C64};
