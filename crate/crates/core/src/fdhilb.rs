//! Finite-dimensional Hilbert spaces over ℝ or ℂ: objects are dimensions,
//! morphisms are matrices, the dagger is the conjugate transpose.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::{FieldTag, Mat, Tolerance};
use crate::star::{isometric_kernel, orthonormal_product, BiproductStructure, Instance, Mor, Obj};

/// `𝕂^dim`. Equality is structural.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FdObject {
    pub dim: usize,
    pub field: FieldTag,
}

impl FdObject {
    pub fn new(dim: usize, field: FieldTag) -> Self {
        FdObject { dim, field }
    }
}

impl From<FdObject> for Obj {
    fn from(o: FdObject) -> Obj {
        Obj::Fd(o)
    }
}

pub fn make_morphism(dom: FdObject, cod: FdObject, mat: Mat) -> Result<Mor> {
    Mor::new(Obj::Fd(dom), Obj::Fd(cod), mat)
}

pub fn fd_isometric_kernel(f: &Mor, tol: &Tolerance) -> Result<Mor> {
    isometric_kernel(f, tol)
}

pub fn fd_orthonormal_product(field: FieldTag, objs: &[FdObject]) -> Result<BiproductStructure> {
    let objs: Vec<Obj> = objs.iter().map(|&o| Obj::Fd(o)).collect();
    orthonormal_product(&Instance::Fd(field), &objs)
}
