//! The dagger-category interface and the structure derived from it:
//! morphism classification, orthonormal products with their block calculus,
//! isometric kernels, orthonormal complements and hom-set inner products.
//!
//! Objects and morphisms are values interpreted by their instance
//! ([`Instance::Fd`] for finite-dimensional Hilbert spaces, [`Instance::URep`]
//! for unitary representations of a finite group). Every morphism carries a
//! matrix acting on column vectors, so `g ∘ f` is the matrix product `g·f`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fdhilb::FdObject;
use crate::linalg::{
    eigh_hermitian, hermitian_inverse, loewner_leq, order_margin, range_null_bases, FieldTag, HermMat, Mat, Tolerance,
};
use crate::urep::{GroupTable, Rep};

/// A category instance: which kind of objects and which scalar field.
#[derive(Clone, Debug, PartialEq)]
pub enum Instance {
    Fd(FieldTag),
    URep { group: Arc<GroupTable>, field: FieldTag },
}

impl Instance {
    pub fn field(&self) -> FieldTag {
        match self {
            Instance::Fd(f) => *f,
            Instance::URep { field, .. } => *field,
        }
    }

    /// Name used in the morphism wire format.
    pub fn tag(&self) -> &'static str {
        match self {
            Instance::Fd(FieldTag::Real) => "fdhilb-R",
            Instance::Fd(FieldTag::Complex) => "fdhilb-C",
            Instance::URep { .. } => "urep",
        }
    }

    pub fn zero_object(&self) -> Obj {
        match self {
            Instance::Fd(field) => Obj::Fd(FdObject::new(0, *field)),
            Instance::URep { group, field } => Obj::Rep(Arc::new(Rep::zero(group.clone(), *field))),
        }
    }

    /// The canonical orthogonal direct sum of `objs`, all of this instance.
    pub(crate) fn direct_sum(&self, objs: &[Obj]) -> Result<Obj> {
        for o in objs {
            if o.instance() != *self {
                return Err(Error::FieldMismatch(format!(
                    "component of instance {} in a product over {}",
                    o.instance().tag(),
                    self.tag()
                )));
            }
        }
        Ok(match self {
            Instance::Fd(field) => Obj::Fd(FdObject::new(objs.iter().map(Obj::dim).sum(), *field)),
            Instance::URep { group, field } => {
                let reps: Vec<&Rep> = objs
                    .iter()
                    .map(|o| o.as_rep().expect("checked instance").as_ref())
                    .collect();
                Obj::Rep(Arc::new(Rep::direct_sum(group.clone(), *field, &reps)))
            }
        })
    }
}

/// An object of some instance.
#[derive(Clone, Debug, PartialEq)]
pub enum Obj {
    Fd(FdObject),
    Rep(Arc<Rep>),
}

impl Obj {
    pub fn fd(dim: usize, field: FieldTag) -> Obj {
        Obj::Fd(FdObject::new(dim, field))
    }

    pub fn dim(&self) -> usize {
        match self {
            Obj::Fd(o) => o.dim,
            Obj::Rep(r) => r.dim(),
        }
    }

    pub fn field(&self) -> FieldTag {
        match self {
            Obj::Fd(o) => o.field,
            Obj::Rep(r) => r.field(),
        }
    }

    pub fn instance(&self) -> Instance {
        match self {
            Obj::Fd(o) => Instance::Fd(o.field),
            Obj::Rep(r) => Instance::URep {
                group: r.group().clone(),
                field: r.field(),
            },
        }
    }

    pub fn as_rep(&self) -> Option<&Arc<Rep>> {
        match self {
            Obj::Rep(r) => Some(r),
            Obj::Fd(_) => None,
        }
    }

    pub fn identity(&self) -> Mor {
        Mor::unchecked(self.clone(), self.clone(), Mat::identity(self.dim(), self.field()))
    }

    /// The subobject spanned by the orthonormal columns of `basis`, together
    /// with its inclusion isometry.
    pub(crate) fn restrict(&self, basis: &Mat, tol: &Tolerance) -> Result<Mor> {
        let sub = match self {
            Obj::Fd(o) => Obj::fd(basis.cols(), o.field),
            Obj::Rep(r) => Obj::Rep(Arc::new(r.restrict(basis, tol)?)),
        };
        Ok(Mor::unchecked(sub, self.clone(), basis.clone()))
    }
}

/// A morphism `dom → cod` with its matrix (`cod.dim × dom.dim`).
#[derive(Clone, Debug, PartialEq)]
pub struct Mor {
    dom: Obj,
    cod: Obj,
    mat: Mat,
}

impl Mor {
    /// Validates shape, field and instance agreement; for representations
    /// also checks that `mat` intertwines within the default tolerance.
    pub fn new(dom: Obj, cod: Obj, mat: Mat) -> Result<Self> {
        Self::new_with_tol(dom, cod, mat, &Tolerance::default())
    }

    pub fn new_with_tol(dom: Obj, cod: Obj, mat: Mat, tol: &Tolerance) -> Result<Self> {
        if dom.instance() != cod.instance() {
            return Err(Error::FieldMismatch(format!(
                "morphism between instances {} and {}",
                dom.instance().tag(),
                cod.instance().tag()
            )));
        }
        dom.field().check_same(mat.field())?;
        if mat.shape() != (cod.dim(), dom.dim()) {
            return Err(Error::ShapeMismatch(format!(
                "matrix {:?} for a morphism {} -> {}",
                mat.shape(),
                dom.dim(),
                cod.dim()
            )));
        }
        if let (Obj::Rep(d), Obj::Rep(c)) = (&dom, &cod) {
            let residual = crate::urep::intertwining_residual(d, c, &mat);
            if !tol.close(residual, mat.norm()) {
                return Err(Error::NotIntertwiner { residual });
            }
        }
        Ok(Mor { dom, cod, mat })
    }

    pub(crate) fn unchecked(dom: Obj, cod: Obj, mat: Mat) -> Self {
        debug_assert_eq!(mat.shape(), (cod.dim(), dom.dim()));
        Mor { dom, cod, mat }
    }

    pub fn zero(dom: &Obj, cod: &Obj) -> Self {
        Mor::unchecked(dom.clone(), cod.clone(), Mat::zeros(cod.dim(), dom.dim(), dom.field()))
    }

    pub fn dom(&self) -> &Obj {
        &self.dom
    }

    pub fn cod(&self) -> &Obj {
        &self.cod
    }

    pub fn mat(&self) -> &Mat {
        &self.mat
    }

    pub fn field(&self) -> FieldTag {
        self.mat.field()
    }

    pub fn instance(&self) -> Instance {
        self.dom.instance()
    }

    /// Frobenius norm of the matrix.
    pub fn norm(&self) -> f64 {
        self.mat.norm()
    }

    /// The adjoint: domain and codomain swapped, matrix conjugate-transposed.
    pub fn dag(&self) -> Mor {
        Mor {
            dom: self.cod.clone(),
            cod: self.dom.clone(),
            mat: self.mat.adjoint(),
        }
    }

    /// `self ∘ f`.
    pub fn compose(&self, f: &Mor) -> Result<Mor> {
        if f.cod != self.dom {
            return Err(Error::NotComposable(format!(
                "codomain of dimension {} against domain of dimension {}",
                f.cod.dim(),
                self.dom.dim()
            )));
        }
        Ok(Mor {
            dom: f.dom.clone(),
            cod: self.cod.clone(),
            mat: &self.mat * &f.mat,
        })
    }

    pub fn is_parallel(&self, other: &Mor) -> bool {
        self.dom == other.dom && self.cod == other.cod
    }

    fn check_parallel(&self, other: &Mor) -> Result<()> {
        if self.is_parallel(other) {
            Ok(())
        } else {
            Err(Error::ShapeMismatch("morphisms are not parallel".into()))
        }
    }

    pub fn add(&self, other: &Mor) -> Result<Mor> {
        self.check_parallel(other)?;
        Ok(Mor {
            mat: &self.mat + &other.mat,
            ..self.clone()
        })
    }

    pub fn sub(&self, other: &Mor) -> Result<Mor> {
        self.check_parallel(other)?;
        Ok(Mor {
            mat: &self.mat - &other.mat,
            ..self.clone()
        })
    }

    pub fn scale(&self, c: f64) -> Mor {
        Mor {
            mat: self.mat.scale(c),
            ..self.clone()
        }
    }

    /// Same morphism on the same objects with a new matrix of identical shape.
    pub(crate) fn with_mat(&self, mat: Mat) -> Mor {
        debug_assert_eq!(mat.shape(), self.mat.shape());
        Mor { mat, ..self.clone() }
    }

    /// Forgets representation structure: the underlying linear map.
    pub fn underlying(&self) -> Mor {
        let f = self.field();
        Mor::unchecked(Obj::fd(self.dom.dim(), f), Obj::fd(self.cod.dim(), f), self.mat.clone())
    }
}

/// A Hermitian endomorphism.
#[derive(Clone, Debug, PartialEq)]
pub struct HermEndo(Mor);

impl HermEndo {
    pub fn new(m: Mor, tol: &Tolerance) -> Result<Self> {
        if m.dom != m.cod {
            return Err(Error::ShapeMismatch("Hermitian endomorphism needs dom = cod".into()));
        }
        let h = HermMat::new(m.mat.clone(), tol)?;
        Ok(HermEndo(m.with_mat(h.into_mat())))
    }

    pub(crate) fn from_herm(obj: &Obj, h: HermMat) -> Self {
        HermEndo(Mor::unchecked(obj.clone(), obj.clone(), h.into_mat()))
    }

    pub fn as_mor(&self) -> &Mor {
        &self.0
    }

    pub fn obj(&self) -> &Obj {
        &self.0.dom
    }

    pub fn to_herm_mat(&self) -> HermMat {
        HermMat::symmetrize(&self.0.mat)
    }
}

/// Flags decided by [`classify_morphism`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MorphismClass {
    pub isometry: bool,
    pub coisometry: bool,
    pub unitary: bool,
    pub partial_isometry: bool,
    pub contraction: bool,
    pub strict_contraction: bool,
}

fn identity_residual(m: &Mat, tol: &Tolerance) -> bool {
    let id = Mat::identity(m.rows(), m.field());
    tol.close((m - &id).norm(), m.norm().max(id.norm()))
}

/// Decides the isometry-type flags of `f` from their defining equations.
pub fn classify_morphism(f: &Mor, tol: &Tolerance) -> Result<MorphismClass> {
    let m = f.mat();
    let ftf = &m.adjoint() * m;
    let fft = m * &m.adjoint();
    let isometry = identity_residual(&ftf, tol);
    let coisometry = identity_residual(&fft, tol);
    let partial = {
        let r = (&(&fft * m) - m).norm();
        tol.close(r, m.norm())
    };
    let gram = HermMat::symmetrize(&ftf);
    let one = HermMat::identity(f.dom().dim(), f.field());
    let contraction = loewner_leq(&gram, &one, tol)?;
    let strict = eigh_hermitian(&one.sub(&gram), tol)?.min() > tol.atol + tol.rtol;
    Ok(MorphismClass {
        isometry,
        coisometry,
        unitary: isometry && coisometry,
        partial_isometry: partial,
        contraction,
        strict_contraction: strict,
    })
}

/// An orthonormal product: apex with injections `i_j` and projections `p_j = i_j*`.
#[derive(Clone, Debug, PartialEq)]
pub struct BiproductStructure {
    pub apex: Obj,
    pub components: Vec<Obj>,
    pub injections: Vec<Mor>,
    pub projections: Vec<Mor>,
}

impl BiproductStructure {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Row offset of component `j` inside the apex.
    pub fn offset(&self, j: usize) -> usize {
        self.components[..j].iter().map(Obj::dim).sum()
    }

    /// Largest entrywise deviation of `p_j i_k` from `δ_jk`, and of
    /// `Σ_j i_j p_j` from the identity. Both are exactly zero for the
    /// canonical products built here.
    pub fn equation_defects(&self) -> (f64, f64) {
        let mut pi = 0.0f64;
        for (j, p) in self.projections.iter().enumerate() {
            for (k, i) in self.injections.iter().enumerate() {
                let prod = p.mat() * i.mat();
                let target = if j == k {
                    Mat::identity(prod.rows(), prod.field())
                } else {
                    Mat::zeros(prod.rows(), prod.cols(), prod.field())
                };
                pi = pi.max((&prod - &target).max_abs());
            }
        }
        let n = self.apex.dim();
        let field = self.apex.field();
        let sum = self
            .injections
            .iter()
            .zip(&self.projections)
            .fold(Mat::zeros(n, n, field), |acc, (i, p)| &acc + &(i.mat() * p.mat()));
        (pi, (&sum - &Mat::identity(n, field)).max_abs())
    }
}

/// The canonical orthonormal product of `objs` within `instance`. An empty
/// list gives the zero object with no legs.
pub fn orthonormal_product(instance: &Instance, objs: &[Obj]) -> Result<BiproductStructure> {
    let apex = instance.direct_sum(objs)?;
    let n = apex.dim();
    let field = instance.field();
    let mut injections = Vec::with_capacity(objs.len());
    let mut offset = 0;
    for o in objs {
        let d = o.dim();
        let m = Mat::from_fn(n, d, field, |r, c| {
            if r == offset + c {
                crate::linalg::C64::new(1.0, 0.0)
            } else {
                crate::linalg::C64::new(0.0, 0.0)
            }
        });
        injections.push(Mor::unchecked(o.clone(), apex.clone(), m));
        offset += d;
    }
    let projections = injections.iter().map(Mor::dag).collect();
    Ok(BiproductStructure {
        apex,
        components: objs.to_vec(),
        injections,
        projections,
    })
}

/// Assembles `grid[j][k] : dom_j → cod_k` into one morphism between the apexes.
pub fn block_assemble(grid: &[Vec<Mor>], dom_bp: &BiproductStructure, cod_bp: &BiproductStructure) -> Result<Mor> {
    if grid.len() != dom_bp.len() {
        return Err(Error::ShapeMismatch(format!(
            "grid has {} rows for {} domain components",
            grid.len(),
            dom_bp.len()
        )));
    }
    let field = dom_bp.apex.field();
    let mut m = Mat::zeros(cod_bp.apex.dim(), dom_bp.apex.dim(), field);
    for (j, row) in grid.iter().enumerate() {
        if row.len() != cod_bp.len() {
            return Err(Error::ShapeMismatch(format!(
                "grid row {j} has {} entries for {} codomain components",
                row.len(),
                cod_bp.len()
            )));
        }
        for (k, entry) in row.iter().enumerate() {
            if entry.dom() != &dom_bp.components[j] || entry.cod() != &cod_bp.components[k] {
                return Err(Error::ShapeMismatch(format!(
                    "grid entry ({j},{k}) has the wrong domain or codomain"
                )));
            }
            field.check_same(entry.field())?;
            m.set_block(cod_bp.offset(k), dom_bp.offset(j), entry.mat());
        }
    }
    Ok(Mor::unchecked(dom_bp.apex.clone(), cod_bp.apex.clone(), m))
}

/// `p_k ∘ f ∘ i_j`.
pub fn block_extract(
    f: &Mor,
    dom_bp: &BiproductStructure,
    cod_bp: &BiproductStructure,
    j: usize,
    k: usize,
) -> Result<Mor> {
    if j >= dom_bp.len() || k >= cod_bp.len() {
        return Err(Error::ShapeMismatch(format!("block ({j},{k}) out of range")));
    }
    cod_bp.projections[k].compose(&f.compose(&dom_bp.injections[j])?)
}

/// The adjoint-transposed grid: entry `(k, j)` is `dag(grid[j][k])`.
pub fn grid_dagger(grid: &[Vec<Mor>]) -> Vec<Vec<Mor>> {
    let cols = grid.first().map_or(0, Vec::len);
    (0..cols)
        .map(|k| grid.iter().map(|row| row[k].dag()).collect())
        .collect()
}

/// An isometry onto the null space of `f` (orthonormal, phase-normalized basis).
pub fn isometric_kernel(f: &Mor, tol: &Tolerance) -> Result<Mor> {
    let rn = range_null_bases(f.mat(), tol)?;
    f.dom().restrict(&rn.null_basis, tol)
}

/// The isometric kernel of `dag(x)`.
pub fn orthonormal_complement(x: &Mor, tol: &Tolerance) -> Result<Mor> {
    isometric_kernel(&x.dag(), tol)
}

/// An isometry onto the range of `x`.
pub fn range_isometry(x: &Mor, tol: &Tolerance) -> Result<Mor> {
    let rn = range_null_bases(x.mat(), tol)?;
    x.cod().restrict(&rn.range_basis, tol)
}

/// `⟨f, g⟩ = f* g`, an endomorphism of the common domain.
pub fn hom_inner_product(f: &Mor, g: &Mor) -> Result<Mor> {
    f.check_parallel(g)?;
    f.dag().compose(g)
}

/// `|f|² = f* f`.
pub fn gram(f: &Mor) -> HermEndo {
    let m = f.mat();
    HermEndo::from_herm(f.dom(), HermMat::symmetrize(&(&m.adjoint() * m)))
}

/// Outcome of [`cauchy_schwarz_gen_check`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CauchySchwarz {
    pub holds: bool,
    /// Smallest eigenvalue of `|y|² - ⟨y,x⟩ a⁻¹ ⟨x,y⟩`.
    pub margin: f64,
}

/// Checks `⟨y,x⟩ a⁻¹ ⟨x,y⟩ <= |y|²` for invertible `a >= |x|²`.
pub fn cauchy_schwarz_gen_check(x: &Mor, y: &Mor, a: &HermEndo, tol: &Tolerance) -> Result<CauchySchwarz> {
    x.check_parallel(y)?;
    if a.obj() != x.dom() {
        return Err(Error::ShapeMismatch(
            "a must be an endomorphism of the common domain".into(),
        ));
    }
    let a_h = a.to_herm_mat();
    let gx = gram(x).to_herm_mat();
    if !loewner_leq(&gx, &a_h, tol)? {
        return Err(Error::PreconditionViolated("a is not above |x|^2".into()));
    }
    let a_inv = hermitian_inverse(&a_h, tol)?;
    let xy = hom_inner_product(x, y)?;
    let lhs = a_inv.conjugate_by(&xy.mat().adjoint());
    let gy = gram(y).to_herm_mat();
    let margin = order_margin(&lhs, &gy, tol)?;
    Ok(CauchySchwarz {
        holds: margin >= -tol.threshold(lhs.norm().max(gy.norm())),
        margin,
    })
}
