//! The registered property suites. Each case draws its instance from its
//! own seed, runs the operations and records residuals against fixed
//! thresholds. Operations themselves use the caller's [`Tolerance`].

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use super::gen::{
    contraction_matrix, gaussian, gen_increasing_chain, low_rank, random_isometry, random_psd, GeometricChain,
};
use super::report::CaseCtx;
use crate::completion::*;
use crate::error::{Error, Result};
use crate::linalg::{
    eigh_hermitian, hermitian_inverse, order_margin, positive_sqrt, FieldTag, HermMat, Mat, Tolerance, C64,
};
use crate::star::*;
use crate::urep::*;

pub type CaseFn = fn(&mut CaseCtx, &Tolerance) -> Result<()>;

pub struct SuiteDef {
    pub name: &'static str,
    pub default_count: usize,
    pub about: &'static str,
    pub case: CaseFn,
}

pub static SUITES: &[SuiteDef] = &[
    SuiteDef {
        name: "dagger-laws",
        default_count: 1000,
        about: "dagger involution, contravariance, biproduct and block calculus",
        case: dagger_laws,
    },
    SuiteDef {
        name: "order-module",
        default_count: 500,
        about: "parallelogram, weak triangle, generalized Cauchy-Schwarz",
        case: order_module,
    },
    SuiteDef {
        name: "sup-calculus",
        default_count: 200,
        about: "monotone suprema, conjugation, approximate inverses",
        case: sup_calculus,
    },
    SuiteDef {
        name: "douglas",
        default_count: 200,
        about: "Douglas factorization of (f, u f)",
        case: douglas,
    },
    SuiteDef {
        name: "codilation",
        default_count: 200,
        about: "codilations and codilator universality",
        case: codilation_suite,
    },
    SuiteDef {
        name: "order-sums",
        default_count: 300,
        about: "order sums of orthogonal families",
        case: order_sums,
    },
    SuiteDef {
        name: "l2-products",
        default_count: 200,
        about: "l2-products, mediating maps, epi-iso, gluing",
        case: l2_products,
    },
    SuiteDef {
        name: "l2-limits",
        default_count: 200,
        about: "codirected l2-limits and archimedean witnesses",
        case: l2_limits,
    },
    SuiteDef {
        name: "colimits",
        default_count: 200,
        about: "directed colimits of isometry chains",
        case: colimits,
    },
    SuiteDef {
        name: "urep",
        default_count: 200,
        about: "representations, intertwiners, componentwise colimits",
        case: urep_suite,
    },
    SuiteDef {
        name: "nhilb-demo",
        default_count: 50,
        about: "unbounded norms on the counting diagram",
        case: nhilb_demo,
    },
];

pub fn find_suite(name: &str) -> Result<&'static SuiteDef> {
    SUITES
        .iter()
        .find(|s| s.name == name)
        .ok_or_else(|| Error::UnknownSuite(name.to_string()))
}

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|s| s.name).collect()
}

fn fd(dim: usize, field: FieldTag) -> Obj {
    Obj::fd(dim, field)
}

fn mor(m: Mat) -> Mor {
    let field = m.field();
    Mor::new(fd(m.cols(), field), fd(m.rows(), field), m).expect("shape from matrix")
}

fn rand_mor(rng: &mut impl Rng, dom: usize, cod: usize, field: FieldTag) -> Mor {
    mor(gaussian(rng, cod, dom, field))
}

/// Entrywise maximum difference; `INFINITY` on a shape mismatch.
fn diff(a: &Mat, b: &Mat) -> f64 {
    a.checked_sub(b).map(|d| d.max_abs()).unwrap_or(f64::INFINITY)
}

fn fro(a: &Mat, b: &Mat) -> f64 {
    a.checked_sub(b).map(|d| d.norm()).unwrap_or(f64::INFINITY)
}

fn exact_residual(a: &Mat, b: &Mat) -> f64 {
    if a.exact_eq(b) {
        0.0
    } else {
        diff(a, b).max(f64::MIN_POSITIVE)
    }
}

fn iso_defect(m: &Mat) -> f64 {
    fro(&(&m.adjoint() * m), &Mat::identity(m.cols(), m.field()))
}

fn gram_mat(m: &Mat) -> Mat {
    &m.adjoint() * m
}

// ---------------------------------------------------------------- dagger-laws

fn dagger_laws(cx: &mut CaseCtx, _tol: &Tolerance) -> Result<()> {
    let field = cx.field();
    let mut rng = cx.rng();
    let (m, n, p) = (
        rng.random_range(0..=6),
        rng.random_range(0..=6),
        rng.random_range(0..=6),
    );
    let f = rand_mor(&mut rng, m, n, field);
    let g = rand_mor(&mut rng, n, p, field);
    cx.digest(&[f.mat(), g.mat()]);

    cx.check("involution", exact_residual(f.dag().dag().mat(), f.mat()), 0.0);
    let scale = f.norm() * g.norm();
    let lhs = g.compose(&f)?.dag();
    let rhs = f.dag().compose(&g.dag())?;
    cx.check("contravariance", fro(lhs.mat(), rhs.mat()), 1e-9 * scale);
    cx.check(
        "identity-law",
        exact_residual(f.compose(&f.dom().identity())?.mat(), f.mat()),
        0.0,
    );
    cx.check(
        "identity-dagger",
        exact_residual(f.dom().identity().dag().mat(), f.dom().identity().mat()),
        0.0,
    );

    let dims = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<Obj> {
        let k = rng.random_range(1..=4);
        (0..k).map(|_| fd(rng.random_range(0..=3), field)).collect()
    };
    let (da, db, dc) = (dims(&mut rng), dims(&mut rng), dims(&mut rng));
    let inst = Instance::Fd(field);
    let (ba, bb, bc) = (
        orthonormal_product(&inst, &da)?,
        orthonormal_product(&inst, &db)?,
        orthonormal_product(&inst, &dc)?,
    );
    for bp in [&ba, &bb, &bc] {
        let (pi, sum) = bp.equation_defects();
        cx.check("biproduct-p-i", pi, 0.0);
        cx.check("biproduct-sum", sum, 0.0);
    }
    let grid = |rng: &mut rand_chacha::ChaCha8Rng, from: &[Obj], to: &[Obj]| -> Vec<Vec<Mor>> {
        from.iter()
            .map(|a| to.iter().map(|b| rand_mor(rng, a.dim(), b.dim(), field)).collect())
            .collect()
    };
    let fg = grid(&mut rng, &da, &db);
    let gg = grid(&mut rng, &db, &dc);
    let fa = block_assemble(&fg, &ba, &bb)?;
    let ga = block_assemble(&gg, &bb, &bc)?;
    let h = ga.compose(&fa)?;
    let scale = fa.norm() * ga.norm();
    let mut worst = 0.0f64;
    for j in 0..da.len() {
        for k in 0..dc.len() {
            let block = block_extract(&h, &ba, &bc, j, k)?;
            let mut expect = Mor::zero(&da[j], &dc[k]);
            for l in 0..db.len() {
                expect = expect.add(&gg[l][k].compose(&fg[j][l])?)?;
            }
            worst = worst.max(fro(block.mat(), expect.mat()));
        }
    }
    cx.check("block-composition", worst, 1e-9 * scale);
    let dag_grid = block_assemble(&grid_dagger(&fg), &bb, &ba)?;
    cx.check("block-dagger", exact_residual(dag_grid.mat(), fa.dag().mat()), 0.0);
    let mut extract = 0.0f64;
    for (j, row) in fg.iter().enumerate() {
        for (k, e) in row.iter().enumerate() {
            extract = extract.max(exact_residual(block_extract(&fa, &ba, &bb, j, k)?.mat(), e.mat()));
        }
    }
    cx.check("block-extract", extract, 0.0);
    Ok(())
}

// --------------------------------------------------------------- order-module

fn order_module(cx: &mut CaseCtx, tol: &Tolerance) -> Result<()> {
    let field = cx.field();
    let mut rng = cx.rng();
    let (a, x) = (rng.random_range(1..=6), rng.random_range(1..=6));
    let s: f64 = 10f64.powf(rng.random_range(-2.0..2.0));
    let xm = rand_mor(&mut rng, a, x, field);
    let ym = rand_mor(&mut rng, a, x, field).scale(s);
    let r = rand_mor(&mut rng, a, a, field);
    cx.digest(&[xm.mat(), ym.mat(), r.mat()]);

    let (gx, gy) = (gram_mat(xm.mat()), gram_mat(ym.mat()));
    let scale = gx.norm() + gy.norm();
    let plus = gram_mat(xm.add(&ym)?.mat());
    let minus = gram_mat(xm.sub(&ym)?.mat());
    let para = &(&plus + &minus) - &(&gx + &gy).scale(2.0);
    cx.check("parallelogram", para.norm(), 1e-8 * scale);
    let bound = HermMat::symmetrize(&(&gx + &gy).scale(2.0));
    let margin = order_margin(&HermMat::symmetrize(&plus), &bound, tol)?;
    cx.check("weak-triangle", (-margin).max(0.0), 1e-8 * scale);

    // a = |x|² + c*c + 0.1: invertible and above |x|².
    let c = gaussian(&mut rng, a, a, field);
    let am = HermMat::symmetrize(&(&gx + &gram_mat(&c))).shift(0.1);
    let cs = cauchy_schwarz_gen_check(&xm, &ym, &HermEndo::new(mor(am.as_mat().clone()), tol)?, tol)?;
    cx.check("cauchy-schwarz", (-cs.margin).max(0.0), 1e-8 * (gy.norm() + 1e-300));
    // The tight case a = |x|², when x is injective.
    if x >= a && eigh_hermitian(&HermMat::symmetrize(&gx), tol)?.min() > 1e-3 {
        let tight = cauchy_schwarz_gen_check(&xm, &ym, &gram(&xm), tol)?;
        cx.check(
            "cauchy-schwarz-tight",
            (-tight.margin).max(0.0),
            1e-8 * gy.norm() * (1.0 + hermitian_inverse(&HermMat::symmetrize(&gx), tol)?.norm() * gx.norm()),
        );
    }

    let ip = hom_inner_product(&xm, &ym)?;
    let swapped = hom_inner_product(&ym, &xm)?;
    cx.check(
        "inner-product-hermitian",
        diff(ip.dag().mat(), swapped.mat()),
        1e-12 * xm.norm() * ym.norm(),
    );
    let linear = hom_inner_product(&xm, &ym.compose(&r)?)?;
    cx.check(
        "inner-product-module",
        fro(linear.mat(), ip.compose(&r)?.mat()),
        1e-9 * xm.norm() * ym.norm() * r.norm(),
    );
    Ok(())
}

// --------------------------------------------------------------- sup-calculus

fn sup_calculus(cx: &mut CaseCtx, tol: &Tolerance) -> Result<()> {
    let field = cx.field();
    let mut rng = cx.rng();
    let dim = rng.random_range(1..=6);

    let len = rng.random_range(1..=8);
    let finite = gen_increasing_chain(dim, len, rng.random_range(0.5..4.0), field, cx.seed.derive(1));
    let s = monotone_supremum(&finite, tol)?;
    cx.check(
        "finite-sup-is-last",
        exact_residual(s.value.as_mat(), finite.term(len - 1).expect("term").as_mat()),
        0.0,
    );

    let geo = GeometricChain::random(&mut rng, dim, field, 0.6);
    cx.digest(&[geo.p[0].as_mat(), geo.p[1].as_mat()]);
    let chain = geo.chain();
    let bound_norm = chain.bound().expect("bounded").norm();
    let sup = monotone_supremum(&chain, tol)?;
    let oracle = geo.term(400);
    cx.check(
        "sup-vs-long-materialization",
        sup.value.sub(&oracle).norm(),
        1e-8 * bound_norm,
    );
    cx.check(
        "sup-vs-closed-form",
        sup.value.sub(&geo.limit()).norm(),
        1e-8 * bound_norm,
    );
    cx.check("sup-iterations", sup.index as f64, tol.max_iter as f64);

    let rows = rng.random_range(1..=dim + 2);
    let rank = rng.random_range(0..=rows.min(dim));
    let r = low_rank(&mut rng, rows, dim, rank, field);
    cx.digest(&[&r]);
    let conj = sup_conjugation(&chain, &r, tol)?;
    let rn = r.norm();
    // The conjugated chain stops on its own Cauchy gap, which has an absolute floor.
    cx.check("sup-conjugation", conj.residual, tol.atol + 1e-8 * rn * rn * bound_norm);

    let pd_rank = rng.random_range(0..=dim);
    let a = random_psd(&mut rng, dim, pd_rank, field).scale(10f64.powf(rng.random_range(-2.0..2.0)));
    cx.digest(&[a.as_mat()]);
    let mut worst_hi = 0.0f64;
    let mut worst_lo = 0.0f64;
    for n in 1..=20u32 {
        let defect = approx_inverse_defect(&a, n, tol)?;
        let eig = eigh_hermitian(&defect, tol)?;
        let eps = 0.25f64.powi(n as i32);
        worst_hi = worst_hi.max(eig.max() - eps);
        worst_lo = worst_lo.max(-eig.min());
        if n <= 4 {
            // Independent evaluation of a − a²(a + ε)⁻¹.
            let inv = hermitian_inverse(&a.shift(eps), tol)?;
            let a2 = a.as_mat() * a.as_mat();
            let direct = a.as_mat() - &(&a2 * inv.as_mat());
            cx.check(
                "approx-inverse-direct-form",
                fro(&direct, defect.as_mat()),
                1e-9 * (1.0 + a.norm() * a.norm()),
            );
        }
    }
    cx.check("approx-inverse-upper", worst_hi.max(0.0), 1e-12);
    cx.check("approx-inverse-psd", worst_lo.max(0.0), 1e-12);
    Ok(())
}

// -------------------------------------------------------------------- douglas

fn douglas(cx: &mut CaseCtx, tol: &Tolerance) -> Result<()> {
    let field = cx.field();
    let mut rng = cx.rng();
    let a = rng.random_range(1..=5);
    let x = rng.random_range(1..=6);
    let y = rng.random_range(x..=8);
    let rank = rng.random_range(1..=a.min(x));
    let f = mor(low_rank(&mut rng, x, a, rank, field));
    let u = mor(random_isometry(&mut rng, y, x, field));
    let g = u.compose(&f)?;
    cx.digest(&[f.mat(), u.mat()]);
    let tr = douglas_factor(&f, &g, tol)?;
    cx.check("douglas-factorization", tr.residuals.factorization, 1e-6 * g.norm());
    cx.check("douglas-idempotence", tr.residuals.idempotence, 1e-6);
    cx.check("douglas-iterations", tr.iterations as f64, 60.0);
    cx.check(
        "douglas-h-f-recomputed",
        fro(&(tr.h.mat() * f.mat()), g.mat()),
        1e-6 * g.norm(),
    );
    Ok(())
}

// ----------------------------------------------------------------- codilation

fn codilation_suite(cx: &mut CaseCtx, tol: &Tolerance) -> Result<()> {
    let field = cx.field();
    let strict = cx.index % 4 < 2;
    let mut rng = cx.rng();
    let (x, y) = (rng.random_range(1..=5), rng.random_range(1..=5));
    let f = mor(contraction_matrix(&mut rng, y, x, field, strict));
    cx.digest(&[f.mat()]);

    let c = codilation(&f, tol)?;
    let r = c.residuals(&f);
    cx.check("t1-isometry", r.t1_isometry, 1e-9);
    cx.check("t2-isometry", r.t2_isometry, 1e-9);
    cx.check("t2-star-t1", r.factorization, 1e-9 * f.norm().max(1.0));

    let cd = codilator(&f, tol)?;
    let rc = cd.codilation.residuals(&f);
    cx.check("codilator-isometries", rc.t1_isometry.max(rc.t2_isometry), 1e-9);
    cx.check("codilator-factorization", rc.factorization, 1e-9 * f.norm().max(1.0));
    let expected = if strict {
        UniversalityStatus::Universal
    } else {
        UniversalityStatus::UniversalityUnverified
    };
    cx.check_flag("codilator-status", cd.status == expected);
    if !strict {
        return Ok(());
    }
    cx.check_flag(
        "codilator-jointly-epic",
        cd.codilation.joint_rank(tol)? == cd.codilation.apex.dim(),
    );

    // Sampled codilations (T', t₁' = W f + K U √(1 − f*f), t₂' = W) with W, K
    // isometries of orthogonal ranges and U unitary.
    let defect = HermMat::symmetrize(&(&Mat::identity(x, field) - &gram_mat(f.mat())));
    let root = positive_sqrt(&defect, tol)?;
    let mut worst_res = 0.0f64;
    let mut worst_iso = 0.0f64;
    for _ in 0..100 {
        let extra = rng.random_range(0..=2);
        let n = x + y + extra;
        let q = random_isometry(&mut rng, n, x + y, field);
        let w = q.submatrix(0, n, 0, y);
        let k = q.submatrix(0, n, y, y + x);
        let u = random_isometry(&mut rng, x, x, field);
        let t1 = &(&w * f.mat()) + &(&(&k * &u) * root.as_mat());
        let other = Codilation {
            apex: fd(n, field),
            t1: Mor::new(fd(x, field), fd(n, field), t1)?,
            t2: Mor::new(fd(y, field), fd(n, field), w)?,
            jointly_epic: extra == 0,
        };
        let med = codilator_mediator(&cd.codilation, &other, tol)?;
        worst_res = worst_res.max(med.residual);
        worst_iso = worst_iso.max(med.isometry_defect);
    }
    cx.check("universality-mediator", worst_res, 1e-8);
    cx.check("universality-isometry", worst_iso, 1e-8);
    Ok(())
}

// ----------------------------------------------------------------- order-sums

/// An orthogonal family `x_j = U_j C_j` from disjoint column blocks of a unitary,
/// with the unused columns returned for complement checks.
fn orthogonal_family(rng: &mut impl Rng, field: FieldTag) -> (usize, Vec<Mat>, Mat) {
    let d = rng.random_range(1..=10);
    let a = rng.random_range(1..=4);
    let u = random_isometry(rng, d, d, field);
    let k = rng.random_range(0..=d);
    let mut cuts: Vec<usize> = (0..k).map(|_| rng.random_range(0..=d)).collect();
    cuts.sort_unstable();
    let used = cuts.last().copied().unwrap_or(0).max(rng.random_range(0..=d));
    let mut terms = Vec::with_capacity(k);
    let mut start = 0;
    for &c in &cuts {
        let block = u.submatrix(0, d, start, c);
        terms.push(&block * &gaussian(rng, c - start, a, field));
        start = c;
    }
    (a, terms, u.submatrix(0, d, used, d))
}

fn subset_sum(terms: &[Mat], keep: &[bool], rows: usize, cols: usize, field: FieldTag) -> Mat {
    let picked: Vec<Mat> = terms
        .iter()
        .zip(keep)
        .filter(|(_, &k)| k)
        .map(|(t, _)| t.clone())
        .collect();
    plain_sum(&picked, rows, cols, field)
}

fn geometric_family(field: FieldTag) -> OrthFamily {
    OrthFamily::lazy(
        field,
        1,
        Arc::new(move |n| {
            Mat::from_fn(n + 1, 1, field, |i, _| {
                C64::new(if i == n { 0.5f64.powi(n as i32 + 1) } else { 0.0 }, 0.0)
            })
        }),
    )
    .with_bound(HermMat::identity(1, field).scale(1.0 / 3.0))
    .with_tail(TailCertificate::geometric(0.25, 0.25))
}

fn order_sums(cx: &mut CaseCtx, tol: &Tolerance) -> Result<()> {
    let field = cx.field();
    let mut rng = cx.rng();
    let (a, terms, rest) = orthogonal_family(&mut rng, field);
    let d = rest.rows();
    let digest: Vec<&Mat> = terms.iter().collect();
    cx.digest(&digest);
    let fam = OrthFamily::finite(field, a, terms.clone())?;
    let s = order_sum(&fam, 0.0, tol)?;
    let scale = terms.iter().map(Mat::norm).sum::<f64>().max(s.sum.norm());

    let mut shuffled = terms.clone();
    shuffled.shuffle(&mut rng);
    let s2 = order_sum(&OrthFamily::finite(field, a, shuffled)?, 0.0, tol)?;
    cx.check("uniqueness", fro(&s.sum, &s2.sum), 1e-9 * scale);
    cx.check("defining-inner", s.certificate.inner_residual, 1e-9 * scale * scale);
    cx.check("defining-gram", s.certificate.gram_residual, 1e-9 * scale * scale);

    if !terms.is_empty() && rest.cols() > 0 {
        let ycols = rng.random_range(1..=3);
        let yv = &rest * &gaussian(&mut rng, rest.cols(), ycols, field);
        cx.check(
            "complement-closure",
            (&yv.adjoint() * &s.sum).norm(),
            1e-9 * yv.norm() * scale,
        );
    }

    let k = terms.len();
    let sset: Vec<bool> = (0..k).map(|_| rng.random_bool(0.5)).collect();
    let tset: Vec<bool> = (0..k).map(|_| rng.random_bool(0.5)).collect();
    let union: Vec<bool> = sset.iter().zip(&tset).map(|(a, b)| *a || *b).collect();
    let inter: Vec<bool> = sset.iter().zip(&tset).map(|(a, b)| *a && *b).collect();
    let sum_of = |keep: &[bool]| subset_sum(&terms, keep, d, a, field);
    let ie = &(&sum_of(&sset) + &sum_of(&tset)) - &sum_of(&inter);
    cx.check("inclusion-exclusion", fro(&sum_of(&union), &ie), 1e-9 * scale);

    let r = gaussian(&mut rng, a, a, field);
    let scaled: Vec<Mat> = terms.iter().map(|t| t * &r).collect();
    let sr = order_sum(&OrthFamily::finite(field, a, scaled)?, 0.0, tol)?;
    cx.check(
        "scalar-compatibility",
        fro(&sr.sum, &(&s.sum * &r)),
        1e-9 * scale * r.norm(),
    );

    let defects = partial_sum_defects(&s.sum, &terms);
    let nonincreasing = defects.windows(2).map(|w| (w[1] - w[0]).max(0.0)).fold(0.0, f64::max);
    cx.check("partial-sum-monotone", nonincreasing, 1e-9 * scale * scale);
    cx.check(
        "partial-sum-final",
        *defects.last().expect("nonempty"),
        1e-9 * scale * scale,
    );

    // Expansion in a full orthonormal basis reconstructs any vector.
    let basis = random_isometry(&mut rng, d, d, field);
    let xv = gaussian(&mut rng, d, 1, field);
    let coords = &basis.adjoint() * &xv;
    let recon = plain_sum(
        &(0..d)
            .map(|j| &basis.column(j) * &coords.submatrix(j, j + 1, 0, 1))
            .collect::<Vec<_>>(),
        d,
        1,
        field,
    );
    cx.check("basis-reconstruction", fro(&recon, &xv), 1e-9 * xv.norm());

    if cx.index < 2 {
        let g = order_sum(&geometric_family(field), 1e-12, tol)?;
        let gram = (&g.sum.adjoint() * &g.sum).get(0, 0).re;
        cx.check("geometric-gram-one-third", (gram - 1.0 / 3.0).abs(), 1e-9);
        cx.check_flag("geometric-is-l2", is_l2_family(&geometric_family(field), tol)?.is_l2);
    }
    Ok(())
}

// ---------------------------------------------------------------- l2-products

fn l2_products(cx: &mut CaseCtx, tol: &Tolerance) -> Result<()> {
    let field = cx.field();
    let mut rng = cx.rng();
    let inst = Instance::Fd(field);
    let k = rng.random_range(1..=5);
    let comps: Vec<Obj> = (0..k).map(|_| fd(rng.random_range(0..=4), field)).collect();
    let p = l2_product(&inst, &L2Components::Finite(comps.clone()))?;
    cx.check("l2-biproduct-r-r-star", p.equation_defects.0, 0.0);
    cx.check("l2-biproduct-sum", p.equation_defects.1, 0.0);

    let ydim = rng.random_range(0..=4);
    let yobj = fd(ydim, field);
    let span: Vec<Mor> = comps.iter().map(|c| rand_mor(&mut rng, ydim, c.dim(), field)).collect();
    let digest: Vec<&Mat> = span.iter().map(Mor::mat).collect();
    cx.digest(&digest);
    let g = l2_mediating(&p.biproduct, &yobj, &span, tol)?;
    let scale: f64 = span.iter().map(|s| s.norm() * s.norm()).sum::<f64>();
    let mut proj = 0.0f64;
    for (j, gj) in span.iter().enumerate() {
        proj = proj.max(fro(p.biproduct.projections[j].compose(&g)?.mat(), gj.mat()));
    }
    cx.check("mediating-projections", proj, 1e-9 * scale.sqrt());
    let total = span
        .iter()
        .fold(Mat::zeros(ydim, ydim, field), |acc, s| &acc + &gram_mat(s.mat()));
    cx.check("mediating-gram", fro(&gram_mat(g.mat()), &total), 1e-9 * scale);

    // Span-cone correspondence on a sampled subset F.
    let keep: Vec<bool> = (0..k).map(|_| rng.random_bool(0.5)).collect();
    let mut gf = Mor::zero(&yobj, &p.biproduct.apex);
    let mut partial = Mat::zeros(ydim, ydim, field);
    for j in (0..k).filter(|&j| keep[j]) {
        gf = gf.add(&p.biproduct.injections[j].compose(&span[j])?)?;
        partial = &partial + &gram_mat(span[j].mat());
    }
    cx.check("span-cone-gram", fro(&gram_mat(gf.mat()), &partial), 1e-9 * scale);

    // Binary case.
    let (c1, c2) = (fd(rng.random_range(0..=3), field), fd(rng.random_range(0..=3), field));
    let bin = l2_product(&inst, &L2Components::Finite(vec![c1.clone(), c2.clone()]))?.biproduct;
    let g1 = rand_mor(&mut rng, ydim, c1.dim(), field);
    let g2 = rand_mor(&mut rng, ydim, c2.dim(), field);
    let gb = l2_mediating(&bin, &yobj, &[g1.clone(), g2.clone()], tol)?;
    let direct = bin.injections[0].compose(&g1)?.add(&bin.injections[1].compose(&g2)?)?;
    cx.check(
        "binary-bit-consistent",
        if gb.mat().bit_eq(direct.mat()) {
            0.0
        } else {
            diff(gb.mat(), direct.mat()).max(f64::MIN_POSITIVE)
        },
        0.0,
    );

    // Epi-iso factorization of a low-rank map.
    let (rows, cols) = (rng.random_range(1..=6), rng.random_range(1..=6));
    let rank = rng.random_range(0..=rows.min(cols));
    let xm = mor(low_rank(&mut rng, rows, cols, rank, field));
    let (ye, mi) = epi_iso_factor(&xm, tol)?;
    cx.check(
        "epi-iso-residual",
        fro(mi.compose(&ye)?.mat(), xm.mat()),
        1e-10 * xm.norm().max(1.0),
    );
    cx.check(
        "epi-iso-isometry",
        iso_defect(mi.mat()),
        1e-12 * (1.0 + mi.dom().dim() as f64),
    );
    cx.check_flag("epi-iso-rank", mi.dom().dim() == rank);

    // Gluing orthogonal isometries.
    let legs = rng.random_range(1..=3);
    let sizes: Vec<usize> = (0..legs).map(|_| rng.random_range(0..=2)).collect();
    let total_dim: usize = sizes.iter().sum();
    let target = total_dim + rng.random_range(0..=2);
    let q = random_isometry(&mut rng, target, total_dim, field);
    let mut off = 0;
    let mut cospan = Vec::new();
    for &s in &sizes {
        cospan.push(Mor::new(
            fd(s, field),
            fd(target, field),
            q.submatrix(0, target, off, off + s),
        )?);
        off += s;
    }
    let objs: Vec<Obj> = sizes.iter().map(|&s| fd(s, field)).collect();
    let cop = orthonormal_product(&inst, &objs)?;
    let m = glue_isometries(&cospan, &cop, tol)?;
    cx.check("glue-isometry", iso_defect(m.mat()), 1e-12 * (1.0 + total_dim as f64));
    let mut legs_res = 0.0f64;
    for (j, leg) in cospan.iter().enumerate() {
        legs_res = legs_res.max(fro(m.compose(&cop.injections[j])?.mat(), leg.mat()));
    }
    cx.check("glue-legs", legs_res, 1e-12 * (1.0 + total_dim as f64));

    if cx.index < 2 {
        let tr = l2_product(
            &inst,
            &L2Components::Truncated {
                generator: Arc::new(move |_| Obj::fd(1, field)),
                n: 20,
                eps: 1e-9,
            },
        )?;
        cx.check("truncated-block-identity", tr.equation_defects.1, 0.0);
    }
    Ok(())
}

// ------------------------------------------------------------------ l2-limits

fn l2_limits(cx: &mut CaseCtx, tol: &Tolerance) -> Result<()> {
    let field = cx.field();
    let mut rng = cx.rng();
    let levels = rng.random_range(1..=5);
    let dims: Vec<usize> = (0..=levels).map(|_| rng.random_range(1..=5)).collect();
    let maps: Vec<Mor> = (0..levels)
        .map(|j| {
            let strict = rng.random_bool(0.5);
            mor(contraction_matrix(&mut rng, dims[j], dims[j + 1], field, strict))
        })
        .collect();
    let adim = rng.random_range(1..=3);
    let top = rand_mor(&mut rng, adim, dims[levels], field);
    let mut cone = vec![top.clone()];
    for f in maps.iter().rev() {
        let next = f.compose(cone.last().expect("nonempty"))?;
        cone.push(next);
    }
    cone.reverse();
    let digest: Vec<&Mat> = maps.iter().map(Mor::mat).chain(std::iter::once(top.mat())).collect();
    cx.digest(&digest);
    let lim = l2_limit_truncated(&CodirectedCone::Finite { maps, cone }, tol)?;
    cx.check(
        "finite-limit-top-exact",
        exact_residual(lim.truncated_mediating.mat(), top.mat()),
        0.0,
    );
    cx.check(
        "finite-limit-gram-exact",
        exact_residual(lim.mediating_gram.as_mor().mat(), gram(&top).as_mor().mat()),
        0.0,
    );

    if cx.index < 2 {
        let t = l2_limit_truncated(&truncation_chain_cone(field), tol)?;
        let g = t.mediating_gram.as_mor().mat().get(0, 0).re;
        cx.check("truncation-chain-one-third", (g - 1.0 / 3.0).abs(), 1e-9);
        let mut worst = 0.0f64;
        let mut prev = 0.0;
        let mut monotone = true;
        for n in 1..=30 {
            let w = archimedean_witness(n, field);
            let g = gram(&w).as_mor().mat().get(0, 0).re;
            worst = worst.max((g - (1.0 - 0.25f64.powi(n as i32)) / 3.0).abs());
            monotone &= g >= prev;
            prev = g;
            cx.check_flag(
                "witness-strict-contraction",
                classify_morphism(&w, tol)?.strict_contraction,
            );
        }
        cx.check("witness-gram", worst, 1e-12);
        cx.check_flag("witness-gram-monotone", monotone);
    }
    Ok(())
}

// ------------------------------------------------------------------- colimits

fn isometry_chain(rng: &mut impl Rng, field: FieldTag) -> (Obj, Vec<Mor>) {
    let len = rng.random_range(0..=4);
    let mut dims = vec![rng.random_range(0..=3)];
    for _ in 0..len {
        let last = *dims.last().expect("nonempty");
        dims.push(last + rng.random_range(0..=2));
    }
    let chain = (0..len)
        .map(|j| mor(random_isometry(rng, dims[j + 1], dims[j], field)))
        .collect();
    (fd(dims[0], field), chain)
}

fn colimits(cx: &mut CaseCtx, tol: &Tolerance) -> Result<()> {
    let field = cx.field();
    let mut rng = cx.rng();
    let (base, chain) = isometry_chain(&mut rng, field);
    let digest: Vec<&Mat> = chain.iter().map(Mor::mat).collect();
    cx.digest(&digest);
    let col = finite_directed_colimit_isometries(&base, &chain, tol)?;
    let leg_iso = col.legs.iter().map(|l| iso_defect(l.mat())).fold(0.0, f64::max);
    cx.check("legs-isometric", leg_iso, 1e-9);
    cx.check("legs-cocone", cocone_defect(&col, &col.legs)?, 1e-9);

    let top = col.apex.dim();
    let mut worst_res = 0.0f64;
    let mut worst_iso = 0.0f64;
    for _ in 0..100 {
        let z = top + rng.random_range(0..=2);
        let v = mor(random_isometry(&mut rng, z, top, field));
        let cocone: Vec<Mor> = col.legs.iter().map(|l| v.compose(l)).collect::<Result<_>>()?;
        let med = colimit_mediating(&col, &cocone, tol)?;
        worst_res = worst_res.max(med.residual).max(fro(med.m.mat(), v.mat()));
        worst_iso = worst_iso.max(med.isometry_defect);
    }
    cx.check("competitor-mediating", worst_res, 1e-9);
    cx.check("competitor-isometry", worst_iso, 1e-9);

    // Contraction cocones factor through the colimit.
    let w = rng.random_range(1..=4);
    let strict = rng.random_bool(0.5);
    let a = mor(contraction_matrix(&mut rng, w, top, field, strict));
    let cone: Vec<Mor> = col.legs.iter().map(|l| a.compose(l)).collect::<Result<_>>()?;
    let (am, wit) = mediating_via_codilator(&col, &cone, tol)?;
    cx.check("codilator-mediating", fro(am.mat(), a.mat()), 1e-9);
    let wr = wit.residuals(&am);
    cx.check(
        "codilator-witness",
        wr.t1_isometry.max(wr.t2_isometry).max(wr.factorization),
        1e-9,
    );

    // Coisometric naturality squares: X_j = Y_j ⊕ Z_j with f_j = g_j ⊕ h_j and
    // c_j the projection, all conjugated by random unitaries.
    let (ybase, ychain) = isometry_chain(&mut rng, field);
    let ny = ychain.len();
    let mut zdims = vec![rng.random_range(0..=2)];
    for _ in 0..ny {
        let last = *zdims.last().expect("nonempty");
        zdims.push(last + rng.random_range(0..=1));
    }
    let ydims: Vec<usize> = std::iter::once(ybase.dim())
        .chain(ychain.iter().map(|g| g.cod().dim()))
        .collect();
    let xdims: Vec<usize> = ydims.iter().zip(&zdims).map(|(a, b)| a + b).collect();
    let ux: Vec<Mat> = xdims.iter().map(|&d| random_isometry(&mut rng, d, d, field)).collect();
    let uy: Vec<Mat> = ydims.iter().map(|&d| random_isometry(&mut rng, d, d, field)).collect();
    let mut xchain = Vec::with_capacity(ny);
    let mut gchain = Vec::with_capacity(ny);
    for j in 0..ny {
        let h = random_isometry(&mut rng, zdims[j + 1], zdims[j], field);
        let mut blk = Mat::zeros(xdims[j + 1], xdims[j], field);
        blk.set_block(0, 0, ychain[j].mat());
        blk.set_block(ydims[j + 1], ydims[j], &h);
        xchain.push(mor(&(&ux[j + 1] * &blk) * &ux[j].adjoint()));
        gchain.push(mor(&(&uy[j + 1] * ychain[j].mat()) * &uy[j].adjoint()));
    }
    let squares: Vec<Mor> = (0..=ny)
        .map(|j| {
            let proj = Mat::identity(xdims[j], field).submatrix(0, ydims[j], 0, xdims[j]);
            mor(&(&uy[j] * &proj) * &ux[j].adjoint())
        })
        .collect();
    let colx = finite_directed_colimit_isometries(&fd(xdims[0], field), &xchain, tol)?;
    let coly = finite_directed_colimit_isometries(&fd(ydims[0], field), &gchain, tol)?;
    let mut nat = 0.0f64;
    for j in 0..ny {
        nat = nat.max(fro(
            squares[j + 1].compose(&xchain[j])?.mat(),
            gchain[j].compose(&squares[j])?.mat(),
        ));
    }
    cx.check("naturality-squares", nat, 1e-9);
    let (_, coiso) = induced_colimit_map(&colx, &coly, &squares, tol)?;
    cx.check("coisometry-preservation", coiso, 1e-8);
    Ok(())
}

// ----------------------------------------------------------------------- urep

fn random_group(rng: &mut impl Rng) -> Arc<GroupTable> {
    let n = rng.random_range(2..=5);
    Arc::new(if rng.random_bool(0.5) {
        GroupTable::cyclic(n)
    } else {
        GroupTable::dihedral(n.max(3))
    })
}

fn urep_suite(cx: &mut CaseCtx, tol: &Tolerance) -> Result<()> {
    let field = cx.field();
    let mut rng = cx.rng();
    let group = random_group(&mut rng);

    // Permutation representations: regular, trivial and their sums.
    let reg = Rep::regular(group.clone(), field);
    let triv = Rep::trivial(group.clone(), field, rng.random_range(1..=2));
    let sum = Rep::direct_sum(group.clone(), field, &[&reg, &triv]);
    for r in [&reg, &triv, &sum] {
        let rep = validate_rep(r, tol);
        cx.check("permutation-rep-unitarity", rep.unitarity_residual, 0.0);
        cx.check("permutation-rep-homomorphism", rep.homomorphism_residual, 0.0);
    }
    let end_dim = intertwiner_space(&reg, &reg, tol)?.len();
    cx.check_flag("regular-endomorphism-dimension", end_dim == group.order());

    // A chain ρ₀ ⊂ ρ₀ ⊕ σ₁ ⊂ … of reps conjugated by random unitaries, with
    // the matching isometric intertwiners.
    let pieces = [reg.clone(), triv.clone(), reg.clone()];
    let len = rng.random_range(0..=2);
    let mut reps: Vec<Rep> = Vec::new();
    let mut unitaries: Vec<Mat> = Vec::new();
    for j in 0..=len {
        let parts: Vec<&Rep> = pieces[..=j].iter().collect();
        let raw = Rep::direct_sum(group.clone(), field, &parts);
        let u = random_isometry(&mut rng, raw.dim(), raw.dim(), field);
        reps.push(raw.conjugate(&u)?);
        unitaries.push(u);
    }
    let objs: Vec<Arc<Rep>> = reps.into_iter().map(Arc::new).collect();
    let mut chain = Vec::with_capacity(len);
    for j in 0..len {
        let (dl, dh) = (objs[j].dim(), objs[j + 1].dim());
        let embed = Mat::identity(dh, field).submatrix(0, dh, 0, dl);
        let m = &(&unitaries[j + 1] * &embed) * &unitaries[j].adjoint();
        chain.push(intertwiner(&objs[j], &objs[j + 1], m, tol)?);
    }
    let digest: Vec<&Mat> = unitaries.iter().collect();
    cx.digest(&digest);
    let generic = rep_directed_colimit(&objs[0], &chain, tol)?;
    let under: Vec<Mor> = chain.iter().map(Mor::underlying).collect();
    let componentwise = finite_directed_colimit_isometries(&Obj::fd(objs[0].dim(), field), &under, tol)?;
    let mut entry = 0.0f64;
    for (a, b) in generic.legs.iter().zip(&componentwise.legs) {
        entry = entry.max(exact_residual(a.mat(), b.mat()));
    }
    cx.check("componentwise-colimit", entry, 0.0);
    cx.check_flag(
        "colimit-apex-carries-rep",
        generic.apex.as_rep().map(|r| r.as_ref()) == Some(objs[len].as_ref()),
    );
    for leg in &generic.legs {
        if let (Some(d), Some(c)) = (leg.dom().as_rep(), leg.cod().as_rep()) {
            cx.check(
                "colimit-legs-intertwine",
                intertwining_residual(d, c, leg.mat()),
                1e-9 * (1.0 + leg.norm()),
            );
        }
    }

    // Schur on the characters of C₃.
    let c3 = Arc::new(GroupTable::cyclic(3));
    let j = rng.random_range(0..3);
    let k = rng.random_range(0..3);
    let space = intertwiner_space(
        &Rep::cyclic_character(c3.clone(), j),
        &Rep::cyclic_character(c3, k),
        tol,
    )?;
    cx.check_flag("schur-c3", space.len() == usize::from(j == k));

    // The kernel of a random intertwiner carries a subrepresentation.
    let basis = intertwiner_space(&sum, &reg, tol)?;
    let mut t = Mat::zeros(reg.dim(), sum.dim(), field);
    for b in &basis {
        t = &t + &b.scale(rng.random_range(-1.0..1.0));
    }
    let (so, ro) = (Arc::new(sum), Arc::new(reg));
    let tm = intertwiner(&so, &ro, t, tol)?;
    let ker = rep_kernel(&tm, tol)?;
    let kr = ker.dom().as_rep().expect("rep kernel");
    let report = validate_rep(kr, tol);
    cx.check(
        "kernel-rep-valid",
        report.unitarity_residual.max(report.homomorphism_residual),
        1e-9,
    );
    cx.check("kernel-annihilated", tm.compose(&ker)?.norm(), 1e-9 * (1.0 + tm.norm()));
    Ok(())
}

fn nhilb_demo(cx: &mut CaseCtx, _tol: &Tolerance) -> Result<()> {
    let n = cx.index + 1;
    let row = *nhilb_obstruction_demo(n)?.last().expect("nonempty");
    cx.check_flag("row-index", row.n == n as u64);
    cx.check("norm-equals-n", (row.norm as f64 - n as f64).abs(), 0.0);
    Ok(())
}
