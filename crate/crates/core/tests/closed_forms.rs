//! Values with a closed form, checked against the library.

use std::sync::Arc;

use hilbstar::completion::{
    approx_inverse_defect, archimedean_witness, douglas_factor, l2_limit_truncated, l2_mediating, l2_product,
    monotone_infimum, monotone_supremum, order_sum, truncation_chain_cone, CodirectedCone, Direction, L2Components,
    MonotoneChain, MorFn, OrthFamily,
};
use hilbstar::harness::gen::{gaussian, random_isometry, random_psd, Seed};
use hilbstar::linalg::{eigh_hermitian, loewner_leq, FieldTag, HermMat, Mat, Tolerance, C64};
use hilbstar::star::{gram, Instance, Mor, Obj};
use hilbstar::urep::nhilb_obstruction_demo;

fn tol() -> Tolerance {
    Tolerance::default()
}

#[test]
fn zero_below_identity() {
    let z = HermMat::zeros(2, FieldTag::Real);
    let i = HermMat::identity(2, FieldTag::Real);
    assert!(loewner_leq(&z, &i, &tol()).unwrap());
    assert!(!loewner_leq(&i, &z, &tol()).unwrap());
}

#[test]
fn nhilb_norms_grow_linearly() {
    let rows = nhilb_obstruction_demo(7).unwrap();
    assert_eq!((rows[0].n, rows[0].norm), (1, 1));
    assert_eq!((rows[6].n, rows[6].norm), (7, 7));
}

#[test]
fn quarter_powers_below_identity_reach_identity() {
    let chain = MonotoneChain::lazy(
        2,
        FieldTag::Complex,
        Arc::new(|n| HermMat::identity(2, FieldTag::Complex).scale(1.0 - 0.25f64.powi(n as i32))),
        Direction::Increasing,
    )
    .with_bound(HermMat::identity(2, FieldTag::Complex))
    .unwrap();
    let s = monotone_supremum(&chain, &tol()).unwrap();
    // The iteration stops once consecutive terms are within the tolerance threshold.
    let id = HermMat::identity(2, FieldTag::Complex);
    assert!(s.value.sub(&id).norm() <= tol().threshold(id.norm()));

    let down = MonotoneChain::lazy(
        1,
        FieldTag::Real,
        Arc::new(|n| HermMat::identity(1, FieldTag::Real).scale(0.25f64.powi(n as i32))),
        Direction::Decreasing,
    )
    .with_bound(HermMat::zeros(1, FieldTag::Real))
    .unwrap();
    assert!(monotone_infimum(&down, &tol()).unwrap().value.norm() <= tol().threshold(1.0));
}

#[test]
fn approximate_inverse_defect_bound() {
    for k in 0..20u64 {
        let field = if k % 2 == 0 { FieldTag::Real } else { FieldTag::Complex };
        let a = random_psd(&mut Seed(k).rng(), 4, 3, field);
        let d = approx_inverse_defect(&a, 10, &tol()).unwrap();
        let e = eigh_hermitian(&d, &tol()).unwrap();
        assert!(e.max() <= 0.25f64.powi(10) + 1e-12, "{}", e.max());
        assert!(e.min() >= -1e-12);
    }
}

#[test]
fn douglas_with_isometric_twist() {
    for k in 0..10u64 {
        let field = if k % 2 == 0 { FieldTag::Real } else { FieldTag::Complex };
        let mut rng = Seed(100 + k).rng();
        let f = gaussian(&mut rng, 3, 2, field);
        let u = random_isometry(&mut rng, 5, 3, field);
        let g = &u * &f;
        let fm = Mor::new(Obj::fd(2, field), Obj::fd(3, field), f).unwrap();
        let gm = Mor::new(Obj::fd(2, field), Obj::fd(5, field), g.clone()).unwrap();
        let t = douglas_factor(&fm, &gm, &tol()).unwrap();
        assert!(t.residuals.factorization <= 1e-6 * g.norm());
        assert!(t.residuals.idempotence <= 1e-6);
        assert!(t.iterations <= 60);
    }
}

#[test]
fn orthogonal_columns_sum_to_their_stack() {
    let (c1, c2) = (C64::new(0.3, -1.0), C64::new(2.0, 0.5));
    let x1 = Mat::from_complex(2, 1, vec![c1, C64::new(0.0, 0.0)]).unwrap();
    let x2 = Mat::from_complex(2, 1, vec![C64::new(0.0, 0.0), c2]).unwrap();
    let fam = OrthFamily::finite(FieldTag::Complex, 1, vec![x1, x2]).unwrap();
    let s = order_sum(&fam, 0.0, &tol()).unwrap();
    assert_eq!(s.sum.get(0, 0), c1);
    assert_eq!(s.sum.get(1, 0), c2);
    let g = (&s.sum.adjoint() * &s.sum).get(0, 0).re;
    assert!((g - (c1.norm_sqr() + c2.norm_sqr())).abs() <= 1e-14);
}

#[test]
fn scalar_l2_product_is_exact() {
    let one = Obj::fd(1, FieldTag::Complex);
    let p = l2_product(
        &Instance::Fd(FieldTag::Complex),
        &L2Components::Finite(vec![one.clone(), one.clone()]),
    )
    .unwrap();
    let bp = &p.biproduct;
    for j in 0..2 {
        for k in 0..2 {
            let rr = bp.projections[j].compose(&bp.projections[k].dag()).unwrap();
            let expect = if j == k { 1.0 } else { 0.0 };
            assert_eq!(rr.mat().get(0, 0), C64::new(expect, 0.0));
        }
    }
}

#[test]
fn binary_mediator_is_sum_of_injected_legs() {
    let field = FieldTag::Real;
    let (a, x1, x2) = (Obj::fd(2, field), Obj::fd(1, field), Obj::fd(3, field));
    let p = l2_product(
        &Instance::Fd(field),
        &L2Components::Finite(vec![x1.clone(), x2.clone()]),
    )
    .unwrap();
    let mut rng = Seed(5).rng();
    let g1 = Mor::new(a.clone(), x1, gaussian(&mut rng, 1, 2, field)).unwrap();
    let g2 = Mor::new(a.clone(), x2, gaussian(&mut rng, 3, 2, field)).unwrap();
    let g = l2_mediating(&p.biproduct, &a, &[g1.clone(), g2.clone()], &tol()).unwrap();
    let i = &p.biproduct.injections;
    let direct = i[0].compose(&g1).unwrap().add(&i[1].compose(&g2).unwrap()).unwrap();
    assert!(g.mat().bit_eq(direct.mat()));
}

#[test]
fn sequence_cone_gram_is_sum_of_squares() {
    // x_n = 3⁻ⁿ, so Σ |x_n|² = 1/8.
    let field = FieldTag::Real;
    let map: MorFn = Arc::new(move |j| {
        let m = Mat::from_fn(j + 1, j + 2, field, |r, c| {
            C64::new(if r == c { 1.0 } else { 0.0 }, 0.0)
        });
        Mor::new(Obj::fd(j + 2, field), Obj::fd(j + 1, field), m).unwrap()
    });
    let cone: MorFn = Arc::new(move |j| {
        let m = Mat::from_fn(j + 1, 1, field, |r, _| C64::new(3f64.powi(-(r as i32) - 1), 0.0));
        Mor::new(Obj::fd(1, field), Obj::fd(j + 1, field), m).unwrap()
    });
    let diagram = CodirectedCone::Lazy {
        apex: Obj::fd(1, field),
        map,
        cone,
        bound: Some(HermMat::identity(1, field).scale(0.125)),
    };
    let lim = l2_limit_truncated(&diagram, &tol()).unwrap();
    let g = lim.mediating_gram.to_herm_mat().as_mat().get(0, 0).re;
    assert!((g - 0.125).abs() <= 1e-9 + lim.epsilon, "{g}");
}

#[test]
fn truncation_chain_reaches_one_third() {
    for field in [FieldTag::Real, FieldTag::Complex] {
        let lim = l2_limit_truncated(&truncation_chain_cone(field), &tol()).unwrap();
        let g = lim.mediating_gram.to_herm_mat().as_mat().get(0, 0).re;
        assert!((g - 1.0 / 3.0).abs() <= 1e-9, "{g}");
    }
}

#[test]
fn witness_grams_follow_closed_form() {
    let w1 = gram(&archimedean_witness(1, FieldTag::Real))
        .to_herm_mat()
        .as_mat()
        .get(0, 0)
        .re;
    assert!((w1 - 0.25).abs() <= 1e-15);
    let mut prev = 0.0;
    for n in 1..=30 {
        let g = gram(&archimedean_witness(n, FieldTag::Real))
            .to_herm_mat()
            .as_mat()
            .get(0, 0)
            .re;
        assert!((g - (1.0 - 0.25f64.powi(n as i32)) / 3.0).abs() <= 1e-12);
        assert!(g >= prev);
        prev = g;
    }
}
