use proptest::prelude::*;

use hilbstar::completion::{codilation, order_sum, OrthFamily};
use hilbstar::harness::gen::{contraction_matrix, gaussian, low_rank, random_isometry, Seed};
use hilbstar::json::MorphismJson;
use hilbstar::linalg::{loewner_leq, pinv, range_null_bases, svd, FieldTag, HermMat, Mat, Tolerance, C64};
use hilbstar::star::{Mor, Obj};

fn tol() -> Tolerance {
    Tolerance::default()
}

fn field(complex: bool) -> FieldTag {
    if complex {
        FieldTag::Complex
    } else {
        FieldTag::Real
    }
}

fn fro(a: &Mat, b: &Mat) -> f64 {
    (a - b).norm()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dagger_is_an_involutive_contravariant_functor(m in 0usize..6, n in 0usize..6, k in 0usize..6, seed: u64, c: bool) {
        let fl = field(c);
        let mut rng = Seed(seed).rng();
        let f = Mor::new(Obj::fd(n, fl), Obj::fd(m, fl), gaussian(&mut rng, m, n, fl)).unwrap();
        let g = Mor::new(Obj::fd(k, fl), Obj::fd(n, fl), gaussian(&mut rng, n, k, fl)).unwrap();
        prop_assert!(f.dag().dag().mat().exact_eq(f.mat()));
        let lhs = f.compose(&g).unwrap().dag();
        let rhs = g.dag().compose(&f.dag()).unwrap();
        prop_assert!(fro(lhs.mat(), rhs.mat()) <= 1e-12 * (1.0 + f.mat().norm() * g.mat().norm()));
    }

    #[test]
    fn adding_a_square_moves_up_in_loewner_order(n in 1usize..6, r in 0usize..6, seed: u64, c: bool) {
        let fl = field(c);
        let mut rng = Seed(seed).rng();
        let a = HermMat::symmetrize(&gaussian(&mut rng, n, n, fl));
        let h = gaussian(&mut rng, r, n, fl);
        let b = a.add(&HermMat::symmetrize(&(&h.adjoint() * &h)));
        prop_assert!(loewner_leq(&a, &b, &tol()).unwrap());
    }

    #[test]
    fn svd_reconstructs_rank_deficient_matrices(m in 1usize..9, n in 1usize..9, seed: u64, c: bool) {
        let fl = field(c);
        let mut rng = Seed(seed).rng();
        let rank = (seed as usize) % (m.min(n) + 1);
        let x = low_rank(&mut rng, m, n, rank, fl);
        let d = svd(&x, &tol()).unwrap();
        let k = d.singular_values.len();
        let vk = d.v.submatrix(0, n, 0, k);
        let recon = &(&d.u * &Mat::diag_real(&d.singular_values, fl)) * &vk.adjoint();
        prop_assert!(fro(&recon, &x) <= 1e-12 * (1.0 + x.norm()));
        prop_assert!(fro(&(&d.v.adjoint() * &d.v), &Mat::identity(n, fl)) <= 1e-12);
        prop_assert!(fro(&(&d.u.adjoint() * &d.u), &Mat::identity(k, fl)) <= 1e-12);
        prop_assert!(d.singular_values.windows(2).all(|w| w[0] >= w[1]));
        let rn = range_null_bases(&x, &tol()).unwrap();
        prop_assert_eq!(rn.rank, rank);
        prop_assert!((&x * &rn.null_basis).norm() <= 1e-10 * (1.0 + x.norm()));
    }

    #[test]
    fn pseudo_inverse_satisfies_penrose_equations(m in 1usize..7, n in 1usize..7, seed: u64, c: bool) {
        let fl = field(c);
        let mut rng = Seed(seed).rng();
        let rank = (seed as usize) % (m.min(n) + 1);
        let x = low_rank(&mut rng, m, n, rank, fl);
        let p = pinv(&x, &tol()).unwrap();
        let s = 1.0 + x.norm() * p.norm();
        prop_assert!(fro(&(&(&x * &p) * &x), &x) <= 1e-9 * s * (1.0 + x.norm()));
        prop_assert!(fro(&(&(&p * &x) * &p), &p) <= 1e-9 * s * (1.0 + p.norm()));
        let xp = &x * &p;
        prop_assert!(fro(&xp, &xp.adjoint()) <= 1e-9 * s);
    }

    #[test]
    fn codilation_equations(m in 0usize..6, n in 0usize..6, seed: u64, c: bool, strict: bool) {
        let fl = field(c);
        let f = contraction_matrix(&mut Seed(seed).rng(), m, n, fl, strict);
        let fm = Mor::new(Obj::fd(n, fl), Obj::fd(m, fl), f).unwrap();
        let cd = codilation(&fm, &tol()).unwrap();
        let r = cd.residuals(&fm);
        prop_assert!(r.t1_isometry <= 1e-9 && r.t2_isometry <= 1e-9);
        prop_assert!(r.factorization <= 1e-9 * (1.0 + fm.mat().norm()));
    }

    #[test]
    fn order_sum_of_orthogonal_blocks_adds_grams(d in 1usize..4, parts in 1usize..5, seed: u64, c: bool) {
        let fl = field(c);
        let mut rng = Seed(seed).rng();
        // Terms q_j c_j with q_j isometries onto mutually orthogonal blocks.
        let q = random_isometry(&mut rng, parts * 2, parts * 2, fl);
        let terms: Vec<Mat> = (0..parts)
            .map(|j| &q.submatrix(0, parts * 2, 2 * j, 2 * j + 2) * &gaussian(&mut rng, 2, d, fl))
            .collect();
        let grams = terms.iter().fold(Mat::zeros(d, d, fl), |acc, t| &acc + &(&t.adjoint() * t));
        let fam = OrthFamily::finite(fl, d, terms).unwrap();
        let s = order_sum(&fam, 0.0, &tol()).unwrap();
        prop_assert!(fro(&(&s.sum.adjoint() * &s.sum), &grams) <= 1e-10 * (1.0 + grams.norm()));
    }

    #[test]
    fn morphism_json_round_trips_bitwise(m in 0usize..5, n in 0usize..5, vals in proptest::collection::vec(-1e300f64..1e300, 50), c: bool) {
        let fl = field(c);
        let mat = Mat::from_fn(m, n, fl, |i, j| {
            let re = vals[(i * 5 + j) % 50];
            C64::new(re, if c { vals[(i * 5 + j + 25) % 50] } else { 0.0 })
        });
        let f = Mor::new(Obj::fd(n, fl), Obj::fd(m, fl), mat).unwrap();
        let text = serde_json::to_string(&MorphismJson::from_mor(&f)).unwrap();
        let back = serde_json::from_str::<MorphismJson>(&text).unwrap().to_mor(&tol()).unwrap();
        prop_assert!(back.mat().bit_eq(f.mat()));
        prop_assert_eq!(back.dom(), f.dom());
    }
}
