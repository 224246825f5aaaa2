//! Seeded instance generators. Every generator is a pure function of its
//! seed, so a case can be replayed from the seed printed in a report.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::completion::{Direction, MonotoneChain};
use crate::linalg::{eigh_hermitian, spectral_norm, FieldTag, HermMat, Mat, Tolerance, C64};
use crate::star::{Mor, Obj};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Seed(pub u64);

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl Seed {
    /// An independent seed for sub-stream `index`.
    pub fn derive(self, index: u64) -> Seed {
        Seed(splitmix64(self.0 ^ splitmix64(index)))
    }

    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

pub fn gaussian(rng: &mut impl Rng, rows: usize, cols: usize, field: FieldTag) -> Mat {
    Mat::from_fn(rows, cols, field, |_, _| match field {
        FieldTag::Real => C64::new(rng.sample(StandardNormal), 0.0),
        FieldTag::Complex => {
            let (re, im): (f64, f64) = (rng.sample(StandardNormal), rng.sample(StandardNormal));
            C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
        }
    })
}

/// Modified Gram–Schmidt with one reorthogonalization pass.
fn orthonormalize(a: &Mat) -> Mat {
    let (m, n) = a.shape();
    let mut cols: Vec<Vec<C64>> = (0..n).map(|j| (0..m).map(|i| a.get(i, j)).collect()).collect();
    for j in 0..n {
        for _ in 0..2 {
            for k in 0..j {
                let ip: C64 = cols[k].iter().zip(&cols[j]).map(|(q, v)| q.conj() * v).sum();
                let qk = cols[k].clone();
                for (v, q) in cols[j].iter_mut().zip(&qk) {
                    *v -= ip * q;
                }
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for v in &mut cols[j] {
            *v /= norm;
        }
    }
    Mat::from_fn(m, n, a.field(), |i, j| cols[j][i])
}

/// A Haar-like random isometry `𝕂^cols → 𝕂^rows` (`cols <= rows`).
pub fn random_isometry(rng: &mut impl Rng, rows: usize, cols: usize, field: FieldTag) -> Mat {
    assert!(cols <= rows, "isometry {cols} -> {rows}");
    orthonormalize(&gaussian(rng, rows, cols, field))
}

pub fn gen_random_unitary(dim: usize, field: FieldTag, seed: Seed) -> Mor {
    let o = Obj::fd(dim, field);
    Mor::new(o.clone(), o, random_isometry(&mut seed.rng(), dim, dim, field)).expect("square")
}

/// A Gaussian matrix rescaled to spectral norm `1/(1+δ)`, `δ = 0.1` when
/// `strict` and `0` otherwise. The zero-size cases are returned unscaled.
pub fn contraction_matrix(rng: &mut impl Rng, rows: usize, cols: usize, field: FieldTag, strict: bool) -> Mat {
    let g = gaussian(rng, rows, cols, field);
    let s = spectral_norm(&g, &Tolerance::default()).expect("finite Gaussian");
    if s == 0.0 {
        return g;
    }
    let delta = if strict { 0.1 } else { 0.0 };
    g.scale(1.0 / (s * (1.0 + delta)))
}

pub fn gen_random_contraction(rows: usize, cols: usize, field: FieldTag, seed: Seed, strict: bool) -> Mor {
    let m = contraction_matrix(&mut seed.rng(), rows, cols, field, strict);
    Mor::new(Obj::fd(cols, field), Obj::fd(rows, field), m).expect("shape")
}

/// `c* c` for a Gaussian `c` with `rank` rows.
pub fn random_psd(rng: &mut impl Rng, dim: usize, rank: usize, field: FieldTag) -> HermMat {
    let c = gaussian(rng, rank, dim, field);
    HermMat::symmetrize(&(&c.adjoint() * &c))
}

/// `a_k = Σ_{i<=k} p_i` with PSD increments, scaled so that the last term
/// is at most `bound_scale`; the bound `bound_scale · 1` is attached.
pub fn gen_increasing_chain(dim: usize, length: usize, bound_scale: f64, field: FieldTag, seed: Seed) -> MonotoneChain {
    assert!(length >= 1);
    let mut rng = seed.rng();
    let mut partial = Vec::with_capacity(length);
    let mut acc = HermMat::zeros(dim, field);
    for _ in 0..length {
        let rank = rng.random_range(0..=dim);
        acc = acc.add(&random_psd(&mut rng, dim, rank, field));
        partial.push(acc.clone());
    }
    let top = eigh_hermitian(&acc, &Tolerance::default())
        .expect("symmetric")
        .max()
        .max(0.0);
    let s = if top > 0.0 { bound_scale / (top * 1.001) } else { 1.0 };
    let terms = partial.iter().map(|t| t.scale(s)).collect();
    MonotoneChain::finite(terms, Direction::Increasing)
        .expect("nonempty")
        .with_bound(HermMat::identity(dim, field).scale(bound_scale))
        .expect("same shape")
}

/// Data for the lazy chain `a_n = Σ_{k<=n} (ρ₁^k p₁ + ρ₂^k p₂)`, with closed-form limit.
#[derive(Clone, Debug)]
pub struct GeometricChain {
    pub p: [HermMat; 2],
    pub ratios: [f64; 2],
}

impl GeometricChain {
    pub fn random(rng: &mut impl Rng, dim: usize, field: FieldTag, max_ratio: f64) -> Self {
        let r1 = rng.random_range(0.05..max_ratio);
        let r2 = rng.random_range(0.05..max_ratio);
        let k1 = rng.random_range(1..=dim.max(1));
        let k2 = rng.random_range(0..=dim);
        GeometricChain {
            p: [random_psd(rng, dim, k1, field), random_psd(rng, dim, k2, field)],
            ratios: [r1, r2],
        }
    }

    /// Partial sum up to index `n`, accumulated term by term.
    pub fn term(&self, n: usize) -> HermMat {
        let mut acc = HermMat::zeros(self.p[0].dim(), self.p[0].field());
        let mut w = [1.0f64, 1.0];
        for _ in 0..=n {
            acc = acc.add(&self.p[0].scale(w[0])).add(&self.p[1].scale(w[1]));
            w[0] *= self.ratios[0];
            w[1] *= self.ratios[1];
        }
        acc
    }

    pub fn limit(&self) -> HermMat {
        self.p[0]
            .scale(1.0 / (1.0 - self.ratios[0]))
            .add(&self.p[1].scale(1.0 / (1.0 - self.ratios[1])))
    }

    pub fn chain(&self) -> MonotoneChain {
        let me = self.clone();
        let dim = self.p[0].dim();
        MonotoneChain::lazy(
            dim,
            self.p[0].field(),
            std::sync::Arc::new(move |n| me.term(n)),
            Direction::Increasing,
        )
        .with_bound(self.limit().shift(1e-12))
        .expect("same shape")
    }
}

/// A random `rows × cols` matrix of rank at most `rank`.
pub fn low_rank(rng: &mut impl Rng, rows: usize, cols: usize, rank: usize, field: FieldTag) -> Mat {
    &gaussian(rng, rows, rank, field) * &gaussian(rng, rank, cols, field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::star::classify_morphism;

    #[test]
    fn unitary_examples() {
        assert_eq!(gen_random_unitary(0, FieldTag::Complex, Seed(1)).mat().shape(), (0, 0));
        let u1 = gen_random_unitary(1, FieldTag::Real, Seed(7));
        assert_eq!(u1.mat().get(0, 0).re.abs(), 1.0);
        let u = gen_random_unitary(8, FieldTag::Complex, Seed(42));
        let res = (&(&u.mat().adjoint() * u.mat()) - &Mat::identity(8, FieldTag::Complex)).norm();
        assert!(res <= 1e-12 * 8.0, "{res}");
    }

    #[test]
    fn contractions_match_strict_flag() {
        let t = Tolerance::default();
        let s = gen_random_contraction(1, 1, FieldTag::Real, Seed(3), true);
        assert!(s.mat().get(0, 0).re.abs() < 1.0);
        for k in 0..20 {
            let c = classify_morphism(&gen_random_contraction(3, 4, FieldTag::Complex, Seed(k), true), &t).unwrap();
            assert!(c.contraction && c.strict_contraction);
            let f = gen_random_contraction(3, 4, FieldTag::Complex, Seed(k), false);
            let c = classify_morphism(&f, &t).unwrap();
            assert!(c.contraction && !c.strict_contraction);
            assert!((spectral_norm(f.mat(), &t).unwrap() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn reproducible() {
        let a = gen_random_contraction(4, 4, FieldTag::Complex, Seed(99), false);
        let b = gen_random_contraction(4, 4, FieldTag::Complex, Seed(99), false);
        assert!(a.mat().bit_eq(b.mat()));
        assert_ne!(Seed(1).derive(0), Seed(1).derive(1));
    }

    #[test]
    fn increasing_chain_is_monotone_and_bounded() {
        let t = Tolerance::default();
        let c = gen_increasing_chain(4, 6, 2.0, FieldTag::Real, Seed(5));
        let s = crate::completion::monotone_supremum(&c, &t).unwrap();
        assert_eq!(s.terms.len(), 6);
        let single = gen_increasing_chain(3, 1, 1.0, FieldTag::Complex, Seed(6));
        assert_eq!(crate::completion::monotone_supremum(&single, &t).unwrap().index, 0);
    }
}
