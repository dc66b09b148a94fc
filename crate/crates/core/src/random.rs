//! Seeded random matrices. Every generator takes its own RNG so that a
//! `(seed, trial_index)` pair fully determines a fuzz trial.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matrix::{ComplexMatrix, C64};

pub type TrialRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> TrialRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Order-independent per-trial seed (SplitMix64 finaliser over both inputs).
pub fn trial_seed(seed: u64, trial_index: u64) -> u64 {
    let mut z = seed ^ trial_index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Standard complex normal: real and imaginary parts i.i.d. N(0, 1/2).
pub fn complex_gaussian(rng: &mut impl Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// `rows x cols` matrix with orthonormal columns (`cols <= rows`), from
/// classical Gram-Schmidt with reorthogonalisation applied to a Gaussian
/// matrix. The positive-diagonal QR convention makes the result Haar.
pub fn orthonormal_columns(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
    assert!(cols <= rows, "cannot fit {cols} orthonormal columns in C^{rows}");
    let g = gaussian_matrix(rows, cols, rng);
    let mut q: Vec<Vec<C64>> = Vec::with_capacity(cols);
    for j in 0..cols {
        let mut x = g.column(j);
        for _ in 0..2 {
            for prev in &q {
                let coef: C64 = prev.iter().zip(&x).map(|(p, xi)| p.conj() * xi).sum();
                for (xi, p) in x.iter_mut().zip(prev) {
                    *xi -= coef * p;
                }
            }
        }
        let nrm = x.iter().map(C64::norm_sqr).sum::<f64>().sqrt();
        q.push(x.iter().map(|z| z / nrm).collect());
    }
    ComplexMatrix::from_fn(rows, cols, |i, j| q[j][i])
}

pub fn random_unitary(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    orthonormal_columns(n, n, rng)
}

/// `U · diag(sigma) · V*` with `U` (`rows x r`) and `V` (`cols x r`) random
/// orthonormal factors, `r = sigma.len()`.
pub fn with_singular_values(rows: usize, cols: usize, sigma: &[f64], rng: &mut impl Rng) -> ComplexMatrix {
    let r = sigma.len();
    let u = orthonormal_columns(rows, r, rng);
    let v = orthonormal_columns(cols, r, rng);
    let us = ComplexMatrix::from_fn(rows, r, |i, k| u.get(i, k) * sigma[k]);
    &us * &v.adjoint()
}

/// Rank in `0..=max_rank`, uniform, with rank 0 drawn at least 5% of the time.
pub fn random_rank(max_rank: usize, rng: &mut impl Rng) -> usize {
    if rng.random_bool(0.05) {
        0
    } else {
        rng.random_range(0..=max_rank)
    }
}
