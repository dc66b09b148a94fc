//! One-sided Jacobi SVD for complex matrices.
//!
//! The column-orthogonalising sweep runs on `A` when `rows >= cols` and on
//! `A*` otherwise, so the working matrix is always tall. A pair of columns is
//! rotated while `|w_i* w_j| > tol · ‖w_i‖ ‖w_j‖` with `tol = sqrt(rows) · eps`;
//! the relative test keeps small singular values accurate, which the conorm
//! relies on.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64, ONE, ZERO};
use crate::tolerance::Tolerance;

pub const MAX_SWEEPS: usize = 30;

/// `A = U · diag(sigma) · V*` with `U` (`m x m`) and `V` (`n x n`) unitary and
/// `sigma` non-increasing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SvdFactorization {
    pub u: ComplexMatrix,
    pub sigma: Vec<f64>,
    pub v: ComplexMatrix,
}

impl SvdFactorization {
    pub fn rows(&self) -> usize {
        self.u.rows()
    }

    pub fn cols(&self) -> usize {
        self.v.rows()
    }

    pub fn sigma_max(&self) -> f64 {
        self.sigma.first().copied().unwrap_or(0.0)
    }

    /// `sigma_max · max(m, n) · eps · rank_tol_factor`.
    pub fn rank_threshold(&self, t: &Tolerance) -> f64 {
        self.rank_threshold_at(t, 0.0)
    }

    pub fn rank(&self, t: &Tolerance) -> usize {
        numerical_rank(self, t)
    }

    /// Threshold measured against `max(sigma_max, scale)`. For a matrix that
    /// was formed as a product, `scale` is the product of the operand norms,
    /// which bounds the rounding error committed while forming it.
    pub fn rank_threshold_at(&self, t: &Tolerance, scale: f64) -> f64 {
        self.sigma_max().max(scale) * self.rows().max(self.cols()) as f64 * f64::EPSILON * t.rank_tol_factor
    }

    pub fn rank_at(&self, t: &Tolerance, scale: f64) -> usize {
        let cut = self.rank_threshold_at(t, scale);
        self.sigma.iter().filter(|&&s| s > cut).count()
    }

    /// `U Σ V*`, mostly for diagnostics and tests.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let (m, n) = (self.rows(), self.cols());
        let mut us = ComplexMatrix::zeros(m, n);
        for (k, &s) in self.sigma.iter().enumerate() {
            for i in 0..m {
                us.set(i, k, self.u.get(i, k) * s);
            }
        }
        &us * &self.v.adjoint()
    }
}

pub fn svd(a: &ComplexMatrix) -> Result<SvdFactorization> {
    let (m, n) = a.shape();
    if m >= n {
        let (u, sigma, v) = jacobi_tall(a)?;
        Ok(SvdFactorization { u, sigma, v })
    } else {
        // A* = U' Σ V'*  =>  A = V' Σ U'*
        let (u, sigma, v) = jacobi_tall(&a.adjoint())?;
        Ok(SvdFactorization { u: v, sigma, v: u })
    }
}

/// Number of singular values strictly above [`SvdFactorization::rank_threshold`].
pub fn numerical_rank(f: &SvdFactorization, t: &Tolerance) -> usize {
    f.rank_at(t, 0.0)
}

/// Spectral norm `σ_1`; zero for the zero matrix.
pub fn operator_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(svd(m)?.sigma_max())
}

fn dot(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

fn norm_sqr(x: &[C64]) -> f64 {
    x.iter().map(C64::norm_sqr).sum()
}

/// Applies `[x, y] <- [x, y] · [[c, s·e], [-s·conj(e), c]]`.
fn rotate(x: &mut [C64], y: &mut [C64], c: f64, s: f64, e: C64) {
    let se = e * s;
    let se_conj = e.conj() * s;
    for (xi, yi) in x.iter_mut().zip(y.iter_mut()) {
        let (a, b) = (*xi, *yi);
        *xi = a * c - b * se_conj;
        *yi = a * se + b * c;
    }
}

fn jacobi_tall(a: &ComplexMatrix) -> Result<(ComplexMatrix, Vec<f64>, ComplexMatrix)> {
    let (m, n) = a.shape();
    debug_assert!(m >= n);
    let mut w: Vec<Vec<C64>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<C64>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { ONE } else { ZERO }).collect())
        .collect();

    let tol = f64::EPSILON * (m as f64).sqrt().max(1.0);
    let mut converged = n < 2;
    let mut worst = 0.0;
    for _sweep in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        worst = 0.0f64;
        // Refreshed every sweep and updated in closed form after each rotation;
        // a sweep without rotations therefore decides on exact norms.
        let mut sq: Vec<f64> = w.iter().map(|col| norm_sqr(col)).collect();
        for i in 0..n - 1 {
            for j in i + 1..n {
                let (alpha, beta) = (sq[i], sq[j]);
                let gamma = dot(&w[i], &w[j]);
                let g = gamma.norm();
                let scale = (alpha * beta).sqrt();
                if g == 0.0 || g <= tol * scale {
                    continue;
                }
                worst = worst.max(g / scale);
                rotated = true;

                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + zeta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = c * t;
                let e = gamma / g;
                sq[i] = (alpha - t * g).max(0.0);
                sq[j] = beta + t * g;

                let (lo, hi) = w.split_at_mut(j);
                rotate(&mut lo[i], &mut hi[0], c, s, e);
                let (lo, hi) = v.split_at_mut(j);
                rotate(&mut lo[i], &mut hi[0], c, s, e);
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::NoConvergence {
            sweeps: MAX_SWEEPS,
            residual: worst,
        });
    }

    let norms: Vec<f64> = w.iter().map(|col| norm_sqr(col).sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]).then(x.cmp(&y)));

    let sigma: Vec<f64> = order.iter().map(|&k| norms[k]).collect();
    let mut u_cols: Vec<Vec<C64>> = Vec::with_capacity(m);
    for &k in &order {
        let s = norms[k];
        if s > 0.0 {
            u_cols.push(w[k].iter().map(|z| z / s).collect());
        }
    }
    complete_orthonormal(&mut u_cols, m);

    let u = ComplexMatrix::from_fn(m, m, |i, j| u_cols[j][i]);
    let vm = ComplexMatrix::from_fn(n, n, |i, j| v[order[j]][i]);
    Ok((u, sigma, vm))
}

/// Extends an orthonormal set in `C^dim` to a full basis, greedily taking the
/// standard basis vector with the largest residual after two Gram-Schmidt passes.
pub(crate) fn complete_orthonormal(cols: &mut Vec<Vec<C64>>, dim: usize) {
    let project_out = |x: &mut Vec<C64>, basis: &[Vec<C64>]| {
        for _ in 0..2 {
            for q in basis {
                let coef = dot(q, x);
                for (xi, qi) in x.iter_mut().zip(q) {
                    *xi -= coef * qi;
                }
            }
        }
    };
    let mut used = vec![false; dim];
    while cols.len() < dim {
        let mut best: Option<(usize, Vec<C64>, f64)> = None;
        for i in (0..dim).filter(|&i| !used[i]) {
            let mut x = vec![ZERO; dim];
            x[i] = ONE;
            project_out(&mut x, cols);
            let nrm = norm_sqr(&x).sqrt();
            if best.as_ref().is_none_or(|b| nrm > b.2) {
                best = Some((i, x, nrm));
            }
        }
        let (i, x, nrm) = best.expect("a standard basis vector remains");
        used[i] = true;
        cols.push(x.iter().map(|z| z / nrm).collect());
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unitarity_defect(q: &ComplexMatrix) -> f64 {
        (&(&q.adjoint() * q) - &ComplexMatrix::identity(q.cols())).frobenius_norm()
    }

    fn check_invariants(a: &ComplexMatrix, f: &SvdFactorization) {
        let (m, n) = a.shape();
        assert_eq!(f.sigma.len(), m.min(n));
        assert!(unitarity_defect(&f.u) <= 1e-12 * m as f64);
        assert!(unitarity_defect(&f.v) <= 1e-12 * n as f64);
        assert!(f.sigma.windows(2).all(|w| w[0] >= w[1]));
        assert!(f.sigma.iter().all(|&s| s >= 0.0));
        let err = (&f.reconstruct() - a).frobenius_norm();
        assert!(err <= 1e-12 * a.frobenius_norm().max(1.0), "reconstruction error {err}");
    }

    #[test]
    fn diagonal() {
        let a = ComplexMatrix::from_real_diag(&[3.0, 2.0]);
        let f = svd(&a).unwrap();
        assert_eq!(f.sigma, vec![3.0, 2.0]);
        check_invariants(&a, &f);
    }

    #[test]
    fn zero_rectangular() {
        let a = ComplexMatrix::zeros(2, 3);
        let f = svd(&a).unwrap();
        assert_eq!(f.sigma, vec![0.0, 0.0]);
        assert_eq!(numerical_rank(&f, &Tolerance::default()), 0);
        check_invariants(&a, &f);
    }

    #[test]
    fn nilpotent_shift() {
        let a = ComplexMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]).unwrap();
        let f = svd(&a).unwrap();
        assert_eq!(f.sigma, vec![1.0, 0.0]);
        check_invariants(&a, &f);
    }

    #[test]
    fn wide_and_tall_complex() {
        let a = ComplexMatrix::from_fn(3, 5, |i, j| C64::new((i * 5 + j) as f64 - 7.0, (i as f64) - (j as f64) * 0.5));
        let f = svd(&a).unwrap();
        check_invariants(&a, &f);
        let at = a.adjoint();
        let ft = svd(&at).unwrap();
        check_invariants(&at, &ft);
        for (x, y) in f.sigma.iter().zip(&ft.sigma) {
            assert!((x - y).abs() <= 1e-13 * f.sigma[0]);
        }
    }

    #[test]
    fn rank_examples() {
        let t = Tolerance::default();
        let f = svd(&ComplexMatrix::from_real_diag(&[3.0, 2.0, 0.0])).unwrap();
        assert_eq!(numerical_rank(&f, &t), 2);

        // exact rank of diag(1, 1e-18) over the rationals is 2, but the
        // scale-aware threshold (2 · eps ≈ 4.4e-16) counts it as rank 1.
        let tiny = svd(&ComplexMatrix::from_real_diag(&[1.0, 1e-18])).unwrap();
        assert_eq!(tiny.sigma, vec![1.0, 1e-18]);
        assert_eq!(numerical_rank(&tiny, &t), 1);
    }

    #[test]
    fn rank_of_outer_product_fixture() {
        // rows are multiples of (1, 2, 3): exact rank 1
        let a = ComplexMatrix::from_real_rows(&[[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [-3.0, -6.0, -9.0]]).unwrap();
        assert_eq!(svd(&a).unwrap().rank(&Tolerance::default()), 1);
    }

    #[test]
    fn operator_norm_examples() {
        assert_eq!(operator_norm(&ComplexMatrix::from_real_diag(&[3.0, 2.0, 0.0])).unwrap(), 3.0);
        let h = 0.5f64.sqrt();
        let unitary =
            ComplexMatrix::from_rows(&[vec![C64::new(h, 0.0), C64::new(0.0, h)], vec![C64::new(0.0, h), C64::new(h, 0.0)]])
                .unwrap();
        assert!((operator_norm(&unitary).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(operator_norm(&ComplexMatrix::zeros(2, 2)).unwrap(), 0.0);
    }

    #[test]
    fn operator_norm_matches_characteristic_polynomial() {
        // brute force: largest eigenvalue of the 2x2 hermitian a*a from its
        // characteristic polynomial λ² − tr λ + det = 0
        let a = ComplexMatrix::from_real_rows(&[[1.0, 1.0], [0.0, -1.0]]).unwrap();
        let g = &a.adjoint() * &a;
        let tr = g.trace().re;
        let det = (g.get(0, 0) * g.get(1, 1) - g.get(0, 1) * g.get(1, 0)).re;
        let lambda_max = (tr + (tr * tr - 4.0 * det).sqrt()) / 2.0;
        let expected = lambda_max.sqrt();
        let got = operator_norm(&a).unwrap();
        assert!(got > 1.6 && got < 1.7);
        assert!((got - expected).abs() <= 1e-14);
    }

    #[test]
    fn completion_yields_unitary() {
        let mut cols = vec![vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8), ZERO]];
        complete_orthonormal(&mut cols, 3);
        let q = ComplexMatrix::from_fn(3, 3, |i, j| cols[j][i]);
        assert!(unitarity_defect(&q) < 1e-15);
    }
}
