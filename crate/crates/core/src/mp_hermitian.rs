//! Moore-Penrose hermitian matrices: `a† = a`.
//!
//! Equivalently `a = a³` with `a²` a hermitian idempotent. Such an `a`
//! splits `C^n` orthogonally into its null space, where it vanishes, and its
//! range, on which it acts as an (in general non-normal) involution.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{relative_diff, ComplexMatrix};
use crate::pinv::pinv_from_svd;
use crate::random::{orthonormal_columns, random_unitary, rng_from_seed};
use crate::report::ConditionReport;
use crate::svd::svd;
use crate::tolerance::Tolerance;

/// Smallest singular value `[basis(col a) | basis(null a)]` may have for the
/// range and null space to count as complementary.
pub const DIRECT_SUM_MIN_SV: f64 = 1e-6;

pub const DEFAULT_COND_CAP: f64 = 10.0;

pub(crate) fn require_square(op: &'static str, a: &ComplexMatrix) -> Result<()> {
    if a.is_square() {
        Ok(())
    } else {
        Err(Error::NotSquare {
            op,
            rows: a.rows(),
            cols: a.cols(),
        })
    }
}

/// `‖a† − a‖_F / max(1, ‖a†‖_F, ‖a‖_F)`.
pub fn mp_hermitian_residual(a: &ComplexMatrix, t: &Tolerance) -> Result<f64> {
    require_square("is_mp_hermitian", a)?;
    let x = pinv_from_svd(&svd(a)?, t).0;
    relative_diff(&x, a)
}

pub fn is_mp_hermitian(a: &ComplexMatrix, t: &Tolerance) -> Result<bool> {
    Ok(mp_hermitian_residual(a, t)? <= t.eq_tol)
}

/// `a = a³` and `(a²)* = a²`, without forming a pseudoinverse.
pub fn algebraic_mph_residual(a: &ComplexMatrix) -> Result<f64> {
    require_square("algebraic_mph_check", a)?;
    let a2 = a * a;
    let a3 = &a2 * a;
    Ok(relative_diff(a, &a3)?.max(relative_diff(&a2.adjoint(), &a2)?))
}

pub fn algebraic_mph_check(a: &ComplexMatrix, t: &Tolerance) -> Result<bool> {
    Ok(algebraic_mph_residual(a)? <= t.eq_tol)
}

/// `x³ − x` annihilates `a`, which confines the spectrum to `{0, −1, 1}`.
pub fn annihilator_spectrum_check(a: &ComplexMatrix, t: &Tolerance) -> Result<bool> {
    require_square("annihilator_spectrum_check", a)?;
    let a3 = &(a * a) * a;
    Ok(relative_diff(&a3, a)? <= t.eq_tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Theorem51Condition {
    /// `col(a) = col(a*)`; residual is the projector distance.
    SameRange,
    /// `null(a) = null(a*)`; residual is the projector distance.
    SameNullSpace,
    /// `C^n = col(a) ⊕ null(a)`; the recorded value is the smallest singular
    /// value of the stacked bases and must exceed [`DIRECT_SUM_MIN_SV`].
    DirectSum,
    /// `a²` and `(a*)²` act as the identity on `col(a)`.
    SquaresActAsIdentity,
}

/// Range/null-space characterization of Moore-Penrose hermitian matrices,
/// realized on column spaces of `C^n`.
pub fn theorem51_check(a: &ComplexMatrix, t: &Tolerance) -> Result<ConditionReport<Theorem51Condition>> {
    require_square("theorem51_check", a)?;
    let n = a.rows();
    let f = svd(a)?;
    let rank = f.rank(t);
    let range = f.u.columns(0, rank);
    let co_range = f.v.columns(0, rank);
    let null = f.v.columns(rank, n);
    let co_null = f.u.columns(rank, n);

    let projector = |b: &ComplexMatrix| b * &b.adjoint();
    let mut report = ConditionReport::new(*t);
    report.insert_residual(
        Theorem51Condition::SameRange,
        relative_diff(&projector(&range), &projector(&co_range))?,
    );
    report.insert_residual(
        Theorem51Condition::SameNullSpace,
        relative_diff(&projector(&null), &projector(&co_null))?,
    );

    let stacked = range.hstack(&null);
    let smallest = svd(&stacked)?.sigma.last().copied().unwrap_or(0.0);
    report.insert(Theorem51Condition::DirectSum, smallest > DIRECT_SUM_MIN_SV, smallest);

    let a_h = a.adjoint();
    let sq = &(a * a) * &range;
    let sq_h = &(&a_h * &a_h) * &range;
    report.insert_residual(
        Theorem51Condition::SquaresActAsIdentity,
        relative_diff(&sq, &range)?.max(relative_diff(&sq_h, &range)?),
    );
    Ok(report)
}

/// Orthonormal basis of a subspace of `C^n`, stored as the columns of an
/// `n x dim` matrix (`dim` may be zero).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubspaceBasis {
    pub columns: ComplexMatrix,
    pub dim: usize,
}

impl SubspaceBasis {
    fn new(columns: ComplexMatrix) -> Self {
        let dim = columns.cols();
        SubspaceBasis { columns, dim }
    }

    /// `‖B*B − I‖_F`.
    pub fn orthonormality_defect(&self) -> f64 {
        (&(&self.columns.adjoint() * &self.columns) - &ComplexMatrix::identity(self.dim)).frobenius_norm()
    }
}

/// `C^n = H1 ⊕ H2` with `a = 0` on `H1 = null(a)` and `a` restricted to
/// `H2 = col(a)` an involution `t2` (in the `h2` basis).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MphDecomposition {
    pub h1: SubspaceBasis,
    pub h2: SubspaceBasis,
    pub t2: ComplexMatrix,
    /// `‖h1* h2‖_F`
    pub orthogonality_residual: f64,
    /// `‖t2² − I‖_F`
    pub involution_residual: f64,
    /// relative distance between `h2 t2 h2*` and `a`
    pub reconstruction_residual: f64,
}

pub fn theorem52_decompose(a: &ComplexMatrix, t: &Tolerance) -> Result<MphDecomposition> {
    require_square("theorem52_decompose", a)?;
    let n = a.rows();
    let f = svd(a)?;
    let (x, rank) = pinv_from_svd(&f, t);
    let residual = relative_diff(&x, a)?;
    if residual > t.eq_tol {
        return Err(Error::NotMpHermitian { residual });
    }
    let h1 = SubspaceBasis::new(f.v.columns(rank, n));
    let h2 = SubspaceBasis::new(f.u.columns(0, rank));
    let t2 = &(&h2.columns.adjoint() * a) * &h2.columns;
    let orthogonality_residual = (&h1.columns.adjoint() * &h2.columns).frobenius_norm();
    let involution_residual = (&(&t2 * &t2) - &ComplexMatrix::identity(rank)).frobenius_norm();
    let rebuilt = &(&h2.columns * &t2) * &h2.columns.adjoint();
    let reconstruction_residual = relative_diff(&rebuilt, a)?;
    Ok(MphDecomposition {
        h1,
        h2,
        t2,
        orthogonality_residual,
        involution_residual,
        reconstruction_residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MphOptions {
    /// Upper bound on the condition number of the similarity `S` in `S D S⁻¹`.
    pub cond_cap: f64,
    /// `(count of +1, count of −1)` on the range; random when `None`.
    pub inertia: Option<(usize, usize)>,
}

impl Default for MphOptions {
    fn default() -> Self {
        MphOptions {
            cond_cap: DEFAULT_COND_CAP,
            inertia: None,
        }
    }
}

pub fn generate_mp_hermitian(n: usize, k: usize, seed: u64) -> Result<ComplexMatrix> {
    generate_mp_hermitian_with(n, k, seed, &MphOptions::default())
}

/// `Q · (S D S⁻¹ ⊕ 0) · Q*` with `Q` a seeded unitary, `D = diag(±1)` of size
/// `k` and `S` a seeded invertible matrix with `cond(S) <= cond_cap`.
pub fn generate_mp_hermitian_with(n: usize, k: usize, seed: u64, opts: &MphOptions) -> Result<ComplexMatrix> {
    if k > n {
        return Err(Error::InvalidArgument(format!("rank {k} exceeds dimension {n}")));
    }
    if !(opts.cond_cap.is_finite() && opts.cond_cap >= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "cond_cap must be at least 1, got {}",
            opts.cond_cap
        )));
    }
    let mut rng = rng_from_seed(seed);
    let (pos, neg) = match opts.inertia {
        Some((p, q)) if p + q == k => (p, q),
        Some((p, q)) => {
            return Err(Error::InvalidArgument(format!(
                "inertia ({p}, {q}) does not add up to rank {k}"
            )))
        }
        None if k >= 2 => {
            let p = rng.random_range(1..k);
            (p, k - p)
        }
        None if k == 1 => {
            if rng.random_bool(0.5) {
                (1, 0)
            } else {
                (0, 1)
            }
        }
        None => (0, 0),
    };
    let signs: Vec<f64> = std::iter::repeat_n(1.0, pos).chain(std::iter::repeat_n(-1.0, neg)).collect();

    let q = orthonormal_columns(n, k, &mut rng);
    let w1 = random_unitary(k, &mut rng);
    let w2 = random_unitary(k, &mut rng);
    let sv: Vec<f64> = (0..k).map(|_| rng.random_range(1.0..=opts.cond_cap)).collect();

    // S = W1 Σ W2*, S⁻¹ = W2 Σ⁻¹ W1*, so T2 = W1 Σ W2* D W2 Σ⁻¹ W1*
    let s = &ComplexMatrix::from_fn(k, k, |i, j| w1.get(i, j) * sv[j]) * &w2.adjoint();
    let s_inv = &ComplexMatrix::from_fn(k, k, |i, j| w2.get(i, j) / sv[j]) * &w1.adjoint();
    let t2 = &(&s * &ComplexMatrix::from_real_diag(&signs)) * &s_inv;
    Ok(&(&q * &t2) * &q.adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t() -> Tolerance {
        Tolerance::default()
    }

    fn involution() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[[1.0, 1.0], [0.0, -1.0]]).unwrap()
    }

    fn shift() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]).unwrap()
    }

    #[test]
    fn definition_examples() {
        assert!(is_mp_hermitian(&ComplexMatrix::from_real_diag(&[1.0, -1.0, 0.0]), &t()).unwrap());
        assert!(!is_mp_hermitian(&ComplexMatrix::from_real_diag(&[2.0, 0.0]), &t()).unwrap());
        assert!(is_mp_hermitian(&involution(), &t()).unwrap());
    }

    #[test]
    fn algebraic_examples() {
        assert!(algebraic_mph_check(&ComplexMatrix::from_real_diag(&[1.0, -1.0, 0.0]), &t()).unwrap());
        assert!(algebraic_mph_check(&involution(), &t()).unwrap());
        assert!(!algebraic_mph_check(&shift(), &t()).unwrap());
    }

    #[test]
    fn annihilator_examples() {
        assert!(annihilator_spectrum_check(&ComplexMatrix::from_real_diag(&[1.0, -1.0, 0.0, 1.0]), &t()).unwrap());
        assert!(!annihilator_spectrum_check(&ComplexMatrix::identity(3).scale_real(2.0), &t()).unwrap());
    }

    #[test]
    fn non_square_is_rejected() {
        let a = ComplexMatrix::zeros(2, 3);
        assert!(matches!(is_mp_hermitian(&a, &t()), Err(Error::NotSquare { .. })));
        assert!(algebraic_mph_check(&a, &t()).is_err());
        assert!(annihilator_spectrum_check(&a, &t()).is_err());
        assert!(theorem51_check(&a, &t()).is_err());
        assert!(theorem52_decompose(&a, &t()).is_err());
    }

    #[test]
    fn theorem51_examples() {
        let r = theorem51_check(&ComplexMatrix::from_real_diag(&[1.0, -1.0, 0.0]), &t()).unwrap();
        assert!(r.all_hold(), "{r:?}");
        let r = theorem51_check(&involution(), &t()).unwrap();
        assert!(r.all_hold(), "{r:?}");
        let r = theorem51_check(&shift(), &t()).unwrap();
        assert_eq!(r.holds(Theorem51Condition::SameRange), Some(false));
        assert_eq!(r.holds(Theorem51Condition::DirectSum), Some(false));
    }

    #[test]
    fn theorem51_on_zero_matrix() {
        let z = ComplexMatrix::zeros(3, 3);
        assert!(theorem51_check(&z, &t()).unwrap().all_hold());
        assert!(is_mp_hermitian(&z, &t()).unwrap());
    }

    #[test]
    fn decompose_diagonal() {
        let d = theorem52_decompose(&ComplexMatrix::from_real_diag(&[1.0, -1.0, 0.0]), &t()).unwrap();
        assert_eq!((d.h1.dim, d.h2.dim), (1, 2));
        // h1 spans e3 up to phase
        assert!((d.h1.columns.get(2, 0).norm() - 1.0).abs() < 1e-15);
        let mut diag = [d.t2.get(0, 0).re, d.t2.get(1, 1).re];
        diag.sort_by(f64::total_cmp);
        assert_eq!(diag, [-1.0, 1.0]);
        assert!(d.orthogonality_residual < 1e-15);
        assert!(d.involution_residual < 1e-15);
    }

    #[test]
    fn decompose_identity_has_empty_null_space() {
        let d = theorem52_decompose(&ComplexMatrix::identity(3), &t()).unwrap();
        assert_eq!(d.h1.dim, 0);
        assert_eq!(d.h2.dim, 3);
        assert!(relative_diff(&d.t2, &ComplexMatrix::identity(3)).unwrap() < 1e-15);
    }

    #[test]
    fn decompose_rejects_non_mph() {
        assert!(matches!(
            theorem52_decompose(&shift(), &t()),
            Err(Error::NotMpHermitian { .. })
        ));
    }

    #[test]
    fn decompose_embedded_involution() {
        // Q (0 ⊕ T2) Q* with T2 = [[1,1],[0,-1]]
        let mut rng = rng_from_seed(17);
        let q = random_unitary(4, &mut rng);
        let inner = ComplexMatrix::from_real_rows(&[[0.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 0.0], [0.0, 0.0, 1.0, 1.0], [0.0, 0.0, 0.0, -1.0]])
            .unwrap();
        let a = &(&q * &inner) * &q.adjoint();
        let d = theorem52_decompose(&a, &t()).unwrap();
        assert_eq!(d.h2.dim, 2);
        assert!(d.involution_residual <= 1e-9);
        assert!(d.orthogonality_residual <= 1e-9);
        assert!(d.reconstruction_residual <= 1e-9);
        // similar to T2: involution with trace 0
        assert!(d.t2.trace().norm() < 1e-12);
        assert!(d.h1.orthonormality_defect() <= 1e-10);
        assert!(d.h2.orthonormality_defect() <= 1e-10);
    }

    #[test]
    fn generator_examples() {
        assert!(generate_mp_hermitian(3, 0, 9).unwrap().is_zero());

        let opts = MphOptions {
            inertia: Some((4, 0)),
            ..MphOptions::default()
        };
        let inv = generate_mp_hermitian_with(4, 4, 2, &opts).unwrap();
        assert!(relative_diff(&(&inv * &inv), &ComplexMatrix::identity(4)).unwrap() < 1e-12);

        let a = generate_mp_hermitian(6, 3, 42).unwrap();
        assert!(is_mp_hermitian(&a, &t()).unwrap());
        assert_eq!(svd(&a).unwrap().rank(&t()), 3);
        assert_eq!(a, generate_mp_hermitian(6, 3, 42).unwrap());
    }

    #[test]
    fn generator_rejects_bad_params() {
        assert!(generate_mp_hermitian(2, 3, 0).is_err());
        let opts = MphOptions {
            cond_cap: 0.5,
            inertia: None,
        };
        assert!(generate_mp_hermitian_with(3, 2, 0, &opts).is_err());
        let opts = MphOptions {
            cond_cap: 2.0,
            inertia: Some((1, 0)),
        };
        assert!(generate_mp_hermitian_with(3, 2, 0, &opts).is_err());
    }

    #[test]
    fn generator_mixes_signs_when_rank_at_least_two() {
        for seed in 0..20 {
            let a = generate_mp_hermitian(5, 3, seed).unwrap();
            let d = theorem52_decompose(&a, &t()).unwrap();
            // trace of an involution counts (#+1) − (#−1); both present means |trace| < rank
            assert!(d.t2.trace().re.abs() < 3.0 - 0.5, "seed {seed}");
        }
    }
}
