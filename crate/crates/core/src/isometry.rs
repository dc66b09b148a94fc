//! Conorm, partial isometries and the classification of a single matrix.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{relative_diff, ComplexMatrix};
use crate::mp_hermitian::require_square;
use crate::pinv::pinv_from_svd;
use crate::random::{orthonormal_columns, random_unitary, rng_from_seed, with_singular_values};
use crate::report::ConditionReport;
use crate::svd::{svd, SvdFactorization};
use crate::tolerance::Tolerance;

fn conorm_from_svd(f: &SvdFactorization, t: &Tolerance) -> Option<f64> {
    match f.rank(t) {
        0 => None,
        r => Some(f.sigma[r - 1]),
    }
}

/// Reduced minimum modulus: the smallest singular value above the rank
/// threshold, which is `1 / ‖a†‖`.
pub fn conorm(a: &ComplexMatrix, t: &Tolerance) -> Result<f64> {
    conorm_from_svd(&svd(a)?, t).ok_or(Error::ZeroConorm)
}

/// Residuals of the three equivalent descriptions of a partial isometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PartialIsometryResiduals {
    /// relative distance between `a†` and `a*`
    pub pinv_vs_adjoint: f64,
    /// `a*a` idempotent (it is hermitian by construction)
    pub gram_idempotent: f64,
    /// `aa*` idempotent
    pub cogram_idempotent: f64,
}

pub fn partial_isometry_residuals(a: &ComplexMatrix, t: &Tolerance) -> Result<PartialIsometryResiduals> {
    let x = pinv_from_svd(&svd(a)?, t).0;
    let a_h = a.adjoint();
    let gram = &a_h * a;
    let cogram = a * &a_h;
    Ok(PartialIsometryResiduals {
        pinv_vs_adjoint: relative_diff(&x, &a_h)?,
        gram_idempotent: relative_diff(&(&gram * &gram), &gram)?,
        cogram_idempotent: relative_diff(&(&cogram * &cogram), &cogram)?,
    })
}

/// `a† = a*`. The zero matrix counts as a partial isometry.
pub fn is_partial_isometry(a: &ComplexMatrix, t: &Tolerance) -> Result<bool> {
    Ok(partial_isometry_residuals(a, t)?.pinv_vs_adjoint <= t.eq_tol)
}

/// `‖aa* − a*a‖_F / ‖a‖_F²`, zero for the zero matrix.
pub fn normality_residual(a: &ComplexMatrix) -> Result<f64> {
    require_square("normality_residual", a)?;
    let a_h = a.adjoint();
    let nrm2 = a.frobenius_norm().powi(2);
    if nrm2 == 0.0 {
        return Ok(0.0);
    }
    Ok((&(a * &a_h) - &(&a_h * a)).frobenius_norm() / nrm2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Prop53Condition {
    /// `a† = a*`
    PartialIsometry,
    /// `c(a) = ‖a‖ = 1`
    UnitConormAndNorm,
    /// both sides agree
    Consistent,
}

/// A nonzero matrix is a partial isometry iff its conorm and norm are both 1.
pub fn prop53_check(a: &ComplexMatrix, t: &Tolerance) -> Result<ConditionReport<Prop53Condition>> {
    let f = svd(a)?;
    let c = conorm_from_svd(&f, t).ok_or(Error::ZeroConorm)?;
    let x = pinv_from_svd(&f, t).0;
    let mut report = ConditionReport::new(*t);
    report.insert_residual(Prop53Condition::PartialIsometry, relative_diff(&x, &a.adjoint())?);
    report.insert_residual(
        Prop53Condition::UnitConormAndNorm,
        (c - 1.0).abs().max((f.sigma_max() - 1.0).abs()),
    );
    insert_consistency(&mut report, Prop53Condition::PartialIsometry, Prop53Condition::UnitConormAndNorm, Prop53Condition::Consistent);
    Ok(report)
}

fn insert_consistency<K: Ord + Copy>(report: &mut ConditionReport<K>, lhs: K, rhs: K, key: K) {
    let agree = report.holds(lhs) == report.holds(rhs);
    report.insert(key, agree, if agree { 0.0 } else { 1.0 });
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Theorem54Condition {
    Normal,
    MpHermitian,
    Hermitian,
    PartialIsometry,
    /// normal and Moore-Penrose hermitian
    Lhs,
    /// hermitian partial isometry
    Rhs,
    Consistent,
}

/// Normal Moore-Penrose hermitian ⟺ hermitian partial isometry.
pub fn theorem54_check(a: &ComplexMatrix, t: &Tolerance) -> Result<ConditionReport<Theorem54Condition>> {
    require_square("theorem54_check", a)?;
    let x = pinv_from_svd(&svd(a)?, t).0;
    let a_h = a.adjoint();
    let mut report = ConditionReport::new(*t);
    report.insert_residual(Theorem54Condition::Normal, normality_residual(a)?);
    report.insert_residual(Theorem54Condition::MpHermitian, relative_diff(&x, a)?);
    report.insert_residual(Theorem54Condition::Hermitian, relative_diff(a, &a_h)?);
    report.insert_residual(Theorem54Condition::PartialIsometry, relative_diff(&x, &a_h)?);

    let side = |r: &ConditionReport<Theorem54Condition>, p: Theorem54Condition, q: Theorem54Condition| {
        let holds = r.holds(p) == Some(true) && r.holds(q) == Some(true);
        let residual = r.residual(p).unwrap_or(0.0).max(r.residual(q).unwrap_or(0.0));
        (holds, residual)
    };
    let (lhs, lhs_res) = side(&report, Theorem54Condition::Normal, Theorem54Condition::MpHermitian);
    let (rhs, rhs_res) = side(&report, Theorem54Condition::Hermitian, Theorem54Condition::PartialIsometry);
    report.insert(Theorem54Condition::Lhs, lhs, lhs_res);
    report.insert(Theorem54Condition::Rhs, rhs, rhs_res);
    insert_consistency(&mut report, Theorem54Condition::Lhs, Theorem54Condition::Rhs, Theorem54Condition::Consistent);
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub rows: usize,
    pub cols: usize,
    /// Every finite matrix has a Moore-Penrose inverse.
    pub regular: bool,
    pub rank: usize,
    pub hermitian: bool,
    pub normal: bool,
    pub partial_isometry: bool,
    pub mp_hermitian: bool,
    pub op_norm: f64,
    pub pinv_norm: f64,
    /// absent for the zero matrix
    pub conorm: Option<f64>,
}

/// Shape-dependent predicates (hermitian, normal, Moore-Penrose hermitian)
/// are reported false for rectangular input.
pub fn classify(a: &ComplexMatrix, t: &Tolerance) -> Result<ClassificationReport> {
    let f = svd(a)?;
    let (x, rank) = pinv_from_svd(&f, t);
    let a_h = a.adjoint();
    let square = a.is_square();
    let pinv_norm = svd(&x)?.sigma_max();
    Ok(ClassificationReport {
        rows: a.rows(),
        cols: a.cols(),
        regular: true,
        rank,
        hermitian: square && relative_diff(a, &a_h)? <= t.eq_tol,
        normal: square && normality_residual(a)? <= t.eq_tol,
        partial_isometry: relative_diff(&x, &a_h)? <= t.eq_tol,
        mp_hermitian: square && relative_diff(&x, a)? <= t.eq_tol,
        op_norm: f.sigma_max(),
        pinv_norm,
        conorm: conorm_from_svd(&f, t),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpecialKind {
    /// `U_r V_r*` with independent seeded orthonormal factors.
    PartialIsometry { rank: usize },
    /// `Q diag(+1 × positive, −1 × negative, 0 …) Q*`.
    HermitianPartialIsometry { positive: usize, negative: usize },
    /// `U Σ V*`; the remaining singular values are zero.
    PrescribedSingularValues { sigma: Vec<f64> },
}

/// Seeded `n x n` fixtures for the isometry checks.
pub fn generate_special(kind: &SpecialKind, n: usize, seed: u64) -> Result<ComplexMatrix> {
    let mut rng = rng_from_seed(seed);
    match kind {
        SpecialKind::PartialIsometry { rank } => {
            if *rank > n {
                return Err(Error::InvalidArgument(format!("rank {rank} exceeds dimension {n}")));
            }
            let u = orthonormal_columns(n, *rank, &mut rng);
            let v = orthonormal_columns(n, *rank, &mut rng);
            Ok(&u * &v.adjoint())
        }
        SpecialKind::HermitianPartialIsometry { positive, negative } => {
            if positive + negative > n {
                return Err(Error::InvalidArgument(format!(
                    "inertia ({positive}, {negative}) exceeds dimension {n}"
                )));
            }
            let d: Vec<f64> = (0..n)
                .map(|i| match i {
                    i if i < *positive => 1.0,
                    i if i < positive + negative => -1.0,
                    _ => 0.0,
                })
                .collect();
            let q = random_unitary(n, &mut rng);
            Ok(&(&q * &ComplexMatrix::from_real_diag(&d)) * &q.adjoint())
        }
        SpecialKind::PrescribedSingularValues { sigma } => {
            if sigma.len() > n {
                return Err(Error::InvalidArgument(format!(
                    "{} singular values do not fit dimension {n}",
                    sigma.len()
                )));
            }
            if let Some(bad) = sigma.iter().find(|s| !(s.is_finite() && **s >= 0.0)) {
                return Err(Error::InvalidArgument(format!("invalid singular value {bad}")));
            }
            Ok(with_singular_values(n, n, sigma, &mut rng))
        }
    }
}
