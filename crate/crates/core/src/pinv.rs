//! Moore-Penrose inverse and the equivalent ways of stating the Penrose system.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{relative_diff, ComplexMatrix};
use crate::report::ConditionReport;
use crate::svd::{svd, SvdFactorization};
use crate::tolerance::Tolerance;

/// Hard ceiling on the Penrose residuals of a freshly built pseudoinverse.
pub const PINV_RESIDUAL_BOUND: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PenroseResiduals {
    /// `‖axa − a‖`, relative.
    pub r1: f64,
    /// `‖xax − x‖`, relative.
    pub r2: f64,
    /// `‖(ax)* − ax‖`, relative.
    pub r3: f64,
    /// `‖(xa)* − xa‖`, relative.
    pub r4: f64,
    /// The same four quantities without the `max(1, ‖a‖_F, ‖x‖_F)` scaling.
    pub absolute: [f64; 4],
}

impl PenroseResiduals {
    pub fn max(&self) -> f64 {
        self.r1.max(self.r2).max(self.r3).max(self.r4)
    }

    pub fn all_within(&self, eq_tol: f64) -> bool {
        self.max() <= eq_tol
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PinvResult {
    pub pinv: ComplexMatrix,
    pub rank: usize,
    pub residuals: PenroseResiduals,
}

/// `V · Σ⁺ · U*` from an existing factorization; singular values at or below
/// the rank threshold are dropped. Returns the pseudoinverse and the rank.
pub fn pinv_from_svd(f: &SvdFactorization, t: &Tolerance) -> (ComplexMatrix, usize) {
    pinv_from_svd_at(f, t, 0.0)
}

/// As [`pinv_from_svd`], with the rank decided by
/// [`SvdFactorization::rank_at`].
pub fn pinv_from_svd_at(f: &SvdFactorization, t: &Tolerance, scale: f64) -> (ComplexMatrix, usize) {
    let rank = f.rank_at(t, scale);
    let (m, n) = (f.rows(), f.cols());
    let v_scaled = ComplexMatrix::from_fn(n, rank, |i, k| f.v.get(i, k) / f.sigma[k]);
    let u_r = f.u.columns(0, rank);
    debug_assert_eq!(u_r.rows(), m);
    (&v_scaled * &u_r.adjoint(), rank)
}

/// Pseudoinverse without residual bookkeeping, for internal compositions.
pub(crate) fn pinv_matrix(a: &ComplexMatrix, t: &Tolerance) -> Result<ComplexMatrix> {
    Ok(pinv_from_svd(&svd(a)?, t).0)
}

pub fn pinv(a: &ComplexMatrix, t: &Tolerance) -> Result<PinvResult> {
    let f = svd(a)?;
    let (x, rank) = pinv_from_svd(&f, t);
    let residuals = penrose_residuals(a, &x)?;
    if !residuals.all_within(t.eq_tol.max(PINV_RESIDUAL_BOUND)) {
        return Err(Error::PenroseViolation {
            residual: residuals.max(),
        });
    }
    Ok(PinvResult {
        pinv: x,
        rank,
        residuals,
    })
}

fn check_inverse_shape(op: &'static str, a: &ComplexMatrix, x: &ComplexMatrix) -> Result<()> {
    if x.rows() != a.cols() || x.cols() != a.rows() {
        return Err(Error::dims(op, a.shape(), x.shape()));
    }
    Ok(())
}

pub fn penrose_residuals(a: &ComplexMatrix, x: &ComplexMatrix) -> Result<PenroseResiduals> {
    check_inverse_shape("penrose_residuals", a, x)?;
    let ax = a * x;
    let xa = x * a;
    let abs = [
        (&(&ax * a) - a).frobenius_norm(),
        (&(&xa * x) - x).frobenius_norm(),
        (&ax.adjoint() - &ax).frobenius_norm(),
        (&xa.adjoint() - &xa).frobenius_norm(),
    ];
    let scale = 1f64.max(a.frobenius_norm()).max(x.frobenius_norm());
    Ok(PenroseResiduals {
        r1: abs[0] / scale,
        r2: abs[1] / scale,
        r3: abs[2] / scale,
        r4: abs[3] / scale,
        absolute: abs,
    })
}

/// The single equations out of which every formulation is assembled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Equation {
    /// `a = x* a* a`
    AFromLeft,
    /// `a = a a* x*`
    AFromRight,
    /// `x = x x* a*`
    XFromRight,
    /// `x = a* x* x`
    XFromLeft,
    /// `a* = a* a x`
    AdjAFromLeft,
    /// `a* = x a a*`
    AdjAFromRight,
    /// `x* = x* x a`
    AdjXFromLeft,
    /// `x* = a x x*`
    AdjXFromRight,
}

impl Equation {
    fn residual(self, a: &ComplexMatrix, x: &ComplexMatrix) -> f64 {
        let (a_h, x_h) = (a.adjoint(), x.adjoint());
        let (lhs, rhs) = match self {
            Equation::AFromLeft => (a.clone(), &(&x_h * &a_h) * a),
            Equation::AFromRight => (a.clone(), &(a * &a_h) * &x_h),
            Equation::XFromRight => (x.clone(), &(x * &x_h) * &a_h),
            Equation::XFromLeft => (x.clone(), &(&a_h * &x_h) * x),
            Equation::AdjAFromLeft => (a_h.clone(), &(&a_h * a) * x),
            Equation::AdjAFromRight => (a_h.clone(), &(x * a) * &a_h),
            Equation::AdjXFromLeft => (x_h.clone(), &(&x_h * x) * a),
            Equation::AdjXFromRight => (x_h.clone(), &(a * x) * &x_h),
        };
        relative_diff(&lhs, &rhs).expect("shapes checked by caller")
    }
}

/// Reformulations of "x is the Moore-Penrose inverse of a". The single
/// equation variants each encode one pair of Penrose equations; the others
/// are complete characterizations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FormulationId {
    /// `a = x*a*a` (equivalent to `a = axa`, `(ax)* = ax`)
    P21I,
    /// `a = aa*x*` (equivalent to `a = axa`, `(xa)* = xa`)
    P21Ii,
    /// `x = xx*a*` (equivalent to `x = xax`, `(ax)* = ax`)
    P21Iii,
    /// `x = a*x*x` (equivalent to `x = xax`, `(xa)* = xa`)
    P21Iv,
    P22Ii,
    P22Iii,
    R23Ii,
    R23Iii,
    P24Ii,
    P24Iii,
    P24Iv,
    P24V,
}

impl FormulationId {
    pub const ALL: [FormulationId; 12] = [
        FormulationId::P21I,
        FormulationId::P21Ii,
        FormulationId::P21Iii,
        FormulationId::P21Iv,
        FormulationId::P22Ii,
        FormulationId::P22Iii,
        FormulationId::R23Ii,
        FormulationId::R23Iii,
        FormulationId::P24Ii,
        FormulationId::P24Iii,
        FormulationId::P24Iv,
        FormulationId::P24V,
    ];

    fn equations(self) -> &'static [Equation] {
        use Equation::*;
        match self {
            FormulationId::P21I => &[AFromLeft],
            FormulationId::P21Ii => &[AFromRight],
            FormulationId::P21Iii => &[XFromRight],
            FormulationId::P21Iv => &[XFromLeft],
            FormulationId::P22Ii => &[AFromLeft, XFromLeft],
            FormulationId::P22Iii => &[AFromRight, XFromRight],
            FormulationId::R23Ii => &[AdjAFromLeft, AdjXFromLeft],
            FormulationId::R23Iii => &[AdjAFromRight, AdjXFromRight],
            FormulationId::P24Ii => &[AdjAFromRight, XFromRight],
            FormulationId::P24Iii => &[AFromRight, AdjXFromRight],
            FormulationId::P24Iv => &[AdjAFromLeft, XFromLeft],
            FormulationId::P24V => &[AFromLeft, AdjXFromLeft],
        }
    }

    pub fn tag(self) -> String {
        serde_json::to_value(self)
            .ok()
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default()
    }
}

/// Max relative residual over the formulation's equations.
pub fn formulation_residual(a: &ComplexMatrix, x: &ComplexMatrix, f: FormulationId) -> Result<f64> {
    check_inverse_shape("formulation_holds", a, x)?;
    Ok(f.equations()
        .iter()
        .map(|eq| eq.residual(a, x))
        .fold(0.0, f64::max))
}

pub fn formulation_holds(a: &ComplexMatrix, x: &ComplexMatrix, f: FormulationId, t: &Tolerance) -> Result<bool> {
    Ok(formulation_residual(a, x, f)? <= t.eq_tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum InvolutionLaw {
    /// `(a*)† = (a†)*`
    AdjointOfPinv,
    /// `(a†)† = a`
    PinvOfPinv,
}

pub fn involution_laws_check(a: &ComplexMatrix, t: &Tolerance) -> Result<ConditionReport<InvolutionLaw>> {
    let x = pinv_matrix(a, t)?;
    let adj_pinv = pinv_matrix(&a.adjoint(), t)?;
    let double = pinv_matrix(&x, t)?;
    let mut report = ConditionReport::new(*t);
    report.insert_residual(InvolutionLaw::AdjointOfPinv, relative_diff(&adj_pinv, &x.adjoint())?);
    report.insert_residual(InvolutionLaw::PinvOfPinv, relative_diff(&double, a)?);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::C64;

    fn t() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn diagonal_reciprocates_nonzero_entries() {
        let r = pinv(&ComplexMatrix::from_real_diag(&[2.0, 0.0]), &t()).unwrap();
        assert_eq!(r.pinv, ComplexMatrix::from_real_diag(&[0.5, 0.0]));
        assert_eq!(r.rank, 1);
    }

    #[test]
    fn identity_is_self_inverse() {
        let r = pinv(&ComplexMatrix::identity(4), &t()).unwrap();
        assert_eq!(r.pinv, ComplexMatrix::identity(4));
        assert_eq!(r.residuals.max(), 0.0);
    }

    #[test]
    fn zero_maps_to_transposed_zero() {
        let r = pinv(&ComplexMatrix::zeros(2, 3), &t()).unwrap();
        assert_eq!(r.pinv, ComplexMatrix::zeros(3, 2));
        assert_eq!(r.rank, 0);
    }

    /// Brute-force oracle for the 2x2 shift: the Penrose equations for
    /// a = e1 e2^T force x = e2 e1^T. Enumerate all 0/1 real 2x2 matrices and
    /// keep the ones with vanishing residuals; exactly one survives.
    #[test]
    fn shift_matches_enumeration_oracle() {
        let a = ComplexMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]).unwrap();
        let mut solutions = Vec::new();
        for bits in 0u32..16 {
            let x = ComplexMatrix::from_fn(2, 2, |i, j| C64::new(f64::from((bits >> (2 * i + j)) & 1), 0.0));
            if penrose_residuals(&a, &x).unwrap().max() == 0.0 {
                solutions.push(x);
            }
        }
        assert_eq!(solutions.len(), 1);
        let r = pinv(&a, &t()).unwrap();
        assert_eq!(r.pinv, solutions[0]);
        assert_eq!(r.pinv, ComplexMatrix::from_real_rows(&[[0.0, 0.0], [1.0, 0.0]]).unwrap());
    }

    #[test]
    fn residual_examples() {
        let i = ComplexMatrix::identity(2);
        let r = penrose_residuals(&i, &i).unwrap();
        assert_eq!([r.r1, r.r2, r.r3, r.r4], [0.0; 4]);

        let a = ComplexMatrix::from_real_diag(&[1.0, 0.0]);
        let x = ComplexMatrix::identity(2);
        let r = penrose_residuals(&a, &x).unwrap();
        assert!(r.r2 > 0.0);
        assert_eq!(r.r1, 0.0);
    }

    #[test]
    fn residuals_reject_wrong_shape() {
        let a = ComplexMatrix::zeros(2, 3);
        assert!(matches!(
            penrose_residuals(&a, &ComplexMatrix::zeros(2, 3)),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(formulation_holds(&a, &ComplexMatrix::zeros(2, 3), FormulationId::P21I, &t()).is_err());
    }

    #[test]
    fn formulation_examples() {
        let i = ComplexMatrix::identity(3);
        for f in FormulationId::ALL {
            assert!(formulation_holds(&i, &i, f, &t()).unwrap(), "{f:?}");
        }
        let a = ComplexMatrix::from_real_diag(&[1.0, 0.0]);
        let x = ComplexMatrix::identity(2);
        assert!(!formulation_holds(&a, &x, FormulationId::P24Ii, &t()).unwrap());
    }

    #[test]
    fn formulation_tags() {
        assert_eq!(FormulationId::P21I.tag(), "P21_I");
        assert_eq!(FormulationId::P21Iii.tag(), "P21_III");
        assert_eq!(FormulationId::R23Ii.tag(), "R23_II");
        assert_eq!(FormulationId::P24V.tag(), "P24_V");
    }

    #[test]
    fn involution_laws_on_identity_and_zero() {
        let r = involution_laws_check(&ComplexMatrix::identity(3), &t()).unwrap();
        assert!(r.all_hold());
        assert!(r.residuals.values().all(|&x| x == 0.0));
        let r = involution_laws_check(&ComplexMatrix::zeros(2, 4), &t()).unwrap();
        assert!(r.all_hold());
    }
}
