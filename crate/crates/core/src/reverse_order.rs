//! Reverse order law `(ab)† = b†a†` and its characterizations.
//!
//! With `p = bb†`, `q = a†a†*`, `r = bb*`, `s = a†a` every condition is a set
//! of product identities `X₁⋯Xₖ = Y₁⋯Yₗ` over a small alphabet of factors.
//! The residual of an identity is `‖lhs − rhs‖_F / max(1, Π‖Xᵢ‖_F, Π‖Yⱼ‖_F)`,
//! and a condition with two identities reports the larger residual.
//!
//! Mbekhta's generalized-inverse criterion is instantiated with `a' = a†` and
//! `b' = b†`, so its `p = bb'` is our `p` and its `q = a'a` is our `s`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::pinv::{pinv_from_svd, pinv_from_svd_at};
use crate::report::{ConditionReport, RankSummary};
use crate::svd::svd;
use crate::tolerance::Tolerance;

/// The hermitian intermediates `p, q, r, s` and the pseudoinverses of `q`, `r`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RolIntermediates {
    pub p: ComplexMatrix,
    pub q: ComplexMatrix,
    pub r: ComplexMatrix,
    pub s: ComplexMatrix,
    pub q_dag: ComplexMatrix,
    pub r_dag: ComplexMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ConditionId {
    /// `(ab)† = b†a†`
    G1,
    /// `a†abb*a* = bb*a*` and `bb†a*ab = a*ab`
    G2,
    /// `a†a` commutes with `bb*` and `a*a` with `bb†`
    G3,
    /// `a†abb*a*abb† = bb*a*a`
    G4,
    /// `a†ab = b(ab)†ab` and `bb†a* = a*ab(ab)†`
    G5,
    /// `b†a†` is a generalized inverse of `ab`
    MbekhtaGi,
    /// `a(bb†·a†a − a†a·bb†)b = 0`
    MbekhtaComm,
    /// `a†a·bb†` is idempotent
    MbekhtaIdem,
    T31Ii,
    T31Iii,
    T32Ii,
    T32Iii,
    T33Ii,
    T33Iii,
    T34Ii,
    T34Iii,
    /// `pq = qp` and `rs = sr`
    R35Comm,
    /// `q†p = pq†` and `r†s = sr†`
    R35DagComm,
    /// `(ab)† = b†a†`
    RolDirect,
}

impl ConditionId {
    pub const ALL: [ConditionId; 19] = [
        ConditionId::G1,
        ConditionId::G2,
        ConditionId::G3,
        ConditionId::G4,
        ConditionId::G5,
        ConditionId::MbekhtaGi,
        ConditionId::MbekhtaComm,
        ConditionId::MbekhtaIdem,
        ConditionId::T31Ii,
        ConditionId::T31Iii,
        ConditionId::T32Ii,
        ConditionId::T32Iii,
        ConditionId::T33Ii,
        ConditionId::T33Iii,
        ConditionId::T34Ii,
        ConditionId::T34Iii,
        ConditionId::R35Comm,
        ConditionId::R35DagComm,
        ConditionId::RolDirect,
    ];

    /// Every condition that is equivalent to the reverse order law itself.
    pub const ROL_EQUIVALENT: [ConditionId; 16] = [
        ConditionId::G1,
        ConditionId::G2,
        ConditionId::G3,
        ConditionId::G4,
        ConditionId::G5,
        ConditionId::T31Ii,
        ConditionId::T31Iii,
        ConditionId::T32Ii,
        ConditionId::T32Iii,
        ConditionId::T33Ii,
        ConditionId::T33Iii,
        ConditionId::T34Ii,
        ConditionId::T34Iii,
        ConditionId::R35Comm,
        ConditionId::R35DagComm,
        ConditionId::RolDirect,
    ];

    /// Mbekhta's three mutually equivalent generalized-inverse conditions.
    pub const MBEKHTA: [ConditionId; 3] = [ConditionId::MbekhtaGi, ConditionId::MbekhtaComm, ConditionId::MbekhtaIdem];

    pub fn tag(self) -> String {
        serde_json::to_value(self)
            .ok()
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default()
    }

    fn identities(self) -> &'static [Identity] {
        use Factor::*;
        match self {
            ConditionId::G1 | ConditionId::RolDirect => &[(&[AbDag], &[BDag, ADag])],
            ConditionId::G2 => &[
                (&[ADag, A, B, BH, AH], &[B, BH, AH]),
                (&[B, BDag, AH, A, B], &[AH, A, B]),
            ],
            ConditionId::G3 => &[(&[ADag, A, B, BH], &[B, BH, ADag, A]), (&[AH, A, B, BDag], &[B, BDag, AH, A])],
            ConditionId::G4 => &[(&[ADag, A, B, BH, AH, A, B, BDag], &[B, BH, AH, A])],
            ConditionId::G5 => &[(&[ADag, A, B], &[B, AbDag, A, B]), (&[B, BDag, AH], &[AH, A, B, AbDag])],
            ConditionId::MbekhtaGi => &[(&[A, B, BDag, ADag, A, B], &[A, B])],
            ConditionId::MbekhtaComm => &[(&[A, P, S, B], &[A, S, P, B])],
            ConditionId::MbekhtaIdem => &[(&[S, P, S, P], &[S, P])],
            ConditionId::T31Ii => &[(&[A, P, Q, BDagH], &[A, Q, P, BDagH]), (&[A, R, S, BDagH], &[A, S, R, BDagH])],
            ConditionId::T31Iii => &[(&[S, P, Q, P], &[Q, P]), (&[S, R, S, P], &[S, R])],
            ConditionId::T32Ii => &[(&[BDag, Q, P, AH], &[BDag, P, Q, AH]), (&[BDag, S, R, AH], &[BDag, R, S, AH])],
            ConditionId::T32Iii => &[(&[P, Q, P, S], &[P, Q]), (&[P, S, R, S], &[R, S])],
            ConditionId::T33Ii => &[
                (&[BH, QDag, P, ADag], &[BH, P, QDag, ADag]),
                (&[BH, S, RDag, ADag], &[BH, RDag, S, ADag]),
            ],
            ConditionId::T33Iii => &[(&[P, QDag, P, S], &[P, QDag]), (&[P, S, RDag, S], &[RDag, S])],
            ConditionId::T34Ii => &[
                (&[ADagH, P, QDag, B], &[ADagH, QDag, P, B]),
                (&[ADagH, RDag, S, B], &[ADagH, S, RDag, B]),
            ],
            ConditionId::T34Iii => &[(&[S, P, QDag, P], &[QDag, P]), (&[S, RDag, S, P], &[S, RDag])],
            ConditionId::R35Comm => &[(&[P, Q], &[Q, P]), (&[R, S], &[S, R])],
            ConditionId::R35DagComm => &[(&[QDag, P], &[P, QDag]), (&[RDag, S], &[S, RDag])],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Factor {
    A,
    B,
    AH,
    BH,
    ADag,
    BDag,
    ADagH,
    BDagH,
    AbDag,
    P,
    Q,
    R,
    S,
    QDag,
    RDag,
}

type Identity = (&'static [Factor], &'static [Factor]);

/// Everything a condition can refer to, computed once per pair.
struct RolContext {
    a: ComplexMatrix,
    b: ComplexMatrix,
    a_h: ComplexMatrix,
    b_h: ComplexMatrix,
    a_dag: ComplexMatrix,
    b_dag: ComplexMatrix,
    a_dag_h: ComplexMatrix,
    b_dag_h: ComplexMatrix,
    ab_dag: ComplexMatrix,
    inter: RolIntermediates,
    ranks: RankSummary,
}

impl RolContext {
    fn new(a: &ComplexMatrix, b: &ComplexMatrix, t: &Tolerance) -> Result<Self> {
        if a.cols() != b.rows() {
            return Err(Error::dims("reverse order law", a.shape(), b.shape()));
        }
        let (fa, fb) = (svd(a)?, svd(b)?);
        let (a_dag, rank_a) = pinv_from_svd(&fa, t);
        let (b_dag, rank_b) = pinv_from_svd(&fb, t);
        // Rounding in `a * b` is of order eps·‖a‖‖b‖, which can exceed
        // eps·‖ab‖ by orders of magnitude when the factors nearly cancel.
        let product_scale = fa.sigma_max() * fb.sigma_max();
        let (ab_dag, rank_ab) = pinv_from_svd_at(&svd(&(a * b))?, t, product_scale);
        let a_h = a.adjoint();
        let b_h = b.adjoint();
        let a_dag_h = a_dag.adjoint();
        let b_dag_h = b_dag.adjoint();

        let p = b * &b_dag;
        let q = &a_dag * &a_dag_h;
        let r = b * &b_h;
        let s = &a_dag * a;
        let q_dag = pinv_from_svd(&svd(&q)?, t).0;
        let r_dag = pinv_from_svd(&svd(&r)?, t).0;

        Ok(RolContext {
            a: a.clone(),
            b: b.clone(),
            a_h,
            b_h,
            a_dag,
            b_dag,
            a_dag_h,
            b_dag_h,
            ab_dag,
            inter: RolIntermediates {
                p,
                q,
                r,
                s,
                q_dag,
                r_dag,
            },
            ranks: RankSummary {
                a: rank_a,
                b: rank_b,
                ab: rank_ab,
            },
        })
    }

    fn factor(&self, f: Factor) -> &ComplexMatrix {
        match f {
            Factor::A => &self.a,
            Factor::B => &self.b,
            Factor::AH => &self.a_h,
            Factor::BH => &self.b_h,
            Factor::ADag => &self.a_dag,
            Factor::BDag => &self.b_dag,
            Factor::ADagH => &self.a_dag_h,
            Factor::BDagH => &self.b_dag_h,
            Factor::AbDag => &self.ab_dag,
            Factor::P => &self.inter.p,
            Factor::Q => &self.inter.q,
            Factor::R => &self.inter.r,
            Factor::S => &self.inter.s,
            Factor::QDag => &self.inter.q_dag,
            Factor::RDag => &self.inter.r_dag,
        }
    }

    /// Product of the factors and the product of their Frobenius norms.
    fn product(&self, factors: &[Factor]) -> (ComplexMatrix, f64) {
        let first = self.factor(factors[0]);
        factors[1..].iter().fold((first.clone(), first.frobenius_norm()), |(acc, bound), &f| {
            let m = self.factor(f);
            (&acc * m, bound * m.frobenius_norm())
        })
    }

    fn residual(&self, c: ConditionId) -> f64 {
        c.identities()
            .iter()
            .map(|(lhs, rhs)| {
                let (l, lb) = self.product(lhs);
                let (r, rb) = self.product(rhs);
                (&l - &r).frobenius_norm() / 1f64.max(lb).max(rb)
            })
            .fold(0.0, f64::max)
    }
}

pub fn rol_intermediates(a: &ComplexMatrix, b: &ComplexMatrix, t: &Tolerance) -> Result<RolIntermediates> {
    Ok(RolContext::new(a, b, t)?.inter)
}

/// Verdict and relative residual for one condition.
pub fn evaluate_condition(a: &ComplexMatrix, b: &ComplexMatrix, c: ConditionId, t: &Tolerance) -> Result<(bool, f64)> {
    let residual = RolContext::new(a, b, t)?.residual(c);
    Ok((residual <= t.eq_tol, residual))
}

/// Evaluates the whole catalog and records the ranks of `a`, `b` and `ab`.
pub fn full_report(a: &ComplexMatrix, b: &ComplexMatrix, t: &Tolerance) -> Result<ConditionReport<ConditionId>> {
    let ctx = RolContext::new(a, b, t)?;
    let mut report = ConditionReport::new(*t);
    for c in ConditionId::ALL {
        report.insert_residual(c, ctx.residual(c));
    }
    report.ranks = Some(ctx.ranks);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::approx_eq;
    use crate::pinv::pinv;
    use crate::random::{random_unitary, rng_from_seed, with_singular_values};

    fn t() -> Tolerance {
        Tolerance::default()
    }

    fn real(rows: &[[f64; 2]]) -> ComplexMatrix {
        ComplexMatrix::from_real_rows(rows).unwrap()
    }

    #[test]
    fn identity_pair_intermediates() {
        let i = ComplexMatrix::identity(2);
        let k = rol_intermediates(&i, &i, &t()).unwrap();
        for m in [&k.p, &k.q, &k.r, &k.s, &k.q_dag, &k.r_dag] {
            assert_eq!(m, &i);
        }
    }

    #[test]
    fn diagonal_intermediates() {
        let a = ComplexMatrix::from_real_diag(&[2.0, 0.0]);
        let i = ComplexMatrix::identity(2);
        let k = rol_intermediates(&a, &i, &t()).unwrap();
        assert_eq!(k.s, ComplexMatrix::from_real_diag(&[1.0, 0.0]));
        assert_eq!(k.q, ComplexMatrix::from_real_diag(&[0.25, 0.0]));
        assert_eq!(k.r, i);
        assert_eq!(k.p, i);
    }

    #[test]
    fn q_dag_equals_gram_of_a() {
        let mut rng = rng_from_seed(11);
        let a = with_singular_values(4, 4, &[2.0, 1.5, 0.7], &mut rng);
        let b = with_singular_values(4, 4, &[1.0, 0.6, 0.9, 1.3], &mut rng);
        let k = rol_intermediates(&a, &b, &t()).unwrap();
        assert!(approx_eq(&k.q_dag, &(&a.adjoint() * &a), &t()).unwrap());
        let rr = pinv(&(&b * &b.adjoint()), &t()).unwrap().pinv;
        assert!(approx_eq(&k.r_dag, &rr, &t()).unwrap());
        for m in [&k.p, &k.q, &k.r, &k.s, &k.q_dag, &k.r_dag] {
            assert!(approx_eq(m, &m.adjoint(), &t()).unwrap());
        }
        assert!(approx_eq(&(&k.p * &k.p), &k.p, &t()).unwrap());
        assert!(approx_eq(&(&k.s * &k.s), &k.s, &t()).unwrap());
    }

    #[test]
    fn holding_fixture() {
        let a = ComplexMatrix::from_real_diag(&[1.0, 0.0]);
        let b = real(&[[0.0, 1.0], [0.0, 0.0]]);
        let (holds, _) = evaluate_condition(&a, &b, ConditionId::RolDirect, &t()).unwrap();
        assert!(holds);
        let report = full_report(&a, &b, &t()).unwrap();
        for c in ConditionId::ALL {
            assert_eq!(report.holds(c), Some(true), "{c:?}");
        }
    }

    #[test]
    fn failing_fixture() {
        let a = ComplexMatrix::from_real_diag(&[1.0, 0.0]);
        let b = real(&[[1.0, 0.0], [1.0, 0.0]]);
        let (holds, residual) = evaluate_condition(&a, &b, ConditionId::RolDirect, &t()).unwrap();
        assert!(!holds);
        assert!(residual > 0.1);
        let report = full_report(&a, &b, &t()).unwrap();
        for c in ConditionId::ROL_EQUIVALENT {
            assert_eq!(report.holds(c), Some(false), "{c:?}");
        }
        assert_eq!(report.ranks, Some(RankSummary { a: 1, b: 1, ab: 1 }));
    }

    #[test]
    fn generalized_inverse_witness() {
        // a invertible but not unitary, b a coordinate projection: b†a† is a
        // generalized inverse of ab without being its Moore-Penrose inverse
        let a = real(&[[1.0, 1.0], [0.0, 1.0]]);
        let b = ComplexMatrix::from_real_diag(&[1.0, 0.0]);
        let report = full_report(&a, &b, &t()).unwrap();
        for c in ConditionId::MBEKHTA {
            assert_eq!(report.holds(c), Some(true), "{c:?}");
        }
        assert_eq!(report.holds(ConditionId::RolDirect), Some(false));
    }

    #[test]
    fn unitary_left_factor_satisfies_every_condition() {
        let mut rng = rng_from_seed(5);
        let a = random_unitary(4, &mut rng);
        let b = with_singular_values(4, 4, &[1.7, 0.8], &mut rng);
        let report = full_report(&a, &b, &t()).unwrap();
        assert!(report.all_hold(), "{report:?}");
    }

    #[test]
    fn identity_pair_all_residuals_zero() {
        let i = ComplexMatrix::identity(3);
        let report = full_report(&i, &i, &t()).unwrap();
        assert!(report.all_hold());
        assert!(report.residuals.values().all(|&r| r == 0.0));
    }

    #[test]
    fn rejects_non_conformable_pair() {
        let a = ComplexMatrix::zeros(2, 3);
        let b = ComplexMatrix::zeros(2, 3);
        assert!(matches!(full_report(&a, &b, &t()), Err(Error::DimensionMismatch { .. })));
        assert!(rol_intermediates(&a, &b, &t()).is_err());
    }

    #[test]
    fn tags() {
        assert_eq!(ConditionId::RolDirect.tag(), "ROL_DIRECT");
        assert_eq!(ConditionId::MbekhtaGi.tag(), "MBEKHTA_GI");
        assert_eq!(ConditionId::T31Iii.tag(), "T31_III");
        assert_eq!(ConditionId::R35DagComm.tag(), "R35_DAG_COMM");
    }
}
