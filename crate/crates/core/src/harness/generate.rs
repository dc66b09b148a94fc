use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::pinv::pinv_matrix;
use crate::random::{random_rank, random_unitary, rng_from_seed, with_singular_values};
use crate::tolerance::Tolerance;

/// Singular value range for the operands of random reverse-order pairs.
pub const ROL_SV_RANGE: (f64, f64) = (0.5, 2.0);

/// Rank-`r` matrix `U Σ V*` with the `r` nonzero singular values drawn
/// uniformly from `[sv_low, sv_high]`.
pub fn generate_regular(
    m: usize,
    n: usize,
    r: usize,
    sv_low: f64,
    sv_high: f64,
    seed: u64,
) -> Result<ComplexMatrix> {
    regular_from_rng(m, n, r, sv_low, sv_high, &mut rng_from_seed(seed))
}

pub fn regular_from_rng(
    m: usize,
    n: usize,
    r: usize,
    sv_low: f64,
    sv_high: f64,
    rng: &mut impl Rng,
) -> Result<ComplexMatrix> {
    if m == 0 || n == 0 {
        return Err(Error::EmptyMatrix { rows: m, cols: n });
    }
    if r > m.min(n) {
        return Err(Error::InvalidArgument(format!("rank {r} exceeds min({m}, {n})")));
    }
    if !(sv_low.is_finite() && sv_high.is_finite() && 0.0 < sv_low && sv_low <= sv_high) {
        return Err(Error::InvalidArgument(format!(
            "singular value range [{sv_low}, {sv_high}] must satisfy 0 < low <= high"
        )));
    }
    let mut sigma: Vec<f64> = (0..r).map(|_| rng.random_range(sv_low..=sv_high)).collect();
    sigma.sort_by(|x, y| y.total_cmp(x));
    Ok(with_singular_values(m, n, &sigma, rng))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RolMode {
    /// `a` unitary, so `(ab)† = b†a*` always.
    ForcedUnitary,
    /// `b = a†`, so `ab = aa†` is its own pseudoinverse.
    ForcedPinv,
    /// Independent draws with random ranks.
    Random,
}

/// Square `n x n` pair for reverse-order-law experiments.
pub fn generate_rol_pair(n: usize, mode: RolMode, seed: u64) -> Result<(ComplexMatrix, ComplexMatrix)> {
    rol_pair_from_rng(n, mode, &mut rng_from_seed(seed))
}

pub fn rol_pair_from_rng(n: usize, mode: RolMode, rng: &mut impl Rng) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if n == 0 {
        return Err(Error::EmptyMatrix { rows: 0, cols: 0 });
    }
    let (lo, hi) = ROL_SV_RANGE;
    match mode {
        RolMode::ForcedUnitary => {
            let a = random_unitary(n, rng);
            let rb = random_rank(n, rng);
            let b = regular_from_rng(n, n, rb, lo, hi, rng)?;
            Ok((a, b))
        }
        RolMode::ForcedPinv => {
            let ra = random_rank(n, rng);
            let a = regular_from_rng(n, n, ra, lo, hi, rng)?;
            let b = pinv_matrix(&a, &Tolerance::default())?;
            Ok((a, b))
        }
        RolMode::Random => {
            let ra = random_rank(n, rng);
            let rb = random_rank(n, rng);
            let a = regular_from_rng(n, n, ra, lo, hi, rng)?;
            let b = regular_from_rng(n, n, rb, lo, hi, rng)?;
            Ok((a, b))
        }
    }
}

/// Hand-checked 2x2 pairs with a known reverse-order verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixturePair {
    /// `a = diag(1, 0)`, `b = [[0, 1], [0, 0]]`: the law holds.
    RolHolds,
    /// `a = diag(1, 0)`, `b = [[1, 0], [1, 0]]`: `(ab)† = diag(1, 0)` but `b†a† = diag(1/2, 0)`.
    RolFails,
    /// `a = [[1, 1], [0, 1]]`, `b = diag(1, 0)`: `b†a†` is a generalized
    /// inverse of `ab` but not its Moore-Penrose inverse.
    GeneralizedInverseOnly,
}

impl FixturePair {
    pub const ALL: [FixturePair; 3] = [FixturePair::RolHolds, FixturePair::RolFails, FixturePair::GeneralizedInverseOnly];

    pub fn matrices(self) -> (ComplexMatrix, ComplexMatrix) {
        let m = |rows: [[f64; 2]; 2]| ComplexMatrix::from_real_rows(&rows).expect("finite fixture");
        match self {
            FixturePair::RolHolds => (m([[1.0, 0.0], [0.0, 0.0]]), m([[0.0, 1.0], [0.0, 0.0]])),
            FixturePair::RolFails => (m([[1.0, 0.0], [0.0, 0.0]]), m([[1.0, 0.0], [1.0, 0.0]])),
            FixturePair::GeneralizedInverseOnly => (m([[1.0, 1.0], [0.0, 1.0]]), m([[1.0, 0.0], [0.0, 0.0]])),
        }
    }

    pub fn rol_holds(self) -> bool {
        matches!(self, FixturePair::RolHolds)
    }
}

/// Embeds a fixture into `n x n` (`n >= 2`) by zero padding and then
/// `a ↦ U a W*`, `b ↦ W b V*` with seeded unitaries. Both the law and the
/// generalized-inverse criterion are invariant under this change of bases.
pub fn embedded_fixture_pair(
    fixture: FixturePair,
    n: usize,
    rng: &mut impl Rng,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("fixtures need n >= 2, got {n}")));
    }
    let (a0, b0) = fixture.matrices();
    let pad = |m: &ComplexMatrix| {
        ComplexMatrix::from_fn(n, n, |i, j| if i < 2 && j < 2 { m.get(i, j) } else { crate::matrix::ZERO })
    };
    let u = random_unitary(n, rng);
    let w = random_unitary(n, rng);
    let v = random_unitary(n, rng);
    let a = &(&u * &pad(&a0)) * &w.adjoint();
    let b = &(&w * &pad(&b0)) * &v.adjoint();
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isometry::conorm;
    use crate::matrix::relative_diff;
    use crate::reverse_order::{evaluate_condition, full_report, ConditionId};
    use crate::svd::svd;

    #[test]
    fn full_rank_unit_singular_values_give_unitary() {
        let q = generate_regular(2, 2, 2, 1.0, 1.0, 77).unwrap();
        let defect = relative_diff(&(&q.adjoint() * &q), &ComplexMatrix::identity(2)).unwrap();
        assert!(defect < 1e-15);
    }

    #[test]
    fn rank_zero_is_zero_matrix() {
        assert_eq!(generate_regular(4, 3, 0, 1.0, 2.0, 1).unwrap(), ComplexMatrix::zeros(4, 3));
    }

    #[test]
    fn planted_rank_and_conorm() {
        let t = Tolerance::default();
        let a = generate_regular(5, 4, 2, 0.5, 2.0, 7).unwrap();
        assert_eq!(svd(&a).unwrap().rank(&t), 2);
        let c = conorm(&a, &t).unwrap();
        assert!((0.5..=2.0).contains(&c));
        assert_eq!(a, generate_regular(5, 4, 2, 0.5, 2.0, 7).unwrap());
    }

    #[test]
    fn rejects_invalid_arguments() {
        assert!(generate_regular(3, 2, 3, 1.0, 2.0, 0).is_err());
        assert!(generate_regular(3, 2, 1, 0.0, 2.0, 0).is_err());
        assert!(generate_regular(3, 2, 1, 3.0, 2.0, 0).is_err());
        assert!(generate_regular(0, 2, 0, 1.0, 2.0, 0).is_err());
    }

    #[test]
    fn forced_modes_satisfy_the_law() {
        let t = Tolerance::default();
        for seed in 0..20 {
            for mode in [RolMode::ForcedUnitary, RolMode::ForcedPinv] {
                let (a, b) = generate_rol_pair(4, mode, seed).unwrap();
                let (holds, residual) = evaluate_condition(&a, &b, ConditionId::RolDirect, &t).unwrap();
                assert!(holds, "{mode:?} seed {seed}: residual {residual:e}");
            }
        }
    }

    #[test]
    fn random_mode_at_n2_produces_both_verdicts() {
        let t = Tolerance::default();
        let (mut yes, mut no) = (0, 0);
        for seed in 0..1000 {
            let (a, b) = generate_rol_pair(2, RolMode::Random, seed).unwrap();
            if evaluate_condition(&a, &b, ConditionId::RolDirect, &t).unwrap().0 {
                yes += 1;
            } else {
                no += 1;
            }
        }
        assert!(yes > 0 && no > 0, "yes={yes} no={no}");
    }

    #[test]
    fn embedded_fixtures_keep_their_verdicts() {
        let t = Tolerance::default();
        let mut rng = rng_from_seed(4);
        for fixture in FixturePair::ALL {
            let (a, b) = embedded_fixture_pair(fixture, 5, &mut rng).unwrap();
            let r = full_report(&a, &b, &t).unwrap();
            assert_eq!(r.holds(ConditionId::RolDirect), Some(fixture.rol_holds()), "{fixture:?}");
            let gi_expected = fixture != FixturePair::RolFails;
            assert_eq!(r.holds(ConditionId::MbekhtaGi), Some(gi_expected), "{fixture:?}");
        }
    }
}
