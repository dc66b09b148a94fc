//! Seeded fuzz campaigns. Every trial draws from its own generator seeded by
//! `trial_seed(seed, trial_index)`, so trials are independent of scheduling
//! and any single one can be replayed from its failure record.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::generate::{embedded_fixture_pair, regular_from_rng, rol_pair_from_rng, FixturePair, RolMode};
use crate::isometry::{
    conorm, generate_special, is_partial_isometry, partial_isometry_residuals, prop53_check, theorem54_check,
    Prop53Condition, SpecialKind, Theorem54Condition,
};
use crate::matrix::{relative_diff, ComplexMatrix, ZERO};
use crate::mp_hermitian::{
    algebraic_mph_residual, annihilator_spectrum_check, generate_mp_hermitian, generate_mp_hermitian_with,
    is_mp_hermitian, mp_hermitian_residual, theorem51_check, theorem52_decompose, MphOptions,
};
use crate::pinv::{
    formulation_residual, penrose_residuals, pinv_from_svd, pinv_from_svd_at, pinv_matrix, FormulationId,
};
use crate::random::{complex_gaussian, gaussian_matrix, random_rank, rng_from_seed, trial_seed, TrialRng};
use crate::reverse_order::{full_report, rol_intermediates, ConditionId};
use crate::svd::{operator_norm, svd};
use crate::tolerance::Tolerance;

pub const MAX_FUZZ_DIM: usize = 64;

/// Singular value range for the Penrose and formulation corpora.
pub const PENROSE_SV_RANGE: (f64, f64) = (0.1, 10.0);

/// Relative size of the perturbation that every formulation must detect.
pub const PERTURBATION: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Penrose,
    Formulations,
    Rol,
    Mph,
    Isometry,
    All,
}

impl Suite {
    pub const CONCRETE: [Suite; 5] = [Suite::Penrose, Suite::Formulations, Suite::Rol, Suite::Mph, Suite::Isometry];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Penrose => "penrose",
            Suite::Formulations => "formulations",
            Suite::Rol => "rol",
            Suite::Mph => "mph",
            Suite::Isometry => "isometry",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Suite::All]
            .into_iter()
            .chain(Suite::CONCRETE)
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown suite '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzConfig {
    pub suite: Suite,
    pub trials: u64,
    pub max_dim: usize,
    pub seed: u64,
    pub tolerance: Tolerance,
    /// Stop at the first failing trial (runs sequentially).
    #[serde(default)]
    pub stop_on_failure: bool,
    /// Keep the per-trial verdict maps in the report.
    #[serde(default)]
    pub record_verdicts: bool,
}

impl FuzzConfig {
    pub fn new(suite: Suite, trials: u64, max_dim: usize, seed: u64) -> Self {
        FuzzConfig {
            suite,
            trials,
            max_dim,
            seed,
            tolerance: Tolerance::default(),
            stop_on_failure: false,
            record_verdicts: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        validate_dim(self.max_dim)?;
        self.tolerance.validate()
    }
}

fn validate_dim(max_dim: usize) -> Result<()> {
    if !(1..=MAX_FUZZ_DIM).contains(&max_dim) {
        return Err(Error::InvalidArgument(format!(
            "max_dim must be in 1..={MAX_FUZZ_DIM}, got {max_dim}"
        )));
    }
    Ok(())
}

/// Everything needed to reproduce and inspect one violated property.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FailureRecord {
    pub suite: Suite,
    pub seed: u64,
    pub trial_index: u64,
    pub max_dim: usize,
    pub instance: String,
    pub condition_pair: String,
    pub residuals: BTreeMap<String, f64>,
    pub matrices: BTreeMap<String, ComplexMatrix>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialVerdicts {
    pub suite: Suite,
    pub trial_index: u64,
    pub instance: String,
    pub verdicts: BTreeMap<String, bool>,
}

/// Result of a single trial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialOutcome {
    pub suite: Suite,
    pub trial_index: u64,
    pub instance: String,
    pub failures: Vec<FailureRecord>,
    pub counters: Vec<&'static str>,
    pub verdicts: BTreeMap<String, bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FuzzReport {
    pub suite: Suite,
    pub seed: u64,
    pub max_dim: usize,
    pub tolerance: Tolerance,
    pub trials_run: u64,
    pub failures: Vec<FailureRecord>,
    /// Counters keyed `suite.name`, e.g. `rol.rol_false`.
    pub stats: BTreeMap<String, u64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub trial_verdicts: Vec<TrialVerdicts>,
    pub elapsed: f64,
}

impl FuzzReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn stat(&self, key: &str) -> u64 {
        self.stats.get(key).copied().unwrap_or(0)
    }
}

pub fn fuzz(config: &FuzzConfig) -> Result<FuzzReport> {
    config.validate()?;
    let start = Instant::now();
    let suites: Vec<Suite> = match config.suite {
        Suite::All => Suite::CONCRETE.to_vec(),
        s => vec![s],
    };

    let mut outcomes = Vec::new();
    let mut stopped = false;
    for suite in suites {
        if stopped {
            break;
        }
        let run = |i: u64| run_trial_unchecked(suite, config.seed, i, config.max_dim, &config.tolerance);
        if config.stop_on_failure {
            for i in 0..config.trials {
                let outcome = run(i);
                stopped = !outcome.failures.is_empty();
                outcomes.push(outcome);
                if stopped {
                    break;
                }
            }
        } else {
            outcomes.par_extend((0..config.trials).into_par_iter().map(run));
        }
    }

    let mut report = FuzzReport {
        suite: config.suite,
        seed: config.seed,
        max_dim: config.max_dim,
        tolerance: config.tolerance,
        trials_run: outcomes.len() as u64,
        failures: Vec::new(),
        stats: BTreeMap::new(),
        trial_verdicts: Vec::new(),
        elapsed: 0.0,
    };
    for outcome in outcomes {
        *report.stats.entry(format!("{}.trials", outcome.suite)).or_default() += 1;
        for counter in &outcome.counters {
            *report.stats.entry(format!("{}.{counter}", outcome.suite)).or_default() += 1;
        }
        if !outcome.failures.is_empty() {
            *report.stats.entry(format!("{}.failed_trials", outcome.suite)).or_default() += 1;
        }
        report.failures.extend(outcome.failures);
        if config.record_verdicts {
            report.trial_verdicts.push(TrialVerdicts {
                suite: outcome.suite,
                trial_index: outcome.trial_index,
                instance: outcome.instance,
                verdicts: outcome.verdicts,
            });
        }
    }
    report.elapsed = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Re-runs one trial exactly as `fuzz` ran it.
pub fn run_trial(suite: Suite, seed: u64, trial_index: u64, max_dim: usize, t: &Tolerance) -> Result<TrialOutcome> {
    if suite == Suite::All {
        return Err(Error::InvalidArgument("replay needs a concrete suite".into()));
    }
    validate_dim(max_dim)?;
    t.validate()?;
    Ok(run_trial_unchecked(suite, seed, trial_index, max_dim, t))
}

/// Replays the trial behind a failure record.
pub fn replay(record: &FailureRecord, t: &Tolerance) -> Result<TrialOutcome> {
    run_trial(record.suite, record.seed, record.trial_index, record.max_dim, t)
}

fn run_trial_unchecked(suite: Suite, seed: u64, trial_index: u64, max_dim: usize, t: &Tolerance) -> TrialOutcome {
    let mut trial = Trial {
        suite,
        seed,
        trial_index,
        max_dim,
        t,
        rng: rng_from_seed(trial_seed(seed, trial_index)),
        outcome: TrialOutcome {
            suite,
            trial_index,
            instance: String::new(),
            failures: Vec::new(),
            counters: Vec::new(),
            verdicts: BTreeMap::new(),
        },
    };
    let result = match suite {
        Suite::Penrose => trial.penrose(),
        Suite::Formulations => trial.formulations(),
        Suite::Rol => trial.rol(),
        Suite::Mph => trial.mph(),
        Suite::Isometry => trial.isometry(),
        Suite::All => unreachable!("expanded by the caller"),
    };
    if let Err(e) = result {
        trial.fail(format!("error: {e}"), &[], &[]);
    }
    trial.outcome
}

struct Trial<'a> {
    suite: Suite,
    seed: u64,
    trial_index: u64,
    max_dim: usize,
    t: &'a Tolerance,
    rng: TrialRng,
    outcome: TrialOutcome,
}

impl Trial<'_> {
    fn dim(&mut self) -> usize {
        self.rng.random_range(1..=self.max_dim)
    }

    fn fail(&mut self, pair: impl Into<String>, residuals: &[(&str, f64)], matrices: &[(&str, &ComplexMatrix)]) {
        self.outcome.failures.push(FailureRecord {
            suite: self.suite,
            seed: self.seed,
            trial_index: self.trial_index,
            max_dim: self.max_dim,
            instance: self.outcome.instance.clone(),
            condition_pair: pair.into(),
            residuals: residuals.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            matrices: matrices.iter().map(|(k, m)| (k.to_string(), (*m).clone())).collect(),
        });
    }

    fn count(&mut self, counter: &'static str) {
        self.outcome.counters.push(counter);
    }

    fn verdict(&mut self, key: impl Into<String>, value: bool) {
        self.outcome.verdicts.insert(key.into(), value);
    }

    fn penrose(&mut self) -> Result<()> {
        let (m, n) = (self.dim(), self.dim());
        let r = random_rank(m.min(n), &mut self.rng);
        let (lo, hi) = PENROSE_SV_RANGE;
        let a = regular_from_rng(m, n, r, lo, hi, &mut self.rng)?;
        self.outcome.instance = format!("{m}x{n} rank {r}");
        if r == 0 {
            self.count("rank_zero");
        }
        if r == m.min(n) {
            self.count("full_rank");
        }

        let f = svd(&a)?;
        let (x, rank) = pinv_from_svd(&f, self.t);
        if rank != r {
            self.fail("numerical_rank vs planted rank", &[("planted", r as f64), ("numerical", rank as f64)], &[("a", &a)]);
        }
        let res = penrose_residuals(&a, &x)?;
        self.verdict("penrose", res.all_within(self.t.eq_tol));
        if !res.all_within(self.t.eq_tol) {
            self.fail(
                "penrose equations",
                &[("r1", res.r1), ("r2", res.r2), ("r3", res.r3), ("r4", res.r4)],
                &[("a", &a), ("x", &x)],
            );
        }

        for (name, lhs, rhs) in [
            ("(a*)† vs (a†)*", pinv_matrix(&a.adjoint(), self.t)?, x.adjoint()),
            ("(a†)† vs a", pinv_matrix(&x, self.t)?, a.clone()),
        ] {
            let residual = relative_diff(&lhs, &rhs)?;
            self.verdict(name, residual <= self.t.eq_tol);
            if residual > self.t.eq_tol {
                self.fail(name, &[("residual", residual)], &[("a", &a)]);
            }
        }

        // ‖a‖·‖a†‖: the projections are products, see `rank_threshold_at`.
        let scale = if rank == 0 { 0.0 } else { f.sigma_max() / f.sigma[rank - 1] };
        for (name, proj) in [("(aa†)† vs aa†", &a * &x), ("(a†a)† vs a†a", &x * &a)] {
            let residual = relative_diff(&pinv_from_svd_at(&svd(&proj)?, self.t, scale).0, &proj)?;
            self.verdict(name, residual <= self.t.eq_tol);
            if residual > self.t.eq_tol {
                self.fail(name, &[("residual", residual)], &[("a", &a)]);
            }
        }
        Ok(())
    }

    fn formulations(&mut self) -> Result<()> {
        let (m, n) = (self.dim(), self.dim());
        let r = self.rng.random_range(1..=m.min(n));
        let (lo, hi) = PENROSE_SV_RANGE;
        let a = regular_from_rng(m, n, r, lo, hi, &mut self.rng)?;
        self.outcome.instance = format!("{m}x{n} rank {r}");
        let x = pinv_matrix(&a, self.t)?;
        let delta = gaussian_matrix(n, m, &mut self.rng);
        let delta = delta.scale_real(PERTURBATION * x.frobenius_norm() / delta.frobenius_norm());
        let perturbed = &x + &delta;

        for f in FormulationId::ALL {
            let exact = formulation_residual(&a, &x, f)?;
            let off = formulation_residual(&a, &perturbed, f)?;
            self.verdict(format!("{} exact", f.tag()), exact <= self.t.eq_tol);
            self.verdict(format!("{} perturbed", f.tag()), off <= self.t.eq_tol);
            if exact > self.t.eq_tol {
                self.fail(format!("{} vs pinv", f.tag()), &[("residual", exact)], &[("a", &a), ("x", &x)]);
            }
            if off <= self.t.eq_tol {
                self.fail(
                    format!("{} vs perturbed pinv", f.tag()),
                    &[("residual", off)],
                    &[("a", &a), ("x", &perturbed)],
                );
            }
        }
        Ok(())
    }

    fn rol(&mut self) -> Result<()> {
        const KINDS: u64 = 6;
        let mut expected = None;
        let (a, b) = match self.trial_index % KINDS {
            0 if self.max_dim >= 2 => {
                let fixture = FixturePair::ALL[self.rng.random_range(0..FixturePair::ALL.len())];
                let n = self.rng.random_range(2..=self.max_dim);
                self.outcome.instance = format!("fixture {} n={n}", serde_label(&fixture));
                expected = Some(fixture.rol_holds());
                embedded_fixture_pair(fixture, n, &mut self.rng)?
            }
            2 | 3 => {
                let mode = if self.trial_index % KINDS == 2 { RolMode::ForcedUnitary } else { RolMode::ForcedPinv };
                let n = self.dim();
                self.outcome.instance = format!("{} n={n}", serde_label(&mode));
                expected = Some(true);
                rol_pair_from_rng(n, mode, &mut self.rng)?
            }
            4 => {
                let n = self.dim();
                self.outcome.instance = format!("diagonal n={n}");
                expected = Some(true);
                let diag = |rng: &mut TrialRng| {
                    let d: Vec<_> =
                        (0..n).map(|_| if rng.random_bool(1.0 / 3.0) { ZERO } else { complex_gaussian(rng) }).collect();
                    ComplexMatrix::from_diag(&d)
                };
                (diag(&mut self.rng), diag(&mut self.rng))
            }
            5 => {
                let (m, k, n) = (self.dim(), self.dim(), self.dim());
                let (ra, rb) = (random_rank(m.min(k), &mut self.rng), random_rank(k.min(n), &mut self.rng));
                self.outcome.instance = format!("rectangular {m}x{k} rank {ra} by {k}x{n} rank {rb}");
                let (lo, hi) = crate::harness::generate::ROL_SV_RANGE;
                let a = regular_from_rng(m, k, ra, lo, hi, &mut self.rng)?;
                let b = regular_from_rng(k, n, rb, lo, hi, &mut self.rng)?;
                (a, b)
            }
            _ => {
                let n = self.dim();
                self.outcome.instance = format!("random n={n}");
                rol_pair_from_rng(n, RolMode::Random, &mut self.rng)?
            }
        };

        let report = full_report(&a, &b, self.t)?;
        for c in ConditionId::ALL {
            self.verdict(c.tag(), report.holds(c) == Some(true));
        }
        let holds = |c| report.holds(c) == Some(true);
        let residual = |c| report.residual(c).unwrap_or(f64::NAN);
        let rol = holds(ConditionId::RolDirect);
        self.count(if rol { "rol_true" } else { "rol_false" });

        for c in ConditionId::ROL_EQUIVALENT {
            if c != ConditionId::RolDirect && holds(c) != rol {
                self.fail(
                    format!("ROL_DIRECT vs {}", c.tag()),
                    &[("ROL_DIRECT", residual(ConditionId::RolDirect)), (&c.tag(), residual(c))],
                    &[("a", &a), ("b", &b)],
                );
            }
        }
        let gi = holds(ConditionId::MbekhtaGi);
        for c in [ConditionId::MbekhtaComm, ConditionId::MbekhtaIdem] {
            if holds(c) != gi {
                self.fail(
                    format!("MBEKHTA_GI vs {}", c.tag()),
                    &[("MBEKHTA_GI", residual(ConditionId::MbekhtaGi)), (&c.tag(), residual(c))],
                    &[("a", &a), ("b", &b)],
                );
            }
        }
        if gi {
            self.count("mbekhta_gi_true");
        }
        if gi && !rol {
            self.count("gi_without_rol");
        }
        if rol && !gi {
            self.fail(
                "ROL_DIRECT implies MBEKHTA_GI",
                &[("ROL_DIRECT", residual(ConditionId::RolDirect)), ("MBEKHTA_GI", residual(ConditionId::MbekhtaGi))],
                &[("a", &a), ("b", &b)],
            );
        }
        if holds(ConditionId::T31Ii) && !holds(ConditionId::R35Comm) {
            self.count("t31_ii_without_r35_comm");
        }
        if let Some(want) = expected {
            if rol != want {
                self.fail(
                    format!("constructed pair expects ROL_DIRECT={want}"),
                    &[("ROL_DIRECT", residual(ConditionId::RolDirect))],
                    &[("a", &a), ("b", &b)],
                );
            }
        }

        if holds(ConditionId::T31Ii) {
            let it = rol_intermediates(&a, &b, self.t)?;
            let (p, q, r, s) = (&it.p, &it.q, &it.r, &it.s);
            let scaled = |lhs: ComplexMatrix, rhs: ComplexMatrix, norms: f64| {
                (&lhs - &rhs).frobenius_norm() / norms.max(1.0)
            };
            let nrm = |m: &ComplexMatrix| m.frobenius_norm();
            let spqp = scaled(&(&(s * p) * q) * p, q * p, nrm(s) * nrm(p) * nrm(q) * nrm(p));
            let srsp = scaled(&(&(s * r) * s) * p, s * r, nrm(s) * nrm(r) * nrm(s) * nrm(p));
            let bound = 10.0 * self.t.eq_tol;
            if spqp > bound || srsp > bound {
                self.fail(
                    "T31_II implies spqp = qp and srsp = sr",
                    &[("spqp", spqp), ("srsp", srsp)],
                    &[("a", &a), ("b", &b)],
                );
            }
        }
        Ok(())
    }

    fn mph(&mut self) -> Result<()> {
        const KINDS: u64 = 4;
        let n = self.dim();
        let kind = self.trial_index % KINDS;
        let k = self.rng.random_range(0..=n);
        let sub_seed: u64 = self.rng.random();
        let (a, expected) = match kind {
            0 => {
                self.outcome.instance = format!("generated n={n} k={k}");
                (generate_mp_hermitian(n, k, sub_seed)?, Some(true))
            }
            1 => {
                let (lo, hi) = PENROSE_SV_RANGE;
                self.outcome.instance = format!("random n={n} rank {k}");
                (regular_from_rng(n, n, k, lo, hi, &mut self.rng)?, None)
            }
            2 => {
                self.outcome.instance = format!("perturbed n={n} k={k}");
                let base = generate_mp_hermitian(n, k, sub_seed)?;
                let delta = gaussian_matrix(n, n, &mut self.rng);
                let size = PERTURBATION * base.frobenius_norm().max(1.0);
                (&base + &delta.scale_real(size / delta.frobenius_norm()), Some(false))
            }
            _ => {
                self.outcome.instance = format!("normal generated n={n} k={k}");
                let opts = MphOptions { cond_cap: 1.0, inertia: None };
                (generate_mp_hermitian_with(n, k, sub_seed, &opts)?, Some(true))
            }
        };

        let mph = is_mp_hermitian(&a, self.t)?;
        self.count(if mph { "mph_true" } else { "mph_false" });
        self.verdict("is_mp_hermitian", mph);
        let pair = |name: &str| format!("is_mp_hermitian vs {name}");

        if algebraic_mph_residual(&a)? <= self.t.eq_tol && !mph || algebraic_mph_residual(&a)? > self.t.eq_tol && mph {
            self.fail(
                pair("algebraic_mph_check"),
                &[("definition", mp_hermitian_residual(&a, self.t)?), ("algebraic", algebraic_mph_residual(&a)?)],
                &[("a", &a)],
            );
        }
        let adjoint = is_mp_hermitian(&a.adjoint(), self.t)?;
        if adjoint != mph {
            self.fail(pair("adjoint"), &[], &[("a", &a)]);
        }
        let t51 = theorem51_check(&a, self.t)?;
        self.verdict("theorem51", t51.all_hold());
        if t51.all_hold() != mph {
            let residuals: Vec<(String, f64)> = t51
                .residuals
                .iter()
                .map(|(c, r)| (serde_label(c), *r))
                .collect();
            let residuals: Vec<(&str, f64)> = residuals.iter().map(|(k, v)| (k.as_str(), *v)).collect();
            self.fail(pair("theorem51 conjunction"), &residuals, &[("a", &a)]);
        }
        if let Some(want) = expected {
            if mph != want {
                self.fail(
                    format!("constructed matrix expects is_mp_hermitian={want}"),
                    &[("definition", mp_hermitian_residual(&a, self.t)?)],
                    &[("a", &a)],
                );
            }
        }

        if mph {
            if !annihilator_spectrum_check(&a, self.t)? {
                self.fail("is_mp_hermitian implies a^3 = a", &[], &[("a", &a)]);
            }
            let norm = operator_norm(&a)?;
            for power in 2..=5u32 {
                let ap = a.pow(power)?;
                // Forming a^k rounds at the scale ‖a‖^k, not ‖a^k‖.
                let amplification = (norm.powi(power as i32) / operator_norm(&ap)?).max(1.0);
                let t = Tolerance::new(self.t.rank_tol_factor * amplification, self.t.eq_tol)?;
                if !is_mp_hermitian(&ap, &t)? {
                    self.fail(
                        format!("is_mp_hermitian implies a^{power} is"),
                        &[("definition", mp_hermitian_residual(&ap, &t)?), ("amplification", amplification)],
                        &[("a", &a)],
                    );
                }
            }
            let d = theorem52_decompose(&a, self.t)?;
            let worst = d
                .reconstruction_residual
                .max(d.orthogonality_residual)
                .max(d.involution_residual / 1f64.max(d.h2.dim as f64).sqrt());
            if worst > self.t.eq_tol || d.h1.dim + d.h2.dim != n {
                self.fail(
                    "theorem52 decomposition",
                    &[
                        ("reconstruction", d.reconstruction_residual),
                        ("orthogonality", d.orthogonality_residual),
                        ("involution", d.involution_residual),
                    ],
                    &[("a", &a)],
                );
            }
        }
        Ok(())
    }

    fn isometry(&mut self) -> Result<()> {
        const KINDS: u64 = 5;
        let n = self.dim();
        let sub_seed: u64 = self.rng.random();
        let kind = self.trial_index % KINDS;
        let (a, family) = match kind {
            0 => {
                let r = random_rank(n, &mut self.rng);
                let (lo, hi) = PENROSE_SV_RANGE;
                self.outcome.instance = format!("random n={n} rank {r}");
                (regular_from_rng(n, n, r, lo, hi, &mut self.rng)?, None)
            }
            1 => {
                let rank = random_rank(n, &mut self.rng);
                self.outcome.instance = format!("partial isometry n={n} rank {rank}");
                (generate_special(&SpecialKind::PartialIsometry { rank }, n, sub_seed)?, Some(kind))
            }
            2 => {
                let positive = self.rng.random_range(0..=n);
                let negative = self.rng.random_range(0..=n - positive);
                self.outcome.instance = format!("hermitian partial isometry n={n} +{positive} -{negative}");
                let kind_spec = SpecialKind::HermitianPartialIsometry { positive, negative };
                (generate_special(&kind_spec, n, sub_seed)?, Some(kind))
            }
            3 => {
                let k = self.rng.random_range(0..=n);
                self.outcome.instance = format!("mp-hermitian n={n} k={k}");
                (generate_mp_hermitian(n, k, sub_seed)?, None)
            }
            _ => {
                let count = random_rank(n, &mut self.rng);
                let sigma: Vec<f64> = (0..count)
                    .map(|_| if self.rng.random_bool(0.5) { 1.0 } else { self.rng.random_range(0.5..2.0) })
                    .collect();
                self.outcome.instance = format!("prescribed singular values {sigma:?}");
                (generate_special(&SpecialKind::PrescribedSingularValues { sigma }, n, sub_seed)?, None)
            }
        };

        let pi = is_partial_isometry(&a, self.t)?;
        self.verdict("partial_isometry", pi);
        if is_partial_isometry(&a.adjoint(), self.t)? != pi {
            self.fail("partial isometry vs adjoint partial isometry", &[], &[("a", &a)]);
        }
        let pir = partial_isometry_residuals(&a, self.t)?;
        for (name, residual) in [("a*a idempotent", pir.gram_idempotent), ("aa* idempotent", pir.cogram_idempotent)] {
            if (residual <= self.t.eq_tol) != pi {
                self.fail(
                    format!("a† = a* vs {name}"),
                    &[("pinv_vs_adjoint", pir.pinv_vs_adjoint), (name, residual)],
                    &[("a", &a)],
                );
            }
        }

        let t54 = theorem54_check(&a, self.t)?;
        let (lhs, rhs) = (t54.holds(Theorem54Condition::Lhs) == Some(true), t54.holds(Theorem54Condition::Rhs) == Some(true));
        self.verdict("theorem54_lhs", lhs);
        self.verdict("theorem54_rhs", rhs);
        if lhs && rhs {
            self.count("theorem54_both_true");
        } else if !lhs && !rhs {
            self.count("theorem54_both_false");
        }
        if t54.holds(Theorem54Condition::Consistent) != Some(true) {
            let residuals: Vec<(String, f64)> = t54.residuals.iter().map(|(c, r)| (serde_label(c), *r)).collect();
            let residuals: Vec<(&str, f64)> = residuals.iter().map(|(k, v)| (k.as_str(), *v)).collect();
            self.fail("theorem54 lhs vs rhs", &residuals, &[("a", &a)]);
        }
        if family == Some(2) && !(lhs && rhs) {
            self.fail("hermitian partial isometry expects both theorem54 sides", &[], &[("a", &a)]);
        }

        if a.is_zero() {
            self.count("zero");
            return Ok(());
        }
        let c = conorm(&a, self.t)?;
        let pinv_norm = operator_norm(&pinv_matrix(&a, self.t)?)?;
        let product = c * pinv_norm;
        if (product - 1.0).abs() > self.t.eq_tol {
            self.fail("c(a) * ||a†|| vs 1", &[("conorm", c), ("pinv_norm", pinv_norm)], &[("a", &a)]);
        }
        let p53 = prop53_check(&a, self.t)?;
        let p53_lhs = p53.holds(Prop53Condition::PartialIsometry) == Some(true);
        self.verdict("prop53_lhs", p53_lhs);
        self.count(if p53_lhs { "prop53_true" } else { "prop53_false" });
        if p53.holds(Prop53Condition::Consistent) != Some(true) {
            let residuals: Vec<(String, f64)> = p53.residuals.iter().map(|(c, r)| (serde_label(c), *r)).collect();
            let residuals: Vec<(&str, f64)> = residuals.iter().map(|(k, v)| (k.as_str(), *v)).collect();
            self.fail("prop53 lhs vs rhs", &residuals, &[("a", &a)]);
        }
        if family == Some(1) && !p53_lhs {
            self.fail("generated partial isometry expects a† = a*", &[], &[("a", &a)]);
        }
        Ok(())
    }
}

fn serde_label<T: Serialize>(value: &T) -> String {
    match serde_json::to_value(value) {
        Ok(serde_json::Value::String(s)) => s,
        Ok(other) => other.to_string(),
        Err(_) => String::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_trials_rejected() {
        assert!(fuzz(&FuzzConfig::new(Suite::All, 0, 4, 1)).is_err());
        assert!(fuzz(&FuzzConfig::new(Suite::Penrose, 1, 0, 1)).is_err());
        assert!(fuzz(&FuzzConfig::new(Suite::Penrose, 1, 65, 1)).is_err());
    }

    #[test]
    fn small_penrose_campaign_is_clean() {
        let report = fuzz(&FuzzConfig::new(Suite::Penrose, 100, 8, 1)).unwrap();
        assert_eq!(report.trials_run, 100);
        assert!(report.passed(), "{:#?}", report.failures);
    }

    #[test]
    fn suite_names_round_trip() {
        for s in [Suite::All].into_iter().chain(Suite::CONCRETE) {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
            assert_eq!(serde_label(&s), s.name());
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn replay_reproduces_outcome() {
        let t = Tolerance::default();
        for suite in Suite::CONCRETE {
            let first = run_trial(suite, 9, 3, 6, &t).unwrap();
            let second = run_trial(suite, 9, 3, 6, &t).unwrap();
            assert_eq!(first, second);
        }
    }
}
