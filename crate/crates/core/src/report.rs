use std::collections::BTreeMap;

use serde::Serialize;

use crate::tolerance::Tolerance;

/// Verdict and residual for each evaluated condition. Keys serialize as their
/// upper-case tags (`"ROL_DIRECT"`, `"T31_II"`, ...).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport<K: Ord> {
    pub verdicts: BTreeMap<K, bool>,
    pub residuals: BTreeMap<K, f64>,
    pub tolerance_used: Tolerance,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ranks: Option<RankSummary>,
}

/// Numerical ranks of the operands of a reverse-order-law evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RankSummary {
    pub a: usize,
    pub b: usize,
    pub ab: usize,
}

impl<K: Ord + Copy> ConditionReport<K> {
    pub fn new(tolerance: Tolerance) -> Self {
        ConditionReport {
            verdicts: BTreeMap::new(),
            residuals: BTreeMap::new(),
            tolerance_used: tolerance,
            ranks: None,
        }
    }

    pub fn insert(&mut self, key: K, holds: bool, residual: f64) {
        self.verdicts.insert(key, holds);
        self.residuals.insert(key, residual);
    }

    /// Records `residual <= eq_tol` as the verdict.
    pub fn insert_residual(&mut self, key: K, residual: f64) {
        let holds = residual <= self.tolerance_used.eq_tol;
        self.insert(key, holds, residual);
    }

    pub fn holds(&self, key: K) -> Option<bool> {
        self.verdicts.get(&key).copied()
    }

    pub fn residual(&self, key: K) -> Option<f64> {
        self.residuals.get(&key).copied()
    }

    pub fn all_hold(&self) -> bool {
        self.verdicts.values().all(|&v| v)
    }
}
