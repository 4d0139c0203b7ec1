use std::collections::BTreeMap;

use crate::sb_plan::{GroupKey, MeasurementPlan};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ShotAllocation {
    /// Target sampling error, when the allocation was derived from one.
    pub epsilon: Option<f64>,
    pub per_group: BTreeMap<GroupKey, u64>,
    pub total: u64,
}

impl ShotAllocation {
    pub fn shots_for(&self, key: GroupKey) -> Option<u64> {
        self.per_group.get(&key).copied()
    }

    fn from_map(epsilon: Option<f64>, per_group: BTreeMap<GroupKey, u64>) -> Self {
        let total = per_group.values().sum();
        Self {
            epsilon,
            per_group,
            total,
        }
    }
}

/// `(1/ε²)·(Σ_i max_z |c_i|)²`, the closed-form upper bound on the optimal total.
pub fn shot_bound(plan: &MeasurementPlan, epsilon: f64) -> Result<f64> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    let sum: f64 = plan.groups.iter().map(|g| g.max_abs_coeff()).sum();
    Ok(sum * sum / (epsilon * epsilon))
}

/// Ceiling that ignores rounding noise just above an integer.
fn ceil_rounded(v: f64) -> f64 {
    (v * (1.0 - 4.0 * f64::EPSILON)).ceil()
}

/// Lagrange-optimal allocation with the variance bound `σ_i ≤ max_z |c_i|`:
/// `m_i = ⌈(σ_i / ε²)·Σ_j σ_j⌉`, at least one shot per group.
///
/// With this allocation `Σ σ_i² / m_i ≤ ε²`.
pub fn allocate_shots(plan: &MeasurementPlan, epsilon: f64) -> Result<ShotAllocation> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    if plan.groups.is_empty() {
        return Err(Error::InvalidShots(
            "cannot allocate shots for an empty plan".into(),
        ));
    }
    let sum: f64 = plan.groups.iter().map(|g| g.max_abs_coeff()).sum();
    let scale = sum / (epsilon * epsilon);
    let per_group = plan
        .groups
        .iter()
        .map(|g| {
            let m = ceil_rounded(g.max_abs_coeff() * scale);
            if !m.is_finite() || m > u64::MAX as f64 {
                return Err(Error::InvalidShots(format!("shot count {m} overflows")));
            }
            Ok((g.key(), (m as u64).max(1)))
        })
        .collect::<Result<BTreeMap<_, _>>>()?;
    Ok(ShotAllocation::from_map(Some(epsilon), per_group))
}

/// Same shot count for every circuit.
pub fn uniform_shots(plan: &MeasurementPlan, shots_per_circuit: u64) -> Result<ShotAllocation> {
    if shots_per_circuit == 0 {
        return Err(Error::InvalidShots(
            "shots per circuit must be at least 1".into(),
        ));
    }
    let per_group = plan
        .groups
        .iter()
        .map(|g| (g.key(), shots_per_circuit))
        .collect();
    Ok(ShotAllocation::from_map(None, per_group))
}
