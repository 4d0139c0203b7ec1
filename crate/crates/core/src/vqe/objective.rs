use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::qsim::{
    exact_group_expectation, exact_plan_expectation, ghz_distribution, sample_outcomes,
    sampled_group_expectation, AnsatzCircuit, ParametricCircuit, Statevector,
};
use crate::rng::sampling_stream;
use crate::sb_plan::{
    allocate_shots, ghz_descriptor, uniform_shots, MeasurementPlan, ShotAllocation,
};
use crate::tb_model::{fold, SparseHermitian};
use crate::{Error, Result};

/// How measurement shots are budgeted in sampled mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShotPolicy {
    /// Optimal allocation for a target sampling error.
    Epsilon(f64),
    /// The same number of shots on every circuit.
    PerCircuit(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum CostMode {
    Exact,
    Sampled {
        cost_shots: ShotAllocation,
        energy_shots: ShotAllocation,
        seed: u64,
    },
}

/// The folded-spectrum cost `⟨ψ|(H - ωI)²|ψ⟩` and the plan for `⟨ψ|H|ψ⟩`.
#[derive(Debug, Clone)]
pub struct FoldedObjective {
    pub omega: f64,
    pub folded: SparseHermitian,
    pub plan: MeasurementPlan,
    pub h_plan: MeasurementPlan,
    pub mode: CostMode,
}

/// Sampling draws at or above this index belong to parameter-shift evaluations; plain cost
/// and energy evaluations use `2d` and `2d + 1` for their draw `d`.
pub const SHIFT_DRAW_BASE: u64 = 1 << 61;

/// Signed eigenvalue estimate recovered from a converged cost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignedEnergy {
    pub energy: f64,
    pub cost: f64,
    /// `⟨ψ|H|ψ⟩`, whose offset from `ω` fixes the sign.
    pub mean_energy: f64,
    /// Set when a sampled cost came out negative and was clamped to zero.
    pub clamped: bool,
}

impl FoldedObjective {
    pub fn exact(h: &SparseHermitian, omega: f64) -> Self {
        let folded = fold(h, omega);
        Self {
            omega,
            plan: MeasurementPlan::from_hamiltonian(&folded),
            h_plan: MeasurementPlan::from_hamiltonian(h),
            folded,
            mode: CostMode::Exact,
        }
    }

    pub fn sampled(h: &SparseHermitian, omega: f64, policy: ShotPolicy, seed: u64) -> Result<Self> {
        let mut obj = Self::exact(h, omega);
        let alloc = |plan: &MeasurementPlan| match policy {
            ShotPolicy::Epsilon(eps) => allocate_shots(plan, eps),
            ShotPolicy::PerCircuit(k) => uniform_shots(plan, k),
        };
        obj.mode = CostMode::Sampled {
            cost_shots: alloc(&obj.plan)?,
            energy_shots: alloc(&obj.h_plan)?,
            seed,
        };
        Ok(obj)
    }

    pub fn n_qubits(&self) -> usize {
        self.folded.n_qubits()
    }

    /// Shots spent on one cost evaluation (zero in exact mode).
    pub fn shots_per_evaluation(&self) -> u64 {
        match &self.mode {
            CostMode::Exact => 0,
            CostMode::Sampled { cost_shots, .. } => cost_shots.total,
        }
    }

    fn check_state(&self, psi: &Statevector) -> Result<()> {
        if psi.n_qubits() != self.n_qubits() {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits(),
                got: psi.n_qubits(),
            });
        }
        Ok(())
    }

    /// Cost of a prepared state. `draw` selects the sampling substream in sampled mode.
    pub fn cost_of_state(&self, psi: &Statevector, draw: u64) -> Result<f64> {
        self.check_state(psi)?;
        match &self.mode {
            CostMode::Exact => exact_plan_expectation(psi, &self.plan),
            CostMode::Sampled {
                cost_shots, seed, ..
            } => sampled_plan_expectation(psi, &self.plan, cost_shots, *seed, 2 * draw),
        }
    }

    /// `⟨ψ|H|ψ⟩` from the Hamiltonian plan.
    pub fn energy_of_state(&self, psi: &Statevector, draw: u64) -> Result<f64> {
        self.check_state(psi)?;
        match &self.mode {
            CostMode::Exact => exact_plan_expectation(psi, &self.h_plan),
            CostMode::Sampled {
                energy_shots, seed, ..
            } => sampled_plan_expectation(psi, &self.h_plan, energy_shots, *seed, 2 * draw + 1),
        }
    }

    pub fn evaluate_cost(&self, ansatz: &AnsatzCircuit, theta: &[f64]) -> Result<f64> {
        self.cost_of_state(&crate::qsim::apply_ansatz(ansatz, theta)?, 0)
    }

    /// Exact cost and its gradient with respect to every circuit parameter.
    pub fn exact_cost_and_gradient(
        &self,
        circuit: &ParametricCircuit,
        theta: &[f64],
    ) -> Result<(f64, Vec<f64>)> {
        circuit.expectation_and_gradient(&self.folded, theta)
    }

    /// `∂C/∂θ_p = [C(θ + π/2·e_p) - C(θ - π/2·e_p)] / 2`, exact for circuits whose every
    /// parameter drives a single Pauli rotation. In sampled mode each of the `2P` costs is
    /// an independent draw keyed on `draw`.
    pub fn parameter_shift_gradient(
        &self,
        circuit: &ParametricCircuit,
        theta: &[f64],
        draw: u64,
    ) -> Result<Vec<f64>> {
        let n = theta.len() as u64;
        let shift = std::f64::consts::FRAC_PI_2;
        (0..theta.len())
            .into_par_iter()
            .map(|p| {
                let mut shifted = theta.to_vec();
                let mut side = |sign: f64, k: u64| -> Result<f64> {
                    shifted[p] = theta[p] + sign * shift;
                    let psi = circuit.run(&shifted)?;
                    match &self.mode {
                        CostMode::Exact => exact_plan_expectation(&psi, &self.plan),
                        CostMode::Sampled {
                            cost_shots, seed, ..
                        } => {
                            let stream = SHIFT_DRAW_BASE + draw * 2 * n + 2 * p as u64 + k;
                            sampled_plan_expectation(&psi, &self.plan, cost_shots, *seed, stream)
                        }
                    }
                };
                let plus = side(1.0, 0)?;
                let minus = side(-1.0, 1)?;
                Ok(0.5 * (plus - minus))
            })
            .collect()
    }

    /// `ω + s·√cost` with `s = sign(⟨H⟩ - ω)`.
    pub fn resolve_sign(&self, psi: &Statevector, draw: u64) -> Result<SignedEnergy> {
        let raw = self.cost_of_state(psi, draw)?;
        let mean_energy = self.energy_of_state(psi, draw)?;
        let clamped = raw < 0.0 && matches!(self.mode, CostMode::Sampled { .. });
        let cost = raw.max(0.0);
        let s = if mean_energy >= self.omega { 1.0 } else { -1.0 };
        Ok(SignedEnergy {
            energy: self.omega + s * cost.sqrt(),
            cost,
            mean_energy,
            clamped,
        })
    }
}

/// Sum of sampled group estimates. Each circuit draws from its own stream, so the result
/// does not depend on thread scheduling.
pub fn sampled_plan_expectation(
    psi: &Statevector,
    plan: &MeasurementPlan,
    shots: &ShotAllocation,
    seed: u64,
    draw: u64,
) -> Result<f64> {
    let parts: Vec<f64> = plan
        .groups
        .par_iter()
        .enumerate()
        .map(|(i, g)| {
            let m = shots.shots_for(g.key()).ok_or_else(|| {
                Error::InvalidShots(format!(
                    "no shots allocated to group x={:#x} {}",
                    g.x, g.part
                ))
            })?;
            let dist = ghz_distribution(psi, &ghz_descriptor(g))?;
            let tally = sample_outcomes(&dist, m, &mut sampling_stream(seed, draw, i as u64))?;
            sampled_group_expectation(&tally, g)
        })
        .collect::<Result<_>>()?;
    Ok(parts.iter().sum())
}

/// Per-group exact contributions, in plan order.
pub fn group_contributions(psi: &Statevector, plan: &MeasurementPlan) -> Result<Vec<f64>> {
    plan.groups
        .iter()
        .map(|g| exact_group_expectation(psi, g))
        .collect()
}
