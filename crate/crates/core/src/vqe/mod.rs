//! Folded-spectrum VQE and the two-stage band-gap workflow.

mod adam;
mod objective;

use std::io::Write;

use serde::Serialize;

pub use adam::{Adam, GradientMode, OptimizerConfig};
pub use objective::{
    group_contributions, sampled_plan_expectation, CostMode, FoldedObjective, ShotPolicy,
    SignedEnergy, SHIFT_DRAW_BASE,
};

use crate::qsim::AnsatzCircuit;
use crate::rng::{substream, Substream};
use crate::tb_model::{exact_diagonalize, SparseHermitian};
use crate::{Error, Result};

/// Default ansatz depth for the 1x1x2, 1x2x2 and 2x2x2 supercells.
pub fn default_layers(cells: usize) -> usize {
    match cells {
        0..=2 => 4,
        3..=4 => 7,
        _ => 8,
    }
}

/// Uniform in `[-π, π)`.
pub fn random_parameters<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    use std::f64::consts::PI;
    (0..n).map(|_| rng.random_range(-PI..PI)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub cost: f64,
    pub gradient_norm: f64,
    pub shots: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VqeRun {
    pub theta: Vec<f64>,
    pub trace: Vec<TraceRow>,
    pub converged: bool,
}

impl VqeRun {
    pub fn final_cost(&self) -> f64 {
        self.trace.last().map_or(f64::NAN, |r| r.cost)
    }

    pub fn best_cost(&self) -> f64 {
        self.trace
            .iter()
            .map(|r| r.cost)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn shots_used(&self) -> u64 {
        self.trace.iter().map(|r| r.shots).sum()
    }
}

/// ADAM on the folded cost. The recorded cost follows the objective's mode; the gradient is
/// the exact adjoint one or a parameter shift, per `config.gradient`.
///
/// The stopping rule looks at the best cost seen so far: the run ends once it has improved
/// by less than the band over the last `convergence_window` iterations. The returned
/// parameters are the best ones visited. Trace row `k` holds the cost after `k` updates.
pub fn run_vqe(
    obj: &FoldedObjective,
    ansatz: &AnsatzCircuit,
    config: &OptimizerConfig,
    theta_init: &[f64],
) -> Result<VqeRun> {
    if ansatz.n_qubits != obj.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: obj.n_qubits(),
            got: ansatz.n_qubits,
        });
    }
    if theta_init.len() != ansatz.n_params() {
        return Err(Error::ArityMismatch {
            expected: ansatz.n_params(),
            got: theta_init.len(),
        });
    }
    let circuit = ansatz.compile();
    let mut theta = theta_init.to_vec();
    let mut best_theta = theta.clone();
    let mut adam = Adam::new(*config, theta.len());
    let mut best_so_far: Vec<f64> = Vec::new();
    let mut trace = Vec::new();
    let mut converged = false;
    let shots_per_iteration = match config.gradient {
        GradientMode::Adjoint => obj.shots_per_evaluation(),
        GradientMode::ParameterShift => obj.shots_per_evaluation() * (1 + 2 * theta.len() as u64),
    };
    for iteration in 0..=config.max_iterations {
        let (cost, grad) = match (config.gradient, &obj.mode) {
            (GradientMode::Adjoint, CostMode::Exact) => {
                obj.exact_cost_and_gradient(&circuit, &theta)?
            }
            (GradientMode::Adjoint, CostMode::Sampled { .. }) => (
                obj.cost_of_state(&circuit.run(&theta)?, iteration as u64)?,
                obj.exact_cost_and_gradient(&circuit, &theta)?.1,
            ),
            (GradientMode::ParameterShift, _) => (
                obj.cost_of_state(&circuit.run(&theta)?, iteration as u64)?,
                obj.parameter_shift_gradient(&circuit, &theta, iteration as u64)?,
            ),
        };
        if !cost.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFiniteCost { iteration });
        }
        let gradient_norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        trace.push(TraceRow {
            iteration,
            cost,
            gradient_norm,
            shots: shots_per_iteration,
        });
        let best = best_so_far.last().copied().unwrap_or(f64::INFINITY);
        if cost < best {
            best_theta.clone_from(&theta);
        }
        best_so_far.push(cost.min(best));
        log::trace!("iteration {iteration}: cost {cost:.6e}, |grad| {gradient_norm:.3e}");
        if config.has_converged(&best_so_far) || gradient_norm == 0.0 {
            converged = true;
            break;
        }
        if iteration == config.max_iterations {
            break;
        }
        adam.step(&mut theta, &grad);
    }
    Ok(VqeRun {
        theta: best_theta,
        trace,
        converged,
    })
}

/// Options of the two-stage workflow.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkflowOptions {
    pub optimizer: OptimizerConfig,
    /// `None` for exact mode.
    pub shots: Option<ShotPolicy>,
    pub seed: u64,
    /// Diagonalise `H` and attach reference values.
    pub validate_ed: bool,
    /// Stage-1 reference energy.
    pub omega: f64,
}

impl Default for WorkflowOptions {
    fn default() -> Self {
        Self {
            optimizer: OptimizerConfig::default(),
            shots: None,
            seed: 0,
            validate_ed: false,
            omega: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageResult {
    pub omega: f64,
    pub energy: f64,
    pub final_cost: f64,
    pub mean_energy: f64,
    pub iterations: usize,
    pub converged: bool,
    pub cost_clamped: bool,
    pub circuit_count: usize,
    pub shots_per_evaluation: u64,
    pub shots_used: u64,
    #[serde(skip)]
    pub trace: Vec<TraceRow>,
    #[serde(skip)]
    pub theta: Vec<f64>,
}

/// Exact-diagonalisation reference for one stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StageReference {
    pub nearest_eigenvalue: f64,
    pub folded_minimum: f64,
    /// Gap between the two lowest distinct folded eigenvalues.
    pub folded_gap: f64,
    /// `folded_gap` falls below the convergence band.
    pub near_degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdReference {
    /// Largest eigenvalue below zero.
    pub e_vbm: f64,
    /// Smallest eigenvalue at or above zero.
    pub e_cbm: f64,
    pub gap: f64,
    pub stages: Vec<StageReference>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandGapResult {
    pub e_vbm: f64,
    pub e_cbm: f64,
    pub gap: f64,
    pub stages: Vec<StageResult>,
    pub warnings: Vec<String>,
    pub ed: Option<EdReference>,
}

impl BandGapResult {
    pub fn total_shots(&self) -> u64 {
        self.stages.iter().map(|s| s.shots_used).sum()
    }
}

fn build_objective(
    h: &SparseHermitian,
    omega: f64,
    opts: &WorkflowOptions,
    stage: u64,
) -> Result<FoldedObjective> {
    match opts.shots {
        None => Ok(FoldedObjective::exact(h, omega)),
        Some(policy) => FoldedObjective::sampled(h, omega, policy, opts.seed.wrapping_add(stage)),
    }
}

fn run_stage(
    h: &SparseHermitian,
    omega: f64,
    ansatz: &AnsatzCircuit,
    opts: &WorkflowOptions,
    stage: u64,
    rng: &mut crate::rng::Rng,
) -> Result<StageResult> {
    let obj = build_objective(h, omega, opts, stage)?;
    let theta0 = random_parameters(ansatz.n_params(), rng);
    let run = run_vqe(&obj, ansatz, &opts.optimizer, &theta0)?;
    let psi = crate::qsim::apply_ansatz(ansatz, &run.theta)?;
    let signed = obj.resolve_sign(&psi, run.trace.len() as u64)?;
    log::info!(
        "stage {} (omega = {omega:.6}): energy {:.6} after {} iterations",
        stage + 1,
        signed.energy,
        run.trace.len()
    );
    Ok(StageResult {
        omega,
        energy: signed.energy,
        final_cost: signed.cost,
        mean_energy: signed.mean_energy,
        iterations: run.trace.len(),
        converged: run.converged,
        cost_clamped: signed.clamped,
        circuit_count: obj.plan.circuit_count(),
        shots_per_evaluation: obj.shots_per_evaluation(),
        shots_used: run.shots_used(),
        trace: run.trace,
        theta: run.theta,
    })
}

fn stage_reference(values: &[f64], omega: f64, band: f64) -> StageReference {
    // Kramers pairs and other exact multiplets count once.
    let mut distinct: Vec<f64> = Vec::new();
    for &v in values {
        match distinct.last() {
            Some(&last) if (v - last).abs() <= 1e-9 * v.abs().max(1.0) => {}
            _ => distinct.push(v),
        }
    }
    let mut folded: Vec<f64> = distinct.iter().map(|l| (l - omega) * (l - omega)).collect();
    folded.sort_by(f64::total_cmp);
    let nearest = distinct
        .iter()
        .copied()
        .min_by(|a, b| (a - omega).abs().total_cmp(&(b - omega).abs()))
        .unwrap_or(f64::NAN);
    let folded_gap = if folded.len() > 1 {
        folded[1] - folded[0]
    } else {
        f64::INFINITY
    };
    StageReference {
        nearest_eigenvalue: nearest,
        folded_minimum: folded.first().copied().unwrap_or(f64::NAN),
        folded_gap,
        near_degenerate: folded_gap < band,
    }
}

/// One folded-spectrum run at a fixed reference energy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedOmegaResult {
    pub stage: StageResult,
    pub warnings: Vec<String>,
    pub ed: Option<StageReference>,
}

/// Finds the eigenvalue nearest `opts.omega` with a single stage.
pub fn fixed_omega_run(
    h: &SparseHermitian,
    ansatz: &AnsatzCircuit,
    opts: &WorkflowOptions,
) -> Result<FixedOmegaResult> {
    let mut rng = substream(opts.seed, Substream::Init);
    let stage = run_stage(h, opts.omega, ansatz, opts, 0, &mut rng)?;
    let mut warnings = Vec::new();
    if !stage.converged {
        warnings.push("hit the iteration limit before converging".to_string());
    }
    if stage.cost_clamped {
        warnings.push("sampled cost was negative and clamped to zero".to_string());
    }
    let ed = if opts.validate_ed {
        let eig = exact_diagonalize(h, false)?;
        let r = stage_reference(&eig.values, opts.omega, opts.optimizer.convergence_band);
        if r.near_degenerate {
            warnings.push(
                "two folded eigenvalues lie within the convergence band; either may be returned"
                    .to_string(),
            );
        }
        Some(r)
    } else {
        None
    };
    for w in &warnings {
        log::warn!("{w}");
    }
    Ok(FixedOmegaResult {
        stage,
        warnings,
        ed,
    })
}

/// Stage-2 runs allowed before accepting a result on the stage-1 side of zero.
pub const STAGE2_ATTEMPTS: usize = 8;

/// Stage 1 at `ω = opts.omega` locates the band edge nearest that reference (expected to
/// be the VBM); stage 2 at `ω = -E_1` locates the opposite edge. When `ω = -E_1` is
/// equidistant from both edges stage 2 may land on the stage-1 edge again; it is then
/// rerun from fresh parameters, and each rerun is reported in the warnings.
pub fn band_gap_workflow(
    h: &SparseHermitian,
    ansatz: &AnsatzCircuit,
    opts: &WorkflowOptions,
) -> Result<BandGapResult> {
    let mut rng = substream(opts.seed, Substream::Init);
    let mut warnings = Vec::new();
    let first = run_stage(h, opts.omega, ansatz, opts, 0, &mut rng)?;
    let omega2 = -first.energy;
    if first.energy > 0.0 {
        warnings.push(format!(
            "stage 1 returned a positive energy {:.6}; treating it as the CBM and searching for the VBM at omega = {omega2:.6}",
            first.energy
        ));
    }
    let mut second = run_stage(h, omega2, ansatz, opts, 1, &mut rng)?;
    let mut attempt = 1;
    while (second.energy > 0.0) == (first.energy > 0.0) && attempt < STAGE2_ATTEMPTS {
        warnings.push(format!(
            "stage 2 attempt {attempt} returned {:.6}, on the same side of zero as stage 1; retrying from new parameters",
            second.energy
        ));
        attempt += 1;
        second = run_stage(h, omega2, ansatz, opts, 1, &mut rng)?;
    }
    let (e_vbm, e_cbm) = if first.energy <= 0.0 {
        (first.energy, second.energy)
    } else {
        (second.energy, first.energy)
    };
    if e_cbm < e_vbm {
        warnings.push(format!(
            "band edges are inverted: E_VBM = {e_vbm:.6}, E_CBM = {e_cbm:.6}"
        ));
    }
    for (i, s) in [&first, &second].iter().enumerate() {
        if !s.converged {
            warnings.push(format!(
                "stage {} hit the iteration limit before converging",
                i + 1
            ));
        }
        if s.cost_clamped {
            warnings.push(format!(
                "stage {} sampled cost was negative and clamped to zero",
                i + 1
            ));
        }
    }

    let ed = if opts.validate_ed {
        let eig = exact_diagonalize(h, false)?;
        let e_vbm = eig
            .values
            .iter()
            .copied()
            .filter(|&v| v < 0.0)
            .fold(f64::NAN, f64::max);
        let e_cbm = eig
            .values
            .iter()
            .copied()
            .find(|&v| v >= 0.0)
            .unwrap_or(f64::NAN);
        let band = opts.optimizer.convergence_band;
        let stages: Vec<StageReference> = [first.omega, second.omega]
            .iter()
            .map(|&w| stage_reference(&eig.values, w, band))
            .collect();
        for (i, r) in stages.iter().enumerate() {
            if r.near_degenerate {
                warnings.push(format!(
                    "stage {}: two folded eigenvalues lie within {band:e} of each other; either edge may be returned",
                    i + 1
                ));
            }
        }
        Some(EdReference {
            e_vbm,
            e_cbm,
            gap: e_cbm - e_vbm,
            stages,
        })
    } else {
        None
    };
    for w in &warnings {
        log::warn!("{w}");
    }
    Ok(BandGapResult {
        e_vbm,
        e_cbm,
        gap: e_cbm - e_vbm,
        stages: vec![first, second],
        warnings,
        ed,
    })
}

/// CSV `iteration,cost,gradient_norm,shots`, plus an `ed_folded_minimum` column when a
/// reference is given.
pub fn write_trace_csv<W: Write>(
    mut w: W,
    trace: &[TraceRow],
    reference: Option<f64>,
    comments: &[String],
) -> std::io::Result<()> {
    for c in comments {
        for line in c.lines() {
            writeln!(w, "# {line}")?;
        }
    }
    write!(w, "iteration,cost,gradient_norm,shots")?;
    if reference.is_some() {
        write!(w, ",ed_folded_minimum")?;
    }
    writeln!(w)?;
    for r in trace {
        write!(
            w,
            "{},{:e},{:e},{}",
            r.iteration, r.cost, r.gradient_norm, r.shots
        )?;
        if let Some(f) = reference {
            write!(w, ",{f:e}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::Statevector;
    use crate::Complex;

    #[test]
    fn zero_hamiltonian_converges_at_once() {
        let h = SparseHermitian::diagonal(&[0.0; 4]).unwrap();
        let obj = FoldedObjective::exact(&h, 0.0);
        let a = AnsatzCircuit::new(2, 1);
        let run = run_vqe(
            &obj,
            &a,
            &OptimizerConfig::default(),
            &vec![0.3; a.n_params()],
        )
        .unwrap();
        assert!(run.converged);
        assert_eq!(run.trace.len(), 1);
        assert_eq!(run.final_cost(), 0.0);
    }

    #[test]
    fn eigenvector_cost_and_sign() {
        let h = SparseHermitian::diagonal(&[-0.3, 1.2, 2.0, -1.0]).unwrap();
        for (idx, omega, want) in [(0usize, 0.0, -0.3), (1, 1.0, 1.2), (3, 0.5, -1.0)] {
            let obj = FoldedObjective::exact(&h, omega);
            let psi = Statevector::basis(2, idx).unwrap();
            let cost = obj.cost_of_state(&psi, 0).unwrap();
            assert!((cost - (want - omega) * (want - omega)).abs() < 1e-14);
            let s = obj.resolve_sign(&psi, 0).unwrap();
            assert!((s.energy - want).abs() < 1e-14, "{} vs {want}", s.energy);
        }
    }

    #[test]
    fn sampled_evaluation_is_seeded() {
        let h = SparseHermitian::from_triplets(
            2,
            [
                (0, 1, Complex::new(0.4, 0.2)),
                (0, 0, Complex::new(-0.5, 0.0)),
                (2, 3, Complex::new(1.0, 0.0)),
            ],
        )
        .unwrap();
        let obj = FoldedObjective::sampled(&h, 0.1, ShotPolicy::PerCircuit(200), 9).unwrap();
        let psi = Statevector::from_amplitudes(vec![Complex::new(0.5, 0.1); 4]).unwrap();
        let a = obj.cost_of_state(&psi, 3).unwrap();
        assert_eq!(a, obj.cost_of_state(&psi, 3).unwrap());
        assert_ne!(a, obj.cost_of_state(&psi, 4).unwrap());
        assert_eq!(
            obj.shots_per_evaluation(),
            200 * obj.plan.circuit_count() as u64
        );
    }

    #[test]
    fn trace_csv_header() {
        let mut out = Vec::new();
        let rows = [TraceRow {
            iteration: 0,
            cost: 1.5,
            gradient_norm: 0.25,
            shots: 0,
        }];
        write_trace_csv(&mut out, &rows, None, &["seed = 1".into()]).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "# seed = 1\niteration,cost,gradient_norm,shots\n0,1.5e0,2.5e-1,0\n"
        );
    }

    #[test]
    fn layer_defaults() {
        assert_eq!(default_layers(2), 4);
        assert_eq!(default_layers(4), 7);
        assert_eq!(default_layers(8), 8);
    }
}
