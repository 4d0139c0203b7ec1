use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::time::Duration;

use rayon::prelude::*;
use sbvqe::pauli_bench::{
    benchmark_operator, fit_power_law, folded_sweep, write_reports_csv, BenchOptions, Method,
};
use sbvqe::sb_plan::{allocate_shots, shot_bound, uniform_shots, write_plan_csv};
use sbvqe::tb_model::{
    assemble_hamiltonian_with, fold, read_matrix_market, write_matrix_market, AssemblyOptions,
};
use sbvqe::vqe::{
    band_gap_workflow, fixed_omega_run, write_trace_csv, ShotPolicy, StageResult, WorkflowOptions,
};
use sbvqe::{AnsatzCircuit, MeasurementPlan, SparseHermitian, Supercell, TbParameterSet};
use serde::Serialize;
use thiserror::Error;

use crate::config::{ConfigError, OmegaPolicy, RunConfig};
use crate::Command;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Model(#[from] sbvqe::Error),
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
    #[error("{0} benchmark cell(s) censored by the timeout")]
    Censored(usize),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Model(sbvqe::Error::NonFiniteCost { .. }) => 3,
            CliError::Model(sbvqe::Error::Io(_)) | CliError::Write { .. } => 1,
            CliError::Model(_) => 2,
            CliError::Censored(_) => 4,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

pub fn run(command: &Command, cfg: &RunConfig) -> Result<()> {
    // Fails only if a pool already exists, which keeps its own size.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build_global();
    std::fs::create_dir_all(&cfg.out_dir).map_err(|source| CliError::Write {
        path: cfg.out.clone(),
        source,
    })?;
    match command {
        Command::Build(_) => build(cfg),
        Command::Plan(_) => plan(cfg),
        Command::Vqe(_) => vqe(cfg),
        Command::Bench(_) => bench(cfg),
    }
}

fn write_file(
    cfg: &RunConfig,
    name: &str,
    f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> Result<()> {
    let path = cfg.out_dir.join(name);
    let err = |source| CliError::Write {
        path: path.display().to_string(),
        source,
    };
    let mut w = BufWriter::new(File::create(&path).map_err(err)?);
    f(&mut w).and_then(|_| w.flush()).map_err(err)
}

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    config: &'a RunConfig,
    result: T,
}

fn write_document<T: Serialize>(cfg: &RunConfig, name: &str, result: T) -> Result<()> {
    let text = toml::to_string(&Document {
        config: cfg,
        result,
    })
    .expect("documents serialise");
    write_file(cfg, name, |w| w.write_all(text.as_bytes()))
}

fn params(cfg: &RunConfig) -> Result<TbParameterSet> {
    match &cfg.params_path {
        Some(p) => TbParameterSet::from_file(p).map_err(|e| match e {
            sbvqe::Error::Io(source) => ConfigError::Read {
                path: p.clone(),
                source,
            }
            .into(),
            other => ConfigError::Invalid(format!("{}: {other}", p.display())).into(),
        }),
        None => Ok(TbParameterSet::pbi3_fixture()),
    }
}

fn supercell_hamiltonian(cfg: &RunConfig, omega_hint: f64) -> Result<(Supercell, SparseHermitian)> {
    let cell = Supercell::build(cfg.supercell, cfg.spin)?;
    let h = assemble_hamiltonian_with(
        &cell,
        &params(cfg)?,
        cfg.spin,
        AssemblyOptions {
            omega_hint,
            ..Default::default()
        },
    )?;
    Ok((cell, h))
}

fn hamiltonian(cfg: &RunConfig, omega_hint: f64) -> Result<SparseHermitian> {
    match &cfg.matrix_path {
        Some(p) => {
            let file = File::open(p).map_err(|source| ConfigError::Read {
                path: p.clone(),
                source,
            })?;
            read_matrix_market(BufReader::new(file))
                .map_err(|e| ConfigError::Invalid(format!("{}: {e}", p.display())).into())
        }
        None => Ok(supercell_hamiltonian(cfg, omega_hint)?.1),
    }
}

#[derive(Serialize)]
struct BuildSummary {
    atoms: usize,
    basis_dimension: usize,
    dim: usize,
    n_qubits: usize,
    /// Register plus the GHZ ancilla.
    circuit_qubits: usize,
    padded: bool,
    nnz_stored: usize,
    nnz_full: usize,
    real: bool,
}

fn build(cfg: &RunConfig) -> Result<()> {
    if cfg.matrix_path.is_some() {
        return Err(ConfigError::Invalid(
            "build assembles from the supercell; matrix is not accepted".into(),
        )
        .into());
    }
    let (cell, h) = supercell_hamiltonian(cfg, cfg.omega.reference())?;
    let comments = cfg.comment_lines();
    write_file(cfg, "supercell.txt", |w| {
        for c in &comments {
            writeln!(w, "# {c}")?;
        }
        cell.write_dump(w)
    })?;
    write_file(cfg, "hamiltonian.mtx", |w| {
        write_matrix_market(w, &h, &comments)
    })?;
    let summary = BuildSummary {
        atoms: cell.atoms.len(),
        basis_dimension: cell.basis_dimension(),
        dim: h.dim(),
        n_qubits: h.n_qubits(),
        circuit_qubits: h.n_qubits() + 1,
        padded: h.dim() != cell.basis_dimension(),
        nnz_stored: h.nnz_stored(),
        nnz_full: h.nnz_full(),
        real: h.is_real(),
    };
    println!(
        "{} supercell: {} atoms, basis {}, dim {} on {} qubits ({} with the ancilla), nnz {}",
        cfg.dims,
        summary.atoms,
        summary.basis_dimension,
        summary.dim,
        summary.n_qubits,
        summary.circuit_qubits,
        summary.nnz_full
    );
    write_document(cfg, "summary.toml", summary)
}

#[derive(Serialize)]
struct PlanSummary {
    omega: f64,
    n_qubits: usize,
    circuit_qubits: usize,
    folded_nnz: usize,
    circuits: usize,
    diagonal: usize,
    real: usize,
    imag: usize,
    members: usize,
    max_cnots: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    shot_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    total_shots: Option<u64>,
}

fn plan(cfg: &RunConfig) -> Result<()> {
    let omega = cfg.omega.reference();
    let folded = fold(&hamiltonian(cfg, omega)?, omega);
    let plan = MeasurementPlan::from_hamiltonian(&folded);
    let allocation = match cfg.policy() {
        Some(ShotPolicy::Epsilon(e)) => Some(allocate_shots(&plan, e)?),
        Some(ShotPolicy::PerCircuit(k)) => Some(uniform_shots(&plan, k)?),
        None => None,
    };
    let bound = cfg.epsilon.map(|e| shot_bound(&plan, e)).transpose()?;
    let b = plan.breakdown();
    let comments = cfg.comment_lines();
    write_file(cfg, "plan.csv", |w| {
        write_plan_csv(w, &plan, allocation.as_ref(), &comments)
    })?;
    let summary = PlanSummary {
        omega,
        n_qubits: plan.n_qubits,
        circuit_qubits: plan.n_qubits + 1,
        folded_nnz: folded.nnz_full(),
        circuits: b.total(),
        diagonal: b.diagonal,
        real: b.real,
        imag: b.imag,
        members: b.members,
        max_cnots: b.max_cnots,
        shot_bound: bound,
        total_shots: allocation.as_ref().map(|a| a.total),
    };
    println!(
        "{} circuits ({} diagonal, {} real, {} imaginary) over {} terms, at most {} CNOTs",
        b.total(),
        b.diagonal,
        b.real,
        b.imag,
        b.members,
        b.max_cnots
    );
    if let Some(a) = &allocation {
        println!("total shots per evaluation: {}", a.total);
    }
    write_document(cfg, "plan.toml", summary)
}

fn write_stage_trace(
    cfg: &RunConfig,
    name: &str,
    stage: &StageResult,
    reference: Option<f64>,
) -> Result<()> {
    let mut comments = cfg.comment_lines();
    comments.push(format!("stage omega = {}", stage.omega));
    write_file(cfg, name, |w| {
        write_trace_csv(w, &stage.trace, reference, &comments)
    })
}

fn vqe(cfg: &RunConfig) -> Result<()> {
    let omega = cfg.omega.reference();
    let h = hamiltonian(cfg, omega)?;
    let ansatz = AnsatzCircuit::new(h.n_qubits(), cfg.layers);
    let opts = WorkflowOptions {
        optimizer: cfg.optimizer,
        shots: cfg.shot_policy(),
        seed: cfg.seed,
        validate_ed: cfg.validate_ed,
        omega,
    };
    match cfg.omega {
        OmegaPolicy::Auto => {
            let r = band_gap_workflow(&h, &ansatz, &opts)?;
            for (i, stage) in r.stages.iter().enumerate() {
                let reference = r.ed.as_ref().map(|e| e.stages[i].folded_minimum);
                write_stage_trace(cfg, &format!("trace_stage{}.csv", i + 1), stage, reference)?;
            }
            println!(
                "E_VBM = {:.6}, E_CBM = {:.6}, gap = {:.6}",
                r.e_vbm, r.e_cbm, r.gap
            );
            if let Some(ed) = &r.ed {
                println!(
                    "ED: E_VBM = {:.6}, E_CBM = {:.6}, gap = {:.6}",
                    ed.e_vbm, ed.e_cbm, ed.gap
                );
            }
            write_document(cfg, "result.toml", &r)
        }
        OmegaPolicy::Fixed(_) => {
            let r = fixed_omega_run(&h, &ansatz, &opts)?;
            write_stage_trace(cfg, "trace.csv", &r.stage, r.ed.map(|e| e.folded_minimum))?;
            println!(
                "E = {:.6} nearest omega = {omega}, cost {:.3e}",
                r.stage.energy, r.stage.final_cost
            );
            if let Some(ed) = &r.ed {
                println!("ED: nearest eigenvalue {:.6}", ed.nearest_eigenvalue);
            }
            write_document(cfg, "result.toml", &r)
        }
    }
}

#[derive(Serialize)]
struct BenchSummary {
    cells: usize,
    censored: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    sb_time_exponent: Option<f64>,
}

fn bench(cfg: &RunConfig) -> Result<()> {
    let b = &cfg.bench;
    let opts = BenchOptions {
        methods: b.methods.clone(),
        timeout: Duration::from_secs_f64(b.timeout_s),
        min_sample_time: Duration::from_secs_f64(b.min_sample_time_s),
        max_repeats: b.max_repeats,
    };
    let operators = folded_sweep(
        &cfg.bench_sizes,
        cfg.spin,
        &params(cfg)?,
        cfg.omega.reference(),
    )?;
    let cells: Vec<_> = if b.parallel_cells {
        operators
            .par_iter()
            .map(|(dims, op)| benchmark_operator(op, *dims, &opts))
            .collect::<std::result::Result<_, _>>()?
    } else {
        operators
            .iter()
            .map(|(dims, op)| benchmark_operator(op, *dims, &opts))
            .collect::<std::result::Result<_, _>>()?
    };
    let reports: Vec<_> = cells.into_iter().flatten().collect();
    let sb: Vec<_> = reports
        .iter()
        .filter(|r| r.method == Method::Sb && !r.censored)
        .collect();
    let xs: Vec<f64> = sb.iter().map(|r| r.nnz as f64).collect();
    let ys: Vec<f64> = sb.iter().map(|r| r.mapping_time_s).collect();
    let exponent = fit_power_law(&xs, &ys).map(|(e, _)| e);
    let censored = reports.iter().filter(|r| r.censored).count();

    let comments = cfg.comment_lines();
    write_file(cfg, "bench.csv", |w| {
        write_reports_csv(w, &reports, &comments)
    })?;
    for r in &reports {
        match r.circuit_count {
            Some(c) => println!(
                "{} {}: {c} circuits, {:.3e} s",
                r.dims, r.method, r.mapping_time_s
            ),
            None => println!("{} {}: censored", r.dims, r.method),
        }
    }
    if let Some(e) = exponent {
        println!("SB mapping time ~ nnz^{e:.3}");
    }
    write_document(
        cfg,
        "bench.toml",
        BenchSummary {
            cells: reports.len(),
            censored,
            sb_time_exponent: exponent,
        },
    )?;
    if censored > 0 {
        return Err(CliError::Censored(censored));
    }
    Ok(())
}
