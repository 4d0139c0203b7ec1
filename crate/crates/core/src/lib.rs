//! Standard-basis (SB) measurement VQE for multi-band tight-binding Hamiltonians.
//!
//! The pipeline is:
//!
//! 1. [`lattice`] builds a finite BX₃ perovskite supercell with closed boundaries.
//! 2. [`tb_model`] assembles the sparse sp³ Hamiltonian and its folded square `(H - ωI)²`.
//! 3. [`sb_plan`] decomposes a sparse Hermitian into `|z⟩⟨z'|` operators, groups them by
//!    displacement string `x = z ⊕ z'` into GHZ-measurable circuits and allocates shots.
//! 4. [`qsim`] simulates the brick-wall SU(4) ansatz and the GHZ measurement circuits.
//! 5. [`vqe`] minimises the folded-spectrum cost with ADAM and runs the two-stage
//!    band-gap workflow.
//! 6. [`pauli_bench`] provides the Pauli-decomposition baselines (naive, QWC, GC).

pub mod error;
pub mod lattice;
pub mod pauli_bench;
pub mod qsim;
pub mod rng;
pub mod sb_plan;
pub mod tb_model;
pub mod vqe;

pub use error::{Error, Result};

/// Scalar type used throughout. All tolerances in this crate assume double precision.
pub type Real = f64;
/// Complex amplitude / matrix element type.
pub type Complex = num_complex::Complex<Real>;

pub use lattice::{Supercell, SupercellDims};
pub use qsim::{AnsatzCircuit, Statevector};
pub use sb_plan::{MeasurementGroup, MeasurementPlan, ShotAllocation};
pub use tb_model::{SparseHermitian, TbParameterSet};
pub use vqe::{BandGapResult, FoldedObjective, OptimizerConfig};
