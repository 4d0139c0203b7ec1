//! Statevector simulation of the ansatz and of the GHZ measurement circuits.

mod ansatz;
mod circuit;
mod expectation;
mod ghz;
mod statevector;

pub use ansatz::{apply_ansatz, su4_block, AnsatzCircuit, PARAMS_PER_BLOCK};
pub use circuit::{Observable, Op, ParametricCircuit, PAULI_X, PAULI_Y, PAULI_Z};
pub use expectation::{exact_group_expectation, exact_plan_expectation, sampled_group_expectation};
pub use ghz::{
    amplitude_product, ghz_distribution, ghz_final_state, probability_difference, sample_outcomes,
    simulate_ghz_circuit, GhzOutcomeTally, OutcomeDistribution, OutcomeFrequencies,
};
pub use statevector::{hadamard, phase_s, PauliMask, Statevector};
