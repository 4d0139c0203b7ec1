//! Pauli-decomposition baselines: naive, qubit-wise commuting and generally commuting
//! grouping, benchmarked against the SB plan.

mod bench;
mod decompose;
mod grouping;

pub use bench::{
    benchmark, benchmark_operator, fit_power_law, folded_sweep, sb_map, write_reports_csv,
    BenchOptions, GroupingReport, Method,
};
pub use decompose::{
    commute, pauli_decompose, pauli_rebuild, qubit_wise_commute, PauliTerm, MAX_PAULI_QUBITS,
    PAULI_DROP_TOLERANCE,
};
pub use grouping::{gc_group, greedy_group, qwc_group, Commutation, DeadlineExceeded};
