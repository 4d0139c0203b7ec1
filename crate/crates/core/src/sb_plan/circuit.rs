use crate::sb_plan::{MeasurementGroup, Part};

/// Single-qubit preparation of the ancilla before the GHZ readout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AncillaPrep {
    /// `H|0⟩`, reads real parts.
    Hadamard,
    /// `S·H|0⟩` (Hadamard, then phase), reads imaginary parts.
    PhaseHadamard,
}

/// Measurement circuit for one group.
///
/// Qubit 0 is the ancilla; register qubits are numbered `1..=N` with qubit 1 the most
/// significant bit of the basis index. The diagonal group (`x = 0`) is read out
/// directly in the computational basis on the `N` register qubits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GhzCircuit {
    pub n_qubits: usize,
    pub x: usize,
    pub prep: Option<AncillaPrep>,
    /// CNOT targets, each controlled by qubit 0.
    pub cnot_targets: Vec<usize>,
}

impl GhzCircuit {
    pub fn has_ancilla(&self) -> bool {
        self.prep.is_some()
    }

    pub fn cnot_count(&self) -> usize {
        self.cnot_targets.len()
    }

    /// Qubits read out at the end of the circuit.
    pub fn measured_qubits(&self) -> usize {
        self.n_qubits + usize::from(self.has_ancilla())
    }
}

pub fn ghz_descriptor(group: &MeasurementGroup) -> GhzCircuit {
    let n = group.n_qubits;
    if group.x == 0 {
        return GhzCircuit {
            n_qubits: n,
            x: 0,
            prep: None,
            cnot_targets: Vec::new(),
        };
    }
    let cnot_targets = (1..=n).filter(|&j| (group.x >> (n - j)) & 1 == 1).collect();
    GhzCircuit {
        n_qubits: n,
        x: group.x,
        prep: Some(match group.part {
            Part::Real => AncillaPrep::Hadamard,
            Part::Imag => AncillaPrep::PhaseHadamard,
        }),
        cnot_targets,
    }
}
