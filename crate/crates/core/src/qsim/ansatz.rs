//! Brick-wall ansatz of general two-qubit blocks.
//!
//! Each block is a 15-parameter SU(4) element in Cartan (KAK) form
//!
//! ```text
//! (R_z R_y R_z ⊗ R_z R_y R_z) · R_zz R_yy R_xx · (R_z R_y R_z ⊗ R_z R_y R_z)
//!        exit, θ9..θ14           core, θ6..θ8          entry, θ0..θ5
//! ```
//!
//! where the entry rotations act first. The three two-qubit Pauli rotations commute and
//! span the Cartan subalgebra, so the block reaches every two-qubit unitary up to a
//! global phase, and all-zero angles give the identity.

use crate::qsim::circuit::{ParametricCircuit, PAULI_X, PAULI_Y, PAULI_Z};
use crate::qsim::statevector::Statevector;
use crate::{Complex, Error, Result};

pub const PARAMS_PER_BLOCK: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnsatzCircuit {
    pub n_qubits: usize,
    pub layers: usize,
}

impl AnsatzCircuit {
    pub fn new(n_qubits: usize, layers: usize) -> Self {
        Self { n_qubits, layers }
    }

    /// Block wire pairs of one layer: `(0,1),(2,3),…` then `(1,2),(3,4),…`.
    pub fn layer_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.n_qubits;
        let even = (0..n.saturating_sub(1)).step_by(2).map(|a| (a, a + 1));
        let odd = (1..n.saturating_sub(1)).step_by(2).map(|a| (a, a + 1));
        even.chain(odd).collect()
    }

    pub fn block_count(&self) -> usize {
        self.layers * self.layer_pairs().len()
    }

    pub fn n_params(&self) -> usize {
        self.block_count() * PARAMS_PER_BLOCK
    }

    pub fn compile(&self) -> ParametricCircuit {
        let mut circuit = ParametricCircuit::new(self.n_qubits);
        let pairs = self.layer_pairs();
        for _ in 0..self.layers {
            for &(a, b) in &pairs {
                push_su4(&mut circuit, a, b);
            }
        }
        circuit
    }
}

fn push_euler(c: &mut ParametricCircuit, q: usize) {
    c.push_rotation(&[(q, PAULI_Z)]);
    c.push_rotation(&[(q, PAULI_Y)]);
    c.push_rotation(&[(q, PAULI_Z)]);
}

fn push_su4(c: &mut ParametricCircuit, a: usize, b: usize) {
    push_euler(c, a);
    push_euler(c, b);
    c.push_rotation(&[(a, PAULI_X), (b, PAULI_X)]);
    c.push_rotation(&[(a, PAULI_Y), (b, PAULI_Y)]);
    c.push_rotation(&[(a, PAULI_Z), (b, PAULI_Z)]);
    push_euler(c, a);
    push_euler(c, b);
}

/// `V(θ)|0…0⟩`.
pub fn apply_ansatz(ansatz: &AnsatzCircuit, theta: &[f64]) -> Result<Statevector> {
    if theta.len() != ansatz.n_params() {
        return Err(Error::ArityMismatch {
            expected: ansatz.n_params(),
            got: theta.len(),
        });
    }
    ansatz.compile().run(theta)
}

/// The 4×4 unitary of one block, in the basis `|q_a q_b⟩` with `q_a` the high bit.
pub fn su4_block(theta: &[f64; PARAMS_PER_BLOCK]) -> [[Complex; 4]; 4] {
    let mut c = ParametricCircuit::new(2);
    push_su4(&mut c, 0, 1);
    let mut u = [[Complex::new(0.0, 0.0); 4]; 4];
    for col in 0..4 {
        let mut s = Statevector::basis(2, col).expect("two-qubit basis state");
        c.apply_to(&mut s, theta).expect("fixed arity");
        for (row, a) in s.amplitudes().iter().enumerate() {
            u[row][col] = *a;
        }
    }
    u
}
