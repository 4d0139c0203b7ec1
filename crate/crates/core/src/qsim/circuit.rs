use crate::qsim::statevector::{PauliMask, Statevector};
use crate::tb_model::SparseHermitian;
use crate::{Complex, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Op {
    /// `exp(-i θ_param/2 · P)`.
    Rotation {
        pauli: PauliMask,
        param: usize,
    },
    Cnot {
        control: usize,
        target: usize,
    },
}

/// A gate list over `n_qubits` whose rotation angles are drawn from a parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ParametricCircuit {
    pub n_qubits: usize,
    pub n_params: usize,
    pub ops: Vec<Op>,
}

/// Anything that can act linearly on a state vector as a Hermitian operator.
pub trait Observable {
    fn dim(&self) -> usize;
    fn apply(&self, psi: &[Complex]) -> Vec<Complex>;
}

impl Observable for SparseHermitian {
    fn dim(&self) -> usize {
        SparseHermitian::dim(self)
    }

    fn apply(&self, psi: &[Complex]) -> Vec<Complex> {
        self.matvec(psi).expect("dimension checked by caller")
    }
}

pub const PAULI_X: usize = 1;
pub const PAULI_Y: usize = 2;
pub const PAULI_Z: usize = 3;

impl ParametricCircuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            n_params: 0,
            ops: Vec::new(),
        }
    }

    /// Pauli mask from `(qubit, letter)` pairs with letters [`PAULI_X`], [`PAULI_Y`], [`PAULI_Z`].
    pub fn mask(&self, letters: &[(usize, usize)]) -> PauliMask {
        let mut m = PauliMask { x: 0, z: 0 };
        for &(q, letter) in letters {
            let bit = 1 << (self.n_qubits - 1 - q);
            match letter {
                PAULI_X => m.x |= bit,
                PAULI_Y => {
                    m.x |= bit;
                    m.z |= bit;
                }
                PAULI_Z => m.z |= bit,
                _ => panic!("unknown Pauli letter {letter}"),
            }
        }
        m
    }

    /// Appends a rotation with a fresh parameter; returns its index.
    pub fn push_rotation(&mut self, letters: &[(usize, usize)]) -> usize {
        let pauli = self.mask(letters);
        let param = self.n_params;
        self.n_params += 1;
        self.ops.push(Op::Rotation { pauli, param });
        param
    }

    pub fn push_cnot(&mut self, control: usize, target: usize) {
        self.ops.push(Op::Cnot { control, target });
    }

    fn check_arity(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.n_params {
            return Err(Error::ArityMismatch {
                expected: self.n_params,
                got: theta.len(),
            });
        }
        Ok(())
    }

    pub fn apply_to(&self, state: &mut Statevector, theta: &[f64]) -> Result<()> {
        self.check_arity(theta)?;
        if state.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                got: state.n_qubits(),
            });
        }
        for op in &self.ops {
            match *op {
                Op::Rotation { pauli, param } => state.apply_pauli_rotation(pauli, theta[param]),
                Op::Cnot { control, target } => state.apply_cnot(control, target),
            }
        }
        Ok(())
    }

    /// `V(θ)|0…0⟩`.
    pub fn run(&self, theta: &[f64]) -> Result<Statevector> {
        let mut s = Statevector::zero(self.n_qubits);
        self.apply_to(&mut s, theta)?;
        Ok(s)
    }

    /// `C(θ) = ⟨ψ(θ)|O|ψ(θ)⟩` and its exact gradient by adjoint propagation.
    ///
    /// One forward pass, then a single backward sweep that un-applies each gate to both
    /// the state and `O|ψ⟩`. For a rotation `exp(-iθP/2)` the partial derivative is
    /// `Im⟨λ|P|φ⟩` evaluated just after the gate.
    pub fn expectation_and_gradient<O: Observable + ?Sized>(
        &self,
        observable: &O,
        theta: &[f64],
    ) -> Result<(f64, Vec<f64>)> {
        let mut phi = self.run(theta)?;
        if observable.dim() != phi.dim() {
            return Err(Error::DimensionMismatch {
                expected: phi.dim(),
                got: observable.dim(),
            });
        }
        let lambda_amps = observable.apply(phi.amplitudes());
        let cost: f64 = phi
            .amplitudes()
            .iter()
            .zip(&lambda_amps)
            .map(|(a, b)| (a.conj() * b).re)
            .sum();
        let mut lambda = Statevector::from_raw(self.n_qubits, lambda_amps);
        let mut grad = vec![0.0; self.n_params];
        for op in self.ops.iter().rev() {
            match *op {
                Op::Rotation { pauli, param } => {
                    let mut p_phi = phi.clone();
                    p_phi.apply_pauli(pauli);
                    grad[param] += lambda.inner(&p_phi).im;
                    phi.apply_pauli_rotation(pauli, -theta[param]);
                    lambda.apply_pauli_rotation(pauli, -theta[param]);
                }
                Op::Cnot { control, target } => {
                    phi.apply_cnot(control, target);
                    lambda.apply_cnot(control, target);
                }
            }
        }
        Ok((cost, grad))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_qubit_ry_under_z() {
        // ⟨0|RY(θ)† Z RY(θ)|0⟩ = cos θ, derivative -sin θ.
        let mut c = ParametricCircuit::new(1);
        c.push_rotation(&[(0, PAULI_Y)]);
        let z = SparseHermitian::diagonal(&[1.0, -1.0]).unwrap();
        for theta in [-2.0, -0.3, 0.0, 0.9, 2.5] {
            let (cost, grad) = c.expectation_and_gradient(&z, &[theta]).unwrap();
            assert!((cost - f64::cos(theta)).abs() < 1e-14);
            assert!((grad[0] + f64::sin(theta)).abs() < 1e-14);
        }
    }

    #[test]
    fn constant_observable_has_zero_gradient() {
        let mut c = ParametricCircuit::new(2);
        c.push_rotation(&[(0, PAULI_X)]);
        c.push_cnot(0, 1);
        c.push_rotation(&[(0, PAULI_Z), (1, PAULI_Y)]);
        let h = SparseHermitian::diagonal(&[2.5; 4]).unwrap();
        let (cost, grad) = c.expectation_and_gradient(&h, &[0.4, -1.1]).unwrap();
        assert!((cost - 2.5).abs() < 1e-14);
        assert!(grad.iter().all(|g| g.abs() < 1e-14));
    }

    #[test]
    fn arity_checked() {
        let mut c = ParametricCircuit::new(1);
        c.push_rotation(&[(0, PAULI_Y)]);
        assert!(matches!(
            c.run(&[]),
            Err(Error::ArityMismatch {
                expected: 1,
                got: 0
            })
        ));
    }
}
