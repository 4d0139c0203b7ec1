use crate::{Complex, Error, Result};

/// Pure state on `n_qubits` qubits.
///
/// Qubit `q` of an `n`-qubit register is bit `n - 1 - q` of the basis index, so qubit 0
/// is the most significant bit.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<Complex>,
}

/// A Pauli word in bit-mask form: `P = i^{|x∧z|} X^x Z^z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliMask {
    pub x: usize,
    pub z: usize,
}

impl PauliMask {
    /// `(P|k⟩) = phase · |k ⊕ x⟩`; returns the phase.
    #[inline]
    pub fn phase_on(&self, k: usize) -> Complex {
        let y = (self.x & self.z).count_ones();
        let sign = if (self.z & k).count_ones().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        match y % 4 {
            0 => Complex::new(sign, 0.0),
            1 => Complex::new(0.0, sign),
            2 => Complex::new(-sign, 0.0),
            _ => Complex::new(0.0, -sign),
        }
    }
}

impl Statevector {
    pub fn zero(n_qubits: usize) -> Self {
        let mut amps = vec![Complex::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex::new(1.0, 0.0);
        Self { n_qubits, amps }
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        if index >= 1 << n_qubits {
            return Err(Error::DimensionMismatch {
                expected: 1 << n_qubits,
                got: index,
            });
        }
        let mut s = Self::zero(n_qubits);
        s.amps[0] = Complex::new(0.0, 0.0);
        s.amps[index] = Complex::new(1.0, 0.0);
        Ok(s)
    }

    /// Normalises the given amplitudes.
    pub fn from_amplitudes(amps: Vec<Complex>) -> Result<Self> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::DimensionMismatch {
                expected: len.max(1).next_power_of_two(),
                got: len,
            });
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidMatrix(
                "state has zero or non-finite norm".into(),
            ));
        }
        Ok(Self {
            n_qubits: len.trailing_zeros() as usize,
            amps: amps.into_iter().map(|a| a / norm).collect(),
        })
    }

    /// Unnormalised buffer for intermediate vectors such as `O|ψ⟩`.
    pub(crate) fn from_raw(n_qubits: usize, amps: Vec<Complex>) -> Self {
        debug_assert_eq!(amps.len(), 1 << n_qubits);
        Self { n_qubits, amps }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn inner(&self, other: &Statevector) -> Complex {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn bit_of(&self, qubit: usize) -> usize {
        debug_assert!(qubit < self.n_qubits);
        self.n_qubits - 1 - qubit
    }

    /// `|a⟩ ⊗ |self⟩` with `a` the new qubit 0.
    pub fn prepend_qubit(&self, a: [Complex; 2]) -> Self {
        let mut amps = Vec::with_capacity(2 * self.amps.len());
        amps.extend(self.amps.iter().map(|&v| a[0] * v));
        amps.extend(self.amps.iter().map(|&v| a[1] * v));
        Self {
            n_qubits: self.n_qubits + 1,
            amps,
        }
    }

    /// Applies a 2×2 matrix to `qubit`.
    pub fn apply_single(&mut self, qubit: usize, m: [[Complex; 2]; 2]) {
        let bit = 1 << self.bit_of(qubit);
        for k in 0..self.amps.len() {
            if k & bit == 0 {
                let a = self.amps[k];
                let b = self.amps[k | bit];
                self.amps[k] = m[0][0] * a + m[0][1] * b;
                self.amps[k | bit] = m[1][0] * a + m[1][1] * b;
            }
        }
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) {
        let c = 1 << self.bit_of(control);
        let t = 1 << self.bit_of(target);
        for k in 0..self.amps.len() {
            if k & c != 0 && k & t == 0 {
                self.amps.swap(k, k | t);
            }
        }
    }

    /// `exp(-i θ/2 · P)` for a Pauli word in bit-mask form.
    pub fn apply_pauli_rotation(&mut self, p: PauliMask, theta: f64) {
        let (s, c) = (theta / 2.0).sin_cos();
        let minus_i_s = Complex::new(0.0, -s);
        if p.x == 0 {
            for (k, a) in self.amps.iter_mut().enumerate() {
                *a *= Complex::new(c, 0.0) + minus_i_s * p.phase_on(k);
            }
            return;
        }
        let low = p.x & p.x.wrapping_neg();
        for k in 0..self.amps.len() {
            if k & low == 0 {
                let kp = k ^ p.x;
                let a = self.amps[k];
                let b = self.amps[kp];
                // (Pψ)_k = phase(k')·ψ_{k'} and vice versa.
                self.amps[k] = a * c + minus_i_s * p.phase_on(kp) * b;
                self.amps[kp] = b * c + minus_i_s * p.phase_on(k) * a;
            }
        }
    }

    /// `P|ψ⟩`.
    pub fn apply_pauli(&mut self, p: PauliMask) {
        let mut out = vec![Complex::new(0.0, 0.0); self.amps.len()];
        for (k, &a) in self.amps.iter().enumerate() {
            out[k ^ p.x] = p.phase_on(k) * a;
        }
        self.amps = out;
    }
}

pub fn hadamard() -> [[Complex; 2]; 2] {
    let h = Complex::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    [[h, h], [h, -h]]
}

pub fn phase_s() -> [[Complex; 2]; 2] {
    let o = Complex::new(0.0, 0.0);
    [[Complex::new(1.0, 0.0), o], [o, Complex::new(0.0, 1.0)]]
}
