//! GHZ measurement circuits and outcome statistics.

use std::io::Write;

use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::qsim::statevector::{hadamard, phase_s, Statevector};
use crate::sb_plan::{AncillaPrep, GhzCircuit};
use crate::{Complex, Error, Result};

/// Empirical or exact outcome frequencies over `n_bits`-bit strings.
pub trait OutcomeFrequencies {
    fn n_bits(&self) -> usize;
    fn frequency(&self, outcome: usize) -> f64;
}

/// Exact Z-basis outcome distribution of a measurement circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    pub n_bits: usize,
    pub probabilities: Vec<f64>,
}

impl OutcomeFrequencies for OutcomeDistribution {
    fn n_bits(&self) -> usize {
        self.n_bits
    }

    fn frequency(&self, outcome: usize) -> f64 {
        self.probabilities[outcome]
    }
}

/// Shot counts per outcome. The ancilla, when present, is the leading bit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GhzOutcomeTally {
    pub n_bits: usize,
    pub counts: Vec<u64>,
    pub shots: u64,
}

impl OutcomeFrequencies for GhzOutcomeTally {
    fn n_bits(&self) -> usize {
        self.n_bits
    }

    fn frequency(&self, outcome: usize) -> f64 {
        self.counts[outcome] as f64 / self.shots as f64
    }
}

impl GhzOutcomeTally {
    /// CSV `outcome,count` with outcomes as bitstrings; zero counts omitted.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "outcome,count")?;
        for (k, &c) in self.counts.iter().enumerate() {
            if c > 0 {
                writeln!(w, "{:0width$b},{}", k, c, width = self.n_bits)?;
            }
        }
        Ok(())
    }
}

/// State right before readout: `H_0 · Π_{j∈𝒳} CX_{0,j} · (|G⟩ ⊗ |ψ⟩)`, or `|ψ⟩` itself
/// for the ancilla-free diagonal circuit.
pub fn ghz_final_state(psi: &Statevector, circuit: &GhzCircuit) -> Result<Statevector> {
    if psi.n_qubits() != circuit.n_qubits {
        return Err(Error::DimensionMismatch {
            expected: circuit.n_qubits,
            got: psi.n_qubits(),
        });
    }
    let Some(prep) = circuit.prep else {
        return Ok(psi.clone());
    };
    let mut ancilla = Statevector::zero(1);
    ancilla.apply_single(0, hadamard());
    if prep == AncillaPrep::PhaseHadamard {
        ancilla.apply_single(0, phase_s());
    }
    let a = ancilla.amplitudes();
    let mut state = psi.prepend_qubit([a[0], a[1]]);
    for &target in &circuit.cnot_targets {
        state.apply_cnot(0, target);
    }
    state.apply_single(0, hadamard());
    Ok(state)
}

pub fn ghz_distribution(psi: &Statevector, circuit: &GhzCircuit) -> Result<OutcomeDistribution> {
    let state = ghz_final_state(psi, circuit)?;
    Ok(OutcomeDistribution {
        n_bits: state.n_qubits(),
        probabilities: state.probabilities(),
    })
}

/// Multinomial draw of `shots` outcomes, by sequential conditional binomials.
pub fn sample_outcomes<R: Rng + ?Sized>(
    dist: &OutcomeDistribution,
    shots: u64,
    rng: &mut R,
) -> Result<GhzOutcomeTally> {
    if shots == 0 {
        return Err(Error::InvalidShots(
            "sampled mode needs at least one shot".into(),
        ));
    }
    let mut counts = vec![0u64; dist.probabilities.len()];
    let mut remaining = shots;
    let mut mass_left = 1.0f64;
    for (k, &p) in dist.probabilities.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if k + 1 == counts.len() {
            counts[k] = remaining;
            break;
        }
        let q = if mass_left > 0.0 {
            (p / mass_left).clamp(0.0, 1.0)
        } else {
            1.0
        };
        let draw = if q >= 1.0 {
            remaining
        } else if q <= 0.0 {
            0
        } else {
            Binomial::new(remaining, q)
                .map_err(|e| Error::InvalidShots(e.to_string()))?
                .sample(rng)
        };
        counts[k] = draw;
        remaining -= draw;
        mass_left -= p;
    }
    Ok(GhzOutcomeTally {
        n_bits: dist.n_bits,
        counts,
        shots,
    })
}

/// Runs a measurement circuit `shots` times.
pub fn simulate_ghz_circuit<R: Rng + ?Sized>(
    psi: &Statevector,
    circuit: &GhzCircuit,
    shots: u64,
    rng: &mut R,
) -> Result<GhzOutcomeTally> {
    sample_outcomes(&ghz_distribution(psi, circuit)?, shots, rng)
}

/// `p(0z) - p(1z)` for a circuit with an ancilla.
pub fn probability_difference<F: OutcomeFrequencies + ?Sized>(freq: &F, z: usize) -> f64 {
    let half = 1usize << (freq.n_bits() - 1);
    freq.frequency(z) - freq.frequency(half | z)
}

/// `conj(ψ_z)·ψ_{z'}`, the amplitude product that the GHZ readout exposes.
pub fn amplitude_product(psi: &Statevector, z: usize, z_prime: usize) -> Complex {
    psi.amplitudes()[z].conj() * psi.amplitudes()[z_prime]
}
