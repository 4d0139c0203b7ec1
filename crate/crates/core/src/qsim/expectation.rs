//! Group expectations, exact and from shot statistics.
//!
//! For a group `(x, part)` with members `(z, c)` the contribution to `⟨O⟩` is
//!
//! * `x = 0`: `Σ c·|ψ_z|²`
//! * real part: `Σ 2c·Re[conj(ψ_z) ψ_{z⊕x}]`
//! * imaginary part: `Σ -2c·Im[conj(ψ_z) ψ_{z⊕x}]`
//!
//! The GHZ readout gives `p(0z) - p(1z) = Re[conj(ψ_z) ψ_{z⊕x}]` for `G = H` and
//! `-Im[conj(ψ_z) ψ_{z⊕x}]` for `G = S·H`. The sampled estimator uses both outcome
//! strings `z` and `z⊕x` of every member, each with its own full-matrix coefficient
//! (`c` and `±c`), so that a single shot has magnitude at most `max |c|`.

use rayon::prelude::*;

use crate::qsim::ghz::{probability_difference, OutcomeFrequencies};
use crate::qsim::statevector::Statevector;
use crate::sb_plan::{ghz_descriptor, MeasurementGroup, MeasurementPlan, Part};
use crate::{Error, Result};

pub fn exact_group_expectation(psi: &Statevector, group: &MeasurementGroup) -> Result<f64> {
    if psi.n_qubits() != group.n_qubits {
        return Err(Error::DimensionMismatch {
            expected: group.n_qubits,
            got: psi.n_qubits(),
        });
    }
    let a = psi.amplitudes();
    let value = if group.x == 0 {
        group
            .members
            .iter()
            .map(|m| m.coeff * a[m.z].norm_sqr())
            .sum()
    } else {
        let x = group.x;
        match group.part {
            Part::Real => group
                .members
                .iter()
                .map(|m| 2.0 * m.coeff * (a[m.z].conj() * a[m.z ^ x]).re)
                .sum(),
            Part::Imag => group
                .members
                .iter()
                .map(|m| -2.0 * m.coeff * (a[m.z].conj() * a[m.z ^ x]).im)
                .sum(),
        }
    };
    Ok(value)
}

/// Estimate of a group's contribution from its measurement statistics.
pub fn sampled_group_expectation<F: OutcomeFrequencies + ?Sized>(
    freq: &F,
    group: &MeasurementGroup,
) -> Result<f64> {
    let expected_bits = ghz_descriptor(group).measured_qubits();
    if freq.n_bits() != expected_bits {
        return Err(Error::TallyMismatch {
            tally_bits: freq.n_bits(),
            group_bits: expected_bits,
        });
    }
    if group.x == 0 {
        return Ok(group
            .members
            .iter()
            .map(|m| m.coeff * freq.frequency(m.z))
            .sum());
    }
    let partner_sign = match group.part {
        Part::Real => 1.0,
        Part::Imag => -1.0,
    };
    Ok(group
        .members
        .iter()
        .map(|m| {
            m.coeff
                * (probability_difference(freq, m.z)
                    + partner_sign * probability_difference(freq, m.z ^ group.x))
        })
        .sum())
}

/// `⟨ψ|O|ψ⟩` as the sum of exact group expectations. Groups are evaluated in parallel
/// and reduced in plan order.
pub fn exact_plan_expectation(psi: &Statevector, plan: &MeasurementPlan) -> Result<f64> {
    let parts: Vec<f64> = plan
        .groups
        .par_iter()
        .map(|g| exact_group_expectation(psi, g))
        .collect::<Result<_>>()?;
    Ok(parts.iter().sum())
}
