//! Standard-basis decomposition, GHZ grouping and shot allocation.
//!
//! A Hermitian `O = Σ o_{z,z'} |z⟩⟨z'|` is stored as one [`SbTerm`] per upper-triangle
//! nonzero. Terms sharing the displacement `x = z ⊕ z'` are read out by a single GHZ
//! circuit, once for the real parts (ancilla prepared by `H`) and once for the imaginary
//! parts (ancilla prepared by `S·H`).

mod circuit;
mod export;
mod shots;

use std::fmt;

pub use circuit::{ghz_descriptor, AncillaPrep, GhzCircuit};
pub use export::write_plan_csv;
pub use shots::{allocate_shots, shot_bound, uniform_shots, ShotAllocation};

use crate::tb_model::SparseHermitian;
use crate::Complex;

/// `o_{z,z'} |z⟩⟨z'|` with `z <= z'`; the Hermitian conjugate is implied when `z != z'`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SbTerm {
    pub z: usize,
    pub z_prime: usize,
    pub coeff: Complex,
}

impl SbTerm {
    pub fn displacement(&self) -> usize {
        self.z ^ self.z_prime
    }
}

/// One SB term per stored nonzero of `h`.
pub fn decompose(h: &SparseHermitian) -> Vec<SbTerm> {
    h.entries()
        .iter()
        .map(|e| SbTerm {
            z: e.row,
            z_prime: e.col,
            coeff: e.value,
        })
        .collect()
}

/// Sum of the terms and the Hermitian conjugates of the off-diagonal ones.
pub fn reconstruct(n_qubits: usize, terms: &[SbTerm]) -> SparseHermitian {
    SparseHermitian::from_triplets(n_qubits, terms.iter().map(|t| (t.z, t.z_prime, t.coeff)))
        .expect("SB terms index inside the register")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Part {
    Real,
    Imag,
}

impl fmt::Display for Part {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Part::Real => "re",
            Part::Imag => "im",
        })
    }
}

/// Orders by ascending `x`, real before imaginary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupKey {
    pub x: usize,
    pub part: Part,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupMember {
    pub z: usize,
    /// `Re o_{z,z⊕x}` for real groups, `Im o_{z,z⊕x}` for imaginary groups.
    pub coeff: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementGroup {
    pub n_qubits: usize,
    pub x: usize,
    pub part: Part,
    pub members: Vec<GroupMember>,
}

impl MeasurementGroup {
    pub fn key(&self) -> GroupKey {
        GroupKey {
            x: self.x,
            part: self.part,
        }
    }

    /// `max_z |c_{z,z⊕x}|`, the per-shot standard-deviation bound of this group.
    pub fn max_abs_coeff(&self) -> f64 {
        self.members
            .iter()
            .map(|m| m.coeff.abs())
            .fold(0.0, f64::max)
    }

    pub fn is_diagonal(&self) -> bool {
        self.x == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementPlan {
    pub n_qubits: usize,
    pub groups: Vec<MeasurementGroup>,
}

impl MeasurementPlan {
    pub fn circuit_count(&self) -> usize {
        self.groups.len()
    }

    pub fn from_hamiltonian(h: &SparseHermitian) -> Self {
        group_terms(h.n_qubits(), &decompose(h))
    }

    pub fn find(&self, key: GroupKey) -> Option<&MeasurementGroup> {
        self.groups
            .binary_search_by_key(&key, MeasurementGroup::key)
            .ok()
            .map(|i| &self.groups[i])
    }

    pub fn breakdown(&self) -> PlanBreakdown {
        let mut b = PlanBreakdown::default();
        for g in &self.groups {
            match (g.is_diagonal(), g.part) {
                (true, _) => b.diagonal += 1,
                (false, Part::Real) => b.real += 1,
                (false, Part::Imag) => b.imag += 1,
            }
            b.members += g.members.len();
            b.max_cnots = b.max_cnots.max(g.x.count_ones() as usize);
        }
        b
    }
}

/// Circuit accounting of a plan.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PlanBreakdown {
    /// Ancilla-free computational-basis circuits (0 or 1).
    pub diagonal: usize,
    pub real: usize,
    pub imag: usize,
    pub members: usize,
    pub max_cnots: usize,
}

impl PlanBreakdown {
    pub fn total(&self) -> usize {
        self.diagonal + self.real + self.imag
    }
}

/// Groups SB terms by `(x, part)`.
///
/// A coefficient with both parts nonzero contributes to both the real and the
/// imaginary group of its displacement. Counting sort on the slot `2x + part`: one
/// counting pass, one filling pass, and the slots come out already in key order, so the
/// cost is `O(T + 2^N)`.
pub fn group_terms(n_qubits: usize, terms: &[SbTerm]) -> MeasurementPlan {
    let parts = |t: &SbTerm| {
        let x = t.z ^ t.z_prime;
        [t.coeff.re != 0.0, x != 0 && t.coeff.im != 0.0]
    };
    let slots = 2 * (terms.iter().map(SbTerm::displacement).max().unwrap_or(0) + 1);
    let mut counts = vec![0usize; slots];
    for t in terms {
        let x = t.displacement();
        let [re, im] = parts(t);
        counts[2 * x] += re as usize;
        counts[2 * x + 1] += im as usize;
    }
    let mut members: Vec<Vec<GroupMember>> =
        counts.iter().map(|&c| Vec::with_capacity(c)).collect();
    for t in terms {
        let x = t.displacement();
        let [re, im] = parts(t);
        if re {
            members[2 * x].push(GroupMember {
                z: t.z,
                coeff: t.coeff.re,
            });
        }
        if im {
            members[2 * x + 1].push(GroupMember {
                z: t.z,
                coeff: t.coeff.im,
            });
        }
    }
    let groups = members
        .into_iter()
        .enumerate()
        .filter(|(_, m)| !m.is_empty())
        .map(|(slot, members)| MeasurementGroup {
            n_qubits,
            x: slot / 2,
            part: if slot % 2 == 0 {
                Part::Real
            } else {
                Part::Imag
            },
            members,
        })
        .collect();
    MeasurementPlan { n_qubits, groups }
}
