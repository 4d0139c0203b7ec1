//! sp³ tight-binding Hamiltonians on finite supercells.

mod eigen;
mod matrix_market;
mod params;
mod slater_koster;
mod sparse;

pub use eigen::{exact_diagonalize, Eigensystem, MAX_DENSE_QUBITS};
pub use matrix_market::{read_matrix_market, write_matrix_market};
pub use params::{OnsiteEnergies, TbParameterSet, TwoCenterIntegrals, FIXTURE_PBI3};
pub use slater_koster::{slater_koster_block, soc_block};
pub use sparse::{fold, Entry, RawHermitian, SparseHermitian, FOLD_DROP_TOLERANCE};

use crate::lattice::{qubits_for_dimension, Supercell};
use crate::{Complex, Error, Result};

/// Diagonal energy placed on padding states, relative to the fold reference.
pub const PADDING_OFFSET: f64 = 1.0e3;

pub const DEFAULT_QUBIT_BUDGET: usize = 14;

#[derive(Debug, Clone, Copy)]
pub struct AssemblyOptions {
    pub max_qubits: usize,
    /// Reference energy used to place padding states far from the folding window.
    pub omega_hint: f64,
}

impl Default for AssemblyOptions {
    fn default() -> Self {
        Self {
            max_qubits: DEFAULT_QUBIT_BUDGET,
            omega_hint: 0.0,
        }
    }
}

/// Unpadded Hamiltonian in the supercell basis.
pub fn assemble_raw(cell: &Supercell, params: &TbParameterSet, spin: bool) -> Result<RawHermitian> {
    if spin != cell.spin {
        return Err(Error::InvalidParams(format!(
            "spin flag {spin} does not match the supercell (built with spin = {})",
            cell.spin
        )));
    }
    let n_spin = cell.spin_channels();
    let mut triplets: Vec<(usize, usize, Complex)> = Vec::new();

    for atom in &cell.atoms {
        let onsite = params.onsite_for(&atom.species.name)?;
        let lambda = if spin {
            params.soc_for(&atom.species.name)
        } else {
            0.0
        };
        let base = atom.site_index * cell.orbitals_per_atom();
        for s in 0..n_spin {
            triplets.push((base + s * 4, base + s * 4, Complex::new(onsite.e_s, 0.0)));
            for p in 1..4 {
                triplets.push((
                    base + s * 4 + p,
                    base + s * 4 + p,
                    Complex::new(onsite.e_p, 0.0),
                ));
            }
        }
        if lambda != 0.0 {
            let soc = soc_block(lambda);
            for (i, row) in soc.iter().enumerate() {
                for (j, &v) in row.iter().enumerate().skip(i) {
                    if v != Complex::new(0.0, 0.0) {
                        triplets.push((base + i, base + j, v));
                    }
                }
            }
        }
    }

    for pair in &cell.neighbor_pairs {
        if pair.from > pair.to {
            continue;
        }
        let a = &cell.atoms[pair.from];
        let b = &cell.atoms[pair.to];
        let integrals = params.integrals_for(&a.species.name, &b.species.name)?;
        let block = slater_koster_block(&integrals, pair.direction)?;
        for s in 0..n_spin {
            for (oa, row) in block.iter().enumerate() {
                for (ob, &v) in row.iter().enumerate() {
                    if v != 0.0 {
                        let r = cell.basis_index(pair.from, oa.try_into()?, s)?;
                        let c = cell.basis_index(pair.to, ob.try_into()?, s)?;
                        triplets.push((r, c, Complex::new(v, 0.0)));
                    }
                }
            }
        }
    }

    RawHermitian::from_triplets(cell.basis_dimension(), triplets)
}

pub fn assemble_hamiltonian(
    cell: &Supercell,
    params: &TbParameterSet,
    spin: bool,
) -> Result<SparseHermitian> {
    assemble_hamiltonian_with(cell, params, spin, AssemblyOptions::default())
}

pub fn assemble_hamiltonian_with(
    cell: &Supercell,
    params: &TbParameterSet,
    spin: bool,
    options: AssemblyOptions,
) -> Result<SparseHermitian> {
    let needed = qubits_for_dimension(cell.basis_dimension());
    if needed > options.max_qubits {
        return Err(Error::QubitBudget {
            needed,
            budget: options.max_qubits,
        });
    }
    let raw = assemble_raw(cell, params, spin)?;
    pad_to_power_of_two(raw, options.omega_hint)
}

/// Embeds `raw` in the top-left corner of a `2^N` matrix. Padding states get diagonal
/// energy `omega_hint + PADDING_OFFSET` so they stay far away from any fold window
/// near `omega_hint`.
pub fn pad_to_power_of_two(raw: RawHermitian, omega_hint: f64) -> Result<SparseHermitian> {
    let dim = raw.dim();
    if dim == 0 {
        return Err(Error::InvalidMatrix("empty Hamiltonian".into()));
    }
    if dim.is_power_of_two() {
        return SparseHermitian::from_raw(raw);
    }
    let padded = dim.next_power_of_two();
    let pad = Complex::new(omega_hint + PADDING_OFFSET, 0.0);
    let triplets = raw
        .entries()
        .iter()
        .map(|e| (e.row, e.col, e.value))
        .chain((dim..padded).map(|i| (i, i, pad)));
    SparseHermitian::from_raw(RawHermitian::from_triplets(padded, triplets)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{SpeciesKind, SupercellDims};

    fn single_atom_params() -> TbParameterSet {
        TbParameterSet::from_toml_str(
            r#"
            [onsite.Pb]
            e_s = -2.0
            e_p = 1.5
            [onsite.I]
            e_s = -8.0
            e_p = -1.0
            [sk.Pb_I]
            ss_sigma = -1.0
            sp_sigma = 1.0
            ps_sigma = 2.0
            pp_sigma = 2.0
            pp_pi = -0.5
            "#,
        )
        .unwrap()
    }

    #[test]
    fn one_by_one_by_two_with_spin_is_64_dimensional() {
        let cell = Supercell::build(SupercellDims::new(1, 1, 2), true).unwrap();
        let h = assemble_hamiltonian(&cell, &TbParameterSet::pbi3_fixture(), true).unwrap();
        assert_eq!(h.n_qubits(), 6);
        assert_eq!(h.dim(), 64);
    }

    #[test]
    fn isolated_atom_is_diagonal_and_padded() {
        // One B atom with no neighbours: take the first atom of a cell and drop the rest.
        let mut cell = Supercell::build(SupercellDims::new(1, 1, 1), false).unwrap();
        cell.atoms.truncate(1);
        cell.neighbor_pairs.clear();
        assert_eq!(cell.atoms[0].species.kind, SpeciesKind::Cation);
        let h = assemble_hamiltonian(&cell, &single_atom_params(), false).unwrap();
        assert_eq!(h.dim(), 4);
        let d = h.to_dense();
        let expected = [-2.0, 1.5, 1.5, 1.5];
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { expected[i] } else { 0.0 };
                assert_eq!(d[(i, j)], Complex::new(want, 0.0));
            }
        }
    }

    #[test]
    fn padding_rule() {
        let raw = RawHermitian::from_triplets(
            3,
            [
                (0, 0, Complex::new(1.0, 0.0)),
                (1, 2, Complex::new(0.5, 0.0)),
            ],
        )
        .unwrap();
        let h = pad_to_power_of_two(raw.clone(), 0.0).unwrap();
        assert_eq!(h.dim(), 4);
        assert_eq!(h.get(3, 3), Complex::new(1000.0, 0.0));
        assert_eq!(h.nnz_stored(), raw.entries().len() + 1);

        let raw64 = RawHermitian::from_triplets(64, [(5, 9, Complex::new(1.0, 0.0))]).unwrap();
        let h64 = pad_to_power_of_two(raw64.clone(), 3.0).unwrap();
        assert_eq!(h64.entries(), raw64.entries());
    }

    #[test]
    fn qubit_budget_enforced() {
        let cell = Supercell::build(SupercellDims::new(1, 1, 2), true).unwrap();
        let opts = AssemblyOptions {
            max_qubits: 5,
            ..Default::default()
        };
        assert!(matches!(
            assemble_hamiltonian_with(&cell, &TbParameterSet::pbi3_fixture(), true, opts),
            Err(Error::QubitBudget {
                needed: 6,
                budget: 5
            })
        ));
    }

    #[test]
    fn spin_flag_must_match_cell() {
        let cell = Supercell::build(SupercellDims::new(1, 1, 1), false).unwrap();
        assert!(assemble_hamiltonian(&cell, &TbParameterSet::pbi3_fixture(), true).is_err());
    }

    #[test]
    fn soc_makes_entries_complex() {
        let params = TbParameterSet::pbi3_fixture();
        let cell = Supercell::build(SupercellDims::new(1, 1, 1), true).unwrap();
        assert!(!assemble_hamiltonian(&cell, &params, true)
            .unwrap()
            .is_real());
        let cell = Supercell::build(SupercellDims::new(1, 1, 1), false).unwrap();
        assert!(assemble_hamiltonian(&cell, &params, false)
            .unwrap()
            .is_real());
    }
}
