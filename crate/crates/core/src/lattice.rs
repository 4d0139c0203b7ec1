//! Finite BX₃ perovskite supercells with closed boundaries.
//!
//! Positions are in units of the cubic lattice constant. Each unit cell places the
//! cation B at the cell origin and the three anions X at the half-edge positions
//! `(½,0,0)`, `(0,½,0)`, `(0,0,½)`. Nearest neighbours sit exactly half a lattice
//! constant apart and always pair a B atom with an X atom.

use std::collections::HashMap;
use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Fixed internal lattice constant. Only direction cosines enter the Hamiltonian.
pub const LATTICE_CONSTANT: f64 = 1.0;

/// Distance tolerance used when matching neighbours.
pub const NEIGHBOR_TOLERANCE: f64 = 1e-9;

pub const DEFAULT_CATION: &str = "Pb";
pub const DEFAULT_ANION: &str = "I";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SpeciesKind {
    /// The B-site cation.
    Cation,
    /// An X-site anion.
    Anion,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AtomSpecies {
    pub name: String,
    pub kind: SpeciesKind,
    /// 4 without spin, 8 with spin.
    pub orbital_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AtomSite {
    pub species: AtomSpecies,
    pub position: [f64; 3],
    pub site_index: usize,
}

/// One nearest-neighbour relation, stored once per direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeighborPair {
    pub from: usize,
    pub to: usize,
    /// Unit vector pointing from `from` to `to`.
    pub direction: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SupercellDims {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
}

impl SupercellDims {
    pub fn new(nx: usize, ny: usize, nz: usize) -> Self {
        Self { nx, ny, nz }
    }

    pub fn cell_count(&self) -> usize {
        self.nx * self.ny * self.nz
    }
}

impl fmt::Display for SupercellDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}", self.nx, self.ny, self.nz)
    }
}

impl std::str::FromStr for SupercellDims {
    type Err = Error;

    /// Accepts `nx,ny,nz` or `nxXnyXnz`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split([',', 'x', 'X']).map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!(
                "expected three dimensions, got {s:?}"
            )));
        }
        let mut dims = [0usize; 3];
        for (d, p) in dims.iter_mut().zip(&parts) {
            *d = p
                .parse()
                .map_err(|_| Error::Parse(format!("bad dimension {p:?} in {s:?}")))?;
        }
        Ok(Self::new(dims[0], dims[1], dims[2]))
    }
}

/// sp³ orbitals in basis order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orbital {
    S = 0,
    Px = 1,
    Py = 2,
    Pz = 3,
}

impl Orbital {
    pub const ALL: [Orbital; 4] = [Orbital::S, Orbital::Px, Orbital::Py, Orbital::Pz];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl TryFrom<usize> for Orbital {
    type Error = Error;

    fn try_from(value: usize) -> Result<Self> {
        Orbital::ALL
            .get(value)
            .copied()
            .ok_or_else(|| Error::BasisOutOfRange(format!("orbital {value}")))
    }
}

#[derive(Debug, Clone)]
pub struct Supercell {
    pub dims: SupercellDims,
    pub spin: bool,
    pub atoms: Vec<AtomSite>,
    pub neighbor_pairs: Vec<NeighborPair>,
}

impl Supercell {
    /// Builds a Pb/I supercell.
    pub fn build(dims: SupercellDims, spin: bool) -> Result<Self> {
        Self::build_with_species(dims, spin, DEFAULT_CATION, DEFAULT_ANION)
    }

    pub fn build_with_species(
        dims: SupercellDims,
        spin: bool,
        cation: &str,
        anion: &str,
    ) -> Result<Self> {
        let SupercellDims { nx, ny, nz } = dims;
        if nx == 0 || ny == 0 || nz == 0 {
            return Err(Error::InvalidDims(nx, ny, nz));
        }
        let orbital_count = if spin { 8 } else { 4 };
        let species = |name: &str, kind| AtomSpecies {
            name: name.to_string(),
            kind,
            orbital_count,
        };
        let b = species(cation, SpeciesKind::Cation);
        let x = species(anion, SpeciesKind::Anion);

        // Coordinates doubled so that every site is on the integer lattice.
        let mut atoms = Vec::with_capacity(4 * dims.cell_count());
        let mut by_position: HashMap<[i64; 3], usize> = HashMap::new();
        for ix in 0..nx as i64 {
            for iy in 0..ny as i64 {
                for iz in 0..nz as i64 {
                    let origin = [2 * ix, 2 * iy, 2 * iz];
                    let mut place = |sp: &AtomSpecies, offset: [i64; 3]| {
                        let p2 = [
                            origin[0] + offset[0],
                            origin[1] + offset[1],
                            origin[2] + offset[2],
                        ];
                        let site_index = atoms.len();
                        by_position.insert(p2, site_index);
                        atoms.push(AtomSite {
                            species: sp.clone(),
                            position: p2.map(|c| c as f64 * 0.5 * LATTICE_CONSTANT),
                            site_index,
                        });
                    };
                    place(&b, [0, 0, 0]);
                    place(&x, [1, 0, 0]);
                    place(&x, [0, 1, 0]);
                    place(&x, [0, 0, 1]);
                }
            }
        }

        let mut neighbor_pairs = Vec::new();
        for atom in &atoms {
            let p2 = atom
                .position
                .map(|c| (c * 2.0 / LATTICE_CONSTANT).round() as i64);
            for axis in 0..3 {
                for sign in [1i64, -1] {
                    let mut q = p2;
                    q[axis] += sign;
                    if let Some(&to) = by_position.get(&q) {
                        let mut direction = [0.0; 3];
                        direction[axis] = sign as f64;
                        neighbor_pairs.push(NeighborPair {
                            from: atom.site_index,
                            to,
                            direction,
                        });
                    }
                }
            }
        }
        neighbor_pairs.sort_by_key(|p| (p.from, p.to));

        Ok(Self {
            dims,
            spin,
            atoms,
            neighbor_pairs,
        })
    }

    pub fn spin_channels(&self) -> usize {
        if self.spin {
            2
        } else {
            1
        }
    }

    pub fn orbitals_per_atom(&self) -> usize {
        4 * self.spin_channels()
    }

    /// Unpadded Hamiltonian dimension.
    pub fn basis_dimension(&self) -> usize {
        self.atoms.len() * self.orbitals_per_atom()
    }

    /// Qubits needed for the ansatz register (`⌈log₂ D⌉`), excluding the GHZ ancilla.
    pub fn register_qubits(&self) -> usize {
        qubits_for_dimension(self.basis_dimension())
    }

    /// Site-major, then spin, then orbital.
    pub fn basis_index(&self, site: usize, orbital: Orbital, spin_channel: usize) -> Result<usize> {
        if site >= self.atoms.len() {
            return Err(Error::BasisOutOfRange(format!("site {site}")));
        }
        if spin_channel >= self.spin_channels() {
            return Err(Error::BasisOutOfRange(format!(
                "spin channel {spin_channel}"
            )));
        }
        Ok(site * self.orbitals_per_atom() + spin_channel * 4 + orbital.index())
    }

    /// Inverse of [`Supercell::basis_index`].
    pub fn basis_label(&self, index: usize) -> Result<(usize, Orbital, usize)> {
        if index >= self.basis_dimension() {
            return Err(Error::BasisOutOfRange(format!("basis index {index}")));
        }
        let per_atom = self.orbitals_per_atom();
        let site = index / per_atom;
        let rest = index % per_atom;
        Ok((site, Orbital::try_from(rest % 4)?, rest / 4))
    }

    pub fn neighbors_of(&self, site: usize) -> impl Iterator<Item = &NeighborPair> {
        self.neighbor_pairs.iter().filter(move |p| p.from == site)
    }

    /// One atom per line: `site_index species x y z`.
    pub fn write_dump<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for a in &self.atoms {
            writeln!(
                w,
                "{} {} {} {} {}",
                a.site_index, a.species.name, a.position[0], a.position[1], a.position[2]
            )?;
        }
        Ok(())
    }
}

pub fn qubits_for_dimension(dim: usize) -> usize {
    dim.max(1).next_power_of_two().trailing_zeros() as usize
}
