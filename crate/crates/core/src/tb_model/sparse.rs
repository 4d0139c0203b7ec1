use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::lattice::qubits_for_dimension;
use crate::{Complex, Error, Result};

/// Imaginary parts of diagonal entries below this are treated as round-off.
const DIAGONAL_IMAG_TOLERANCE: f64 = 1e-12;

/// Relative threshold below which a real or imaginary component produced by the
/// folded product is treated as cancellation residue and dropped.
pub const FOLD_DROP_TOLERANCE: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Entry {
    pub row: usize,
    pub col: usize,
    pub value: Complex,
}

/// Upper-triangle storage of a Hermitian matrix of arbitrary dimension.
///
/// Entries are sorted by `(row, col)`, nonzero, unique and satisfy `row <= col`.
#[derive(Debug, Clone, PartialEq)]
pub struct RawHermitian {
    dim: usize,
    entries: Vec<Entry>,
}

impl RawHermitian {
    /// Canonicalises a list of triplets: lower-triangle entries are mirrored to the upper
    /// triangle (conjugated), duplicates summed and exact zeros dropped.
    pub fn from_triplets<I>(dim: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, Complex)>,
    {
        let mut acc: BTreeMap<(usize, usize), Complex> = BTreeMap::new();
        for (r, c, v) in triplets {
            if r >= dim || c >= dim {
                return Err(Error::InvalidMatrix(format!(
                    "entry ({r},{c}) outside dimension {dim}"
                )));
            }
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::InvalidMatrix(format!(
                    "non-finite entry at ({r},{c})"
                )));
            }
            let (key, v) = if r <= c {
                ((r, c), v)
            } else {
                ((c, r), v.conj())
            };
            *acc.entry(key).or_default() += v;
        }
        let mut entries = Vec::with_capacity(acc.len());
        for ((row, col), mut value) in acc {
            if row == col {
                if value.im.abs() > DIAGONAL_IMAG_TOLERANCE * value.re.abs().max(1.0) {
                    return Err(Error::InvalidMatrix(format!(
                        "diagonal entry ({row},{row}) has imaginary part {}",
                        value.im
                    )));
                }
                value.im = 0.0;
            }
            if value != Complex::new(0.0, 0.0) {
                entries.push(Entry { row, col, value });
            }
        }
        Ok(Self { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }
}

/// A sparse Hermitian matrix whose dimension is `2^n_qubits`.
///
/// Only the upper triangle is stored; the lower triangle is implied by conjugate
/// symmetry, so hermiticity holds structurally.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseHermitian {
    n_qubits: usize,
    entries: Vec<Entry>,
}

impl SparseHermitian {
    pub fn from_raw(raw: RawHermitian) -> Result<Self> {
        if !raw.dim.is_power_of_two() {
            return Err(Error::InvalidMatrix(format!(
                "dimension {} is not a power of two",
                raw.dim
            )));
        }
        Ok(Self {
            n_qubits: qubits_for_dimension(raw.dim),
            entries: raw.entries,
        })
    }

    pub fn from_triplets<I>(n_qubits: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, Complex)>,
    {
        Self::from_raw(RawHermitian::from_triplets(1 << n_qubits, triplets)?)
    }

    /// Takes the upper triangle of a dense matrix; the caller is responsible for it
    /// being Hermitian.
    pub fn from_dense_upper(m: &DMatrix<Complex>) -> Result<Self> {
        let dim = m.nrows();
        if dim != m.ncols() {
            return Err(Error::InvalidMatrix("matrix is not square".into()));
        }
        let triplets = (0..dim)
            .flat_map(|r| (r..dim).map(move |c| (r, c)))
            .map(|(r, c)| (r, c, m[(r, c)]));
        Self::from_raw(RawHermitian::from_triplets(dim, triplets)?)
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let dim = values.len();
        Self::from_raw(RawHermitian::from_triplets(
            dim,
            values
                .iter()
                .enumerate()
                .map(|(i, &v)| (i, i, Complex::new(v, 0.0))),
        )?)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    /// Stored (upper-triangle) nonzeros.
    pub fn nnz_stored(&self) -> usize {
        self.entries.len()
    }

    /// Nonzeros of the full matrix.
    pub fn nnz_full(&self) -> usize {
        self.entries
            .iter()
            .map(|e| if e.row == e.col { 1 } else { 2 })
            .sum()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex {
        let (key, conj) = if row <= col {
            ((row, col), false)
        } else {
            ((col, row), true)
        };
        match self.entries.binary_search_by_key(&key, |e| (e.row, e.col)) {
            Ok(i) if conj => self.entries[i].value.conj(),
            Ok(i) => self.entries[i].value,
            Err(_) => Complex::new(0.0, 0.0),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.value.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_real(&self) -> bool {
        self.entries.iter().all(|e| e.value.im == 0.0)
    }

    pub fn to_dense(&self) -> DMatrix<Complex> {
        let dim = self.dim();
        let mut m = DMatrix::zeros(dim, dim);
        for e in &self.entries {
            m[(e.row, e.col)] = e.value;
            if e.row != e.col {
                m[(e.col, e.row)] = e.value.conj();
            }
        }
        m
    }

    /// Full-matrix rows as `(col, value)` lists sorted by column.
    pub(crate) fn full_rows(&self) -> Vec<Vec<(usize, Complex)>> {
        let mut rows = vec![Vec::new(); self.dim()];
        for e in &self.entries {
            rows[e.row].push((e.col, e.value));
            if e.row != e.col {
                rows[e.col].push((e.row, e.value.conj()));
            }
        }
        for r in &mut rows {
            r.sort_by_key(|&(c, _)| c);
        }
        rows
    }

    pub fn matvec(&self, v: &[Complex]) -> Result<Vec<Complex>> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: v.len(),
            });
        }
        let mut out = vec![Complex::new(0.0, 0.0); v.len()];
        for e in &self.entries {
            out[e.row] += e.value * v[e.col];
            if e.row != e.col {
                out[e.col] += e.value.conj() * v[e.row];
            }
        }
        Ok(out)
    }

    /// `⟨v|H|v⟩`, real by hermiticity.
    pub fn expectation(&self, v: &[Complex]) -> Result<f64> {
        let hv = self.matvec(v)?;
        Ok(v.iter().zip(&hv).map(|(a, b)| (a.conj() * b).re).sum())
    }

    /// Returns `H + shift·I`.
    pub fn shifted(&self, shift: f64) -> Self {
        let mut triplets: Vec<(usize, usize, Complex)> = self
            .entries
            .iter()
            .map(|e| (e.row, e.col, e.value))
            .collect();
        triplets.extend((0..self.dim()).map(|i| (i, i, Complex::new(shift, 0.0))));
        Self::from_triplets(self.n_qubits, triplets).expect("shift preserves validity")
    }
}

/// `(H - ωI)²` as an exact sparse product, stored as an upper triangle.
///
/// Rows are computed in parallel; each row accumulates in a fixed order, so the result
/// does not depend on the schedule. Real or imaginary components smaller than
/// [`FOLD_DROP_TOLERANCE`] times the largest entry magnitude are cancellation residue of
/// the product and are set to zero.
pub fn fold(h: &SparseHermitian, omega: f64) -> SparseHermitian {
    let a = h.shifted(-omega);
    let rows = a.full_rows();
    let product: Vec<Vec<(usize, Complex)>> = (0..rows.len())
        .into_par_iter()
        .map(|i| {
            let mut acc: BTreeMap<usize, Complex> = BTreeMap::new();
            for &(k, aik) in &rows[i] {
                for &(j, akj) in &rows[k] {
                    if j >= i {
                        *acc.entry(j).or_default() += aik * akj;
                    }
                }
            }
            acc.into_iter().collect()
        })
        .collect();

    let scale = product
        .iter()
        .flatten()
        .map(|(_, v)| v.norm())
        .fold(0.0, f64::max);
    let cutoff = FOLD_DROP_TOLERANCE * scale;
    let chop = |x: f64| if x.abs() <= cutoff { 0.0 } else { x };

    let mut entries = Vec::new();
    for (row, cols) in product.into_iter().enumerate() {
        for (col, v) in cols {
            let value = if row == col {
                Complex::new(chop(v.re), 0.0)
            } else {
                Complex::new(chop(v.re), chop(v.im))
            };
            if value != Complex::new(0.0, 0.0) {
                entries.push(Entry { row, col, value });
            }
        }
    }
    SparseHermitian {
        n_qubits: h.n_qubits,
        entries,
    }
}
