use nalgebra::{DMatrix, SymmetricEigen};

use crate::tb_model::SparseHermitian;
use crate::{Complex, Error, Result};

/// Dense diagonalisation guard.
pub const MAX_DENSE_QUBITS: usize = 14;

#[derive(Debug, Clone)]
pub struct Eigensystem {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `i` is the eigenvector of `values[i]`, when requested.
    pub vectors: Option<DMatrix<Complex>>,
}

impl Eigensystem {
    /// Eigenvalue closest to `omega` (first one on ties).
    pub fn closest_to(&self, omega: f64) -> Option<(usize, f64)> {
        self.values
            .iter()
            .copied()
            .enumerate()
            .min_by(|a, b| (a.1 - omega).abs().total_cmp(&(b.1 - omega).abs()))
    }

    pub fn vector(&self, i: usize) -> Option<Vec<Complex>> {
        self.vectors
            .as_ref()
            .map(|v| v.column(i).iter().copied().collect())
    }
}

/// Full Hermitian eigendecomposition.
pub fn exact_diagonalize(h: &SparseHermitian, with_vectors: bool) -> Result<Eigensystem> {
    if h.n_qubits() > MAX_DENSE_QUBITS {
        return Err(Error::QubitBudget {
            needed: h.n_qubits(),
            budget: MAX_DENSE_QUBITS,
        });
    }
    let dense = h.to_dense();
    if !with_vectors {
        let mut values: Vec<f64> = dense.symmetric_eigenvalues().iter().copied().collect();
        values.sort_by(f64::total_cmp);
        return Ok(Eigensystem {
            values,
            vectors: None,
        });
    }
    let eig = SymmetricEigen::new(dense);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let n = order.len();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(Eigensystem {
        values,
        vectors: Some(vectors),
    })
}
