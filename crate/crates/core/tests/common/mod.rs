//! Independent dense oracles shared by the integration tests.
#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::Rng;
use sbvqe::{Complex, SparseHermitian, Statevector};

pub fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

/// Random Hermitian on `n` qubits with roughly `density` of its upper entries set.
pub fn random_hermitian<R: Rng>(n: usize, density: f64, rng: &mut R) -> SparseHermitian {
    let dim = 1usize << n;
    let mut t = Vec::new();
    for r in 0..dim {
        t.push((r, r, c(rng.random_range(-2.0..2.0), 0.0)));
        for col in r + 1..dim {
            if rng.random::<f64>() < density {
                let re = rng.random_range(-1.0..1.0);
                let im = if rng.random::<bool>() {
                    rng.random_range(-1.0..1.0)
                } else {
                    0.0
                };
                t.push((r, col, c(re, im)));
            }
        }
    }
    SparseHermitian::from_triplets(n, t).unwrap()
}

pub fn random_state<R: Rng>(n: usize, rng: &mut R) -> Statevector {
    let amps = (0..1usize << n)
        .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    Statevector::from_amplitudes(amps).unwrap()
}

pub fn random_angles<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n)
        .map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
        .collect()
}

/// Dense `⟨ψ|A|ψ⟩`.
pub fn quadratic_form(a: &DMatrix<Complex>, psi: &Statevector) -> f64 {
    let v = nalgebra::DVector::from_column_slice(psi.amplitudes());
    (v.adjoint() * a * &v)[(0, 0)].re
}

/// Dense `(H - ωI)²`.
pub fn dense_fold(h: &SparseHermitian, omega: f64) -> DMatrix<Complex> {
    let d = h.to_dense() - DMatrix::<Complex>::identity(h.dim(), h.dim()) * c(omega, 0.0);
    &d * &d
}

/// Hermitian eigenvalues of a dense matrix, ascending.
pub fn dense_eigenvalues(m: &DMatrix<Complex>) -> Vec<f64> {
    let mut v: Vec<f64> = m
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn pauli_matrix(letter: char) -> DMatrix<Complex> {
    let (o, l, i) = (c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0));
    match letter {
        'I' => DMatrix::from_row_slice(2, 2, &[l, o, o, l]),
        'X' => DMatrix::from_row_slice(2, 2, &[o, l, l, o]),
        'Y' => DMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
        'Z' => DMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
        _ => panic!("bad letter"),
    }
}

/// Kronecker product of single-qubit letters, leftmost letter on the high bit.
pub fn word_matrix(word: &str) -> DMatrix<Complex> {
    word.chars()
        .fold(DMatrix::from_element(1, 1, c(1.0, 0.0)), |acc, ch| {
            acc.kronecker(&pauli_matrix(ch))
        })
}

pub fn max_abs_diff(a: &DMatrix<Complex>, b: &DMatrix<Complex>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}
