use std::collections::HashMap;
use std::fmt;

use crate::qsim::PauliMask;
use crate::tb_model::SparseHermitian;
use crate::{Complex, Error, Result};

/// Largest register accepted by [`pauli_decompose`].
pub const MAX_PAULI_QUBITS: usize = 12;

/// Coefficients below this fraction of `max |H_ij|` are treated as zero.
pub const PAULI_DROP_TOLERANCE: f64 = 1e-12;

/// A weighted Pauli word. Bit `N - 1 - q` of `x` / `z` describes qubit `q`, whose letter
/// is written at position `q` of the word.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliTerm {
    pub n_qubits: usize,
    pub x: usize,
    pub z: usize,
    pub coeff: f64,
}

impl PauliTerm {
    pub fn mask(&self) -> PauliMask {
        PauliMask {
            x: self.x,
            z: self.z,
        }
    }

    pub fn support(&self) -> usize {
        self.x | self.z
    }

    pub fn letter(&self, qubit: usize) -> char {
        let bit = 1 << (self.n_qubits - 1 - qubit);
        match (self.x & bit != 0, self.z & bit != 0) {
            (false, false) => 'I',
            (true, false) => 'X',
            (true, true) => 'Y',
            (false, true) => 'Z',
        }
    }

    pub fn word(&self) -> String {
        (0..self.n_qubits).map(|q| self.letter(q)).collect()
    }

    /// Parses a word such as `"XIZY"`.
    pub fn from_word(word: &str, coeff: f64) -> Result<Self> {
        let n = word.len();
        let (mut x, mut z) = (0, 0);
        for (q, ch) in word.chars().enumerate() {
            let bit = 1 << (n - 1 - q);
            match ch {
                'I' => {}
                'X' => x |= bit,
                'Y' => {
                    x |= bit;
                    z |= bit;
                }
                'Z' => z |= bit,
                _ => {
                    return Err(Error::Parse(format!(
                        "invalid Pauli letter {ch:?} in {word:?}"
                    )))
                }
            }
        }
        Ok(Self {
            n_qubits: n,
            x,
            z,
            coeff,
        })
    }
}

impl fmt::Display for PauliTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+e}*{}", self.coeff, self.word())
    }
}

/// Letters commute or coincide on every qubit.
pub fn qubit_wise_commute(p: &PauliTerm, q: &PauliTerm) -> bool {
    p.support() & q.support() & ((p.x ^ q.x) | (p.z ^ q.z)) == 0
}

/// The two words anticommute on an even number of qubits.
pub fn commute(p: &PauliTerm, q: &PauliTerm) -> bool {
    ((p.x & q.z) ^ (p.z & q.x)).count_ones().is_multiple_of(2)
}

type Block = HashMap<(usize, usize), Complex>;

/// Exact Pauli expansion of a sparse Hermitian.
///
/// Splits the matrix on its top qubit into 2×2 blocks, forms the `I, X, Y, Z` block
/// combinations, and recurses on the non-empty ones. Terms come out sorted by `(x, z)`.
pub fn pauli_decompose(h: &SparseHermitian) -> Result<Vec<PauliTerm>> {
    let n = h.n_qubits();
    if n > MAX_PAULI_QUBITS {
        return Err(Error::QubitBudget {
            needed: n,
            budget: MAX_PAULI_QUBITS,
        });
    }
    let mut full: Block = HashMap::new();
    for e in h.entries() {
        full.insert((e.row, e.col), e.value);
        if e.row != e.col {
            full.insert((e.col, e.row), e.value.conj());
        }
    }
    let threshold = PAULI_DROP_TOLERANCE * h.max_abs();
    let mut terms = Vec::new();
    split(full, n, n, 0, 0, threshold, &mut terms);
    terms.sort_by_key(|t| (t.x, t.z));
    Ok(terms)
}

fn split(
    block: Block,
    n: usize,
    level: usize,
    x: usize,
    z: usize,
    threshold: f64,
    out: &mut Vec<PauliTerm>,
) {
    if level == 0 {
        let c = block.get(&(0, 0)).copied().unwrap_or_default();
        debug_assert!(
            c.im.abs() <= threshold.max(1e-12),
            "non-Hermitian coefficient {c}"
        );
        if c.re.abs() > threshold {
            out.push(PauliTerm {
                n_qubits: n,
                x,
                z,
                coeff: c.re,
            });
        }
        return;
    }
    let bit = 1 << (level - 1);
    let low = bit - 1;
    let half = Complex::new(0.5, 0.0);
    let i_half = Complex::new(0.0, 0.5);
    // Children in letter order I, X, Y, Z.
    let mut children: [Block; 4] = Default::default();
    for ((r, c), v) in block {
        let key = (r & low, c & low);
        let (rb, cb) = (r & bit != 0, c & bit != 0);
        let mut add =
            |letter: usize, w: Complex| *children[letter].entry(key).or_default() += w * v;
        match (rb, cb) {
            (false, false) => {
                add(0, half);
                add(3, half);
            }
            (true, true) => {
                add(0, half);
                add(3, -half);
            }
            (false, true) => {
                add(1, half);
                add(2, i_half);
            }
            (true, false) => {
                add(1, half);
                add(2, -i_half);
            }
        }
    }
    let tiny = threshold * 1e-3;
    for (letter, mut child) in children.into_iter().enumerate() {
        child.retain(|_, v| v.norm() > tiny);
        if child.is_empty() {
            continue;
        }
        let (bx, bz) = match letter {
            0 => (0, 0),
            1 => (bit, 0),
            2 => (bit, bit),
            _ => (0, bit),
        };
        split(child, n, level - 1, x | bx, z | bz, threshold, out);
    }
}

/// `Σ c·P` as a sparse Hermitian.
pub fn pauli_rebuild(n_qubits: usize, terms: &[PauliTerm]) -> Result<SparseHermitian> {
    let dim = 1usize << n_qubits;
    let mut acc: HashMap<(usize, usize), Complex> = HashMap::new();
    for t in terms {
        let m = t.mask();
        for k in 0..dim {
            // P|k⟩ = phase·|k⊕x⟩, i.e. P[k⊕x][k] = phase.
            let row = k ^ t.x;
            if row <= k {
                *acc.entry((row, k)).or_default() += m.phase_on(k) * t.coeff;
            }
        }
    }
    SparseHermitian::from_triplets(n_qubits, acc.into_iter().map(|((r, c), v)| (r, c, v)))
}
