use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("supercell dimensions must be positive, got {0}x{1}x{2}")]
    InvalidDims(usize, usize, usize),

    #[error("basis label out of range: {0}")]
    BasisOutOfRange(String),

    #[error("no Slater-Koster parameters for species pair {0}-{1}")]
    UnknownSpeciesPair(String, String),

    #[error("invalid tight-binding parameters: {0}")]
    InvalidParams(String),

    #[error("Hamiltonian needs {needed} qubits, budget is {budget}")]
    QubitBudget { needed: usize, budget: usize },

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("parameter count mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("target sampling error must be positive, got {0}")]
    InvalidEpsilon(f64),

    #[error("invalid shot count: {0}")]
    InvalidShots(String),

    #[error("non-finite cost at iteration {iteration}")]
    NonFiniteCost { iteration: usize },

    #[error("tally of {tally_bits} bits does not belong to a group read out on {group_bits} bits")]
    TallyMismatch {
        tally_bits: usize,
        group_bits: usize,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
