use thiserror::Error;

use crate::state::Basis;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("state is in the {found:?} basis, expected {expected:?}")]
    WrongBasis { expected: Basis, found: Basis },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("gaussian packet width {sigma:.3} too large for dimension {dim} (limit {limit:.3})")]
    PacketTooWide { sigma: f64, dim: usize, limit: f64 },

    #[error("need at least {needed} points inside the fit window, found {found}")]
    InsufficientPoints { needed: usize, found: usize },

    #[error("fidelity never drops below {threshold} within {t_max} steps")]
    NoCrossing { threshold: f64, t_max: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
