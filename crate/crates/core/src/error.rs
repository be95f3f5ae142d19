//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors reported by the simulator.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// An exact-arithmetic operation exceeded the 128-bit integer range.
    #[error("exact amplitude arithmetic overflowed 128-bit integers")]
    RingOverflow,

    /// Text input could not be parsed.
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    /// Operand sizes (qubit counts, vector lengths) disagree.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// A dense representation was requested for too many qubits.
    #[error("{what} limited to {limit} qubits, requested {requested}")]
    TooLarge {
        what: &'static str,
        limit: usize,
        requested: usize,
    },

    /// Affine-space basis vectors are linearly dependent.
    #[error("basis vectors are linearly dependent")]
    DependentBasis,

    /// An extension direction already lies in the span of the support.
    #[error("extension direction already lies in the affine span")]
    DirectionInSpan,

    /// Phase data violates the stabilizer-state constraints.
    #[error("invalid phase data: {0}")]
    InvalidPhaseData(String),

    /// A dense amplitude vector is not a stabilizer state.
    #[error("amplitudes do not describe a stabilizer state: {0}")]
    NotStabilizer(String),

    /// Projector factors fail to commute.
    #[error("projector factors {0} and {1} do not commute")]
    NonCommuting(usize, usize),

    /// A projector factor carries a non-real global phase.
    #[error("Pauli operator with phase ±i is not Hermitian")]
    NonHermitian,

    /// Too many projector factors for the qubit count.
    #[error("projector has {factors} factors on {qubits} qubits")]
    TooManyFactors { factors: usize, qubits: usize },

    /// The requested block policy cannot cover the T-count.
    #[error("block policy {policy:?} cannot cover t = {t}")]
    PolicyCannotCover { t: usize, policy: Vec<usize> },

    /// Unsupported block size or census mode.
    #[error("unsupported request: {0}")]
    Unsupported(String),

    /// Invalid numerical parameter.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
