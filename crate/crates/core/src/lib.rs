//! Exact and sampled simulation of Clifford+T computations through
//! stabilizer decompositions of tensored magic states `|T⟩^{⊗t}`.
//!
//! The crate is layered bottom-up:
//!
//! * [`phase_ring`]: exact arithmetic in `Z[ω]/√2^e`, `ω = e^{iπ/4}`.
//! * [`gf2`]: bit vectors, bit matrices and affine subspaces over GF(2).
//! * [`pauli`]: Pauli operators and commuting projectors.
//! * [`stabilizer`]: stabilizer states as quadratic phase forms, with
//!   exponential sums, inner products and Pauli projections.
//! * [`catalog`]: exact decompositions of `|T⟩^{⊗k}` for
//!   `k ∈ {1, 2, 3, 6, 12}` and their tensor products.
//! * [`strong_sim`]: exact and sampled projector expectations.
//! * [`gauss_sum`]: closed-form single-Pauli expectations with unique
//!   Gauss-sum counting.
//! * [`dense`]: brute-force state vectors used as the reference.

pub mod catalog;
pub mod dense;
pub mod error;
pub mod gauss_sum;
pub mod gf2;
pub mod pauli;
pub mod phase_ring;
pub mod stabilizer;
pub mod strong_sim;

pub use catalog::{block_cover, block_decomposition, MagicDecomposition};
pub use dense::{DenseState, ExactDenseState};
pub use error::{Error, Result};
pub use gauss_sum::{expect_single_pauli, rank_census, CensusMode, GaussSumReport, RankCensus};
pub use gf2::{AffineSpace, BitMatrix, BitVector};
pub use pauli::{PauliKind, PauliOperator, PauliProjector};
pub use phase_ring::{EighthRootPhase, ExactAmplitude};
pub use stabilizer::{PhaseForm, Shrink, StabilizerState};
pub use strong_sim::{run_task, SimulationMode, SimulationResult, SimulationTask};
