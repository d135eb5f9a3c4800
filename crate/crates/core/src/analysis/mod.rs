//! Reference oracles and post-processing.
//!
//! The dense path in [`dense`] builds every matrix from 2×2 blocks with
//! Kronecker products and never touches the address arithmetic in
//! [`crate::gate`], so agreement between the two is evidence that both are
//! right.

pub mod dense;
mod probabilities;
mod verify;

pub use dense::{dense_step, DenseMatrix, DENSE_MAX_QUBITS};
pub use probabilities::{
    probabilities, ChunkOrderError, ProbabilityAccumulator, ProbabilityReport, ReportFormat,
    DEFAULT_TOP_K,
};
pub use verify::{verify_dense, verify_sparse, verify_unitary, UnitarityReport, UnitaryCheck};
