//! Lazy state-vector simulation for circuits whose gates are phased
//! permutations: every step matrix has exactly one unit-modulus nonzero per
//! row, so any output amplitude can be traced back to a single input
//! amplitude and a phase.
//!
//! The input state is never stored. It is kept as one amplitude pair per
//! qubit and expanded on demand (`InputState::amplitude`), so a contiguous
//! slice of the output vector costs memory proportional to the slice only.
//!
//! Bit positions are zero-based in the API ([`Bit`]) and one-based in every
//! text format, where bit 1 is the least significant address bit.

pub mod analysis;
pub mod bench;
pub mod chunk;
pub mod circuit;
pub mod error;
pub mod executor;
pub mod format;
pub mod gate;
pub mod sparse;
pub mod state;

pub use chunk::{evaluate_chunk, StateChunk};
pub use circuit::Circuit;
pub use error::{Error, Result};
pub use gate::{Bit, GateStep};
pub use sparse::{build_step_matrix, compose_explicit, compose_explicit_with_cap, SparseUnitary};
pub use state::{InputState, QubitPair};

pub use num_complex::Complex64;

/// Index into a state vector. Bit `j` (zero-based) is address bit `a(j+1)`.
pub type Address = u64;

/// Largest supported qubit count; keeps `2^M` well inside a `u64`.
pub const MAX_QUBITS: u32 = 62;

/// Default cap on the qubit count for explicit (materialized) matrices.
pub const DEFAULT_EXPLICIT_CAP: u32 = 26;

/// Tolerance for checks that are exact in principle.
pub const EXACT_TOL: f64 = 1e-12;

/// Tolerance for checks that accumulate rounding.
pub const ACCUMULATED_TOL: f64 = 1e-10;

/// Number of basis states for `num_qubits` qubits.
#[inline]
pub fn dimension(num_qubits: u32) -> u64 {
    1u64 << num_qubits
}
