use thiserror::Error;

use crate::Address;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("qubit count {0} outside supported range 1..={max}", max = crate::MAX_QUBITS)]
    QubitCount(u32),

    #[error("address {address} out of range for dimension {dim}")]
    AddressOutOfRange { address: Address, dim: u64 },

    #[error("bit {bit} out of range for {num_qubits} qubits")]
    BitOutOfRange { bit: u32, num_qubits: u32 },

    #[error("target bit {0} is also listed as a control")]
    TargetIsControl(u32),

    #[error("control bit {0} listed more than once")]
    DuplicateControl(u32),

    #[error("swap needs two distinct bits, got {0} twice")]
    SwapSameBit(u32),

    #[error("controlled phase needs at least one control")]
    PhaseWithoutControls,

    #[error("phase angle must be finite, got {0}")]
    NonFiniteAngle(f64),

    #[error(
        "{num_qubits} qubits exceeds the explicit-matrix cap of {cap}; use lazy evaluation instead"
    )]
    TooLarge { num_qubits: u32, cap: u32 },

    #[error("range [{start}, {start}+{len}) exceeds dimension {dim}")]
    RangeOverflow { start: Address, len: u64, dim: u64 },

    #[error("chunk length must be at least 1")]
    EmptyChunk,

    #[error("input has {input} qubits but circuit has {circuit}")]
    QubitMismatch { input: u32, circuit: u32 },
}
