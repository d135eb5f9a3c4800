use num_complex::Complex64;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::state::InputState;
use crate::Address;

/// Output amplitudes for indices `[start, start + amps.len())`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateChunk {
    pub start: Address,
    pub amps: Vec<Complex64>,
}

impl StateChunk {
    pub fn new(start: Address, amps: Vec<Complex64>) -> Self {
        StateChunk { start, amps }
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    /// One past the last index covered.
    pub fn end(&self) -> Address {
        self.start + self.amps.len() as Address
    }

    pub fn indexed(&self) -> impl Iterator<Item = (Address, Complex64)> + '_ {
        (self.start..).zip(self.amps.iter().copied())
    }
}

fn check_range(circuit: &Circuit, input: &InputState, start: Address, len: u64) -> Result<()> {
    if input.num_qubits() != circuit.num_qubits() {
        return Err(Error::QubitMismatch {
            input: input.num_qubits(),
            circuit: circuit.num_qubits(),
        });
    }
    if len == 0 {
        return Err(Error::EmptyChunk);
    }
    let dim = circuit.dim();
    match start.checked_add(len) {
        Some(end) if end <= dim => Ok(()),
        _ => Err(Error::RangeOverflow { start, len, dim }),
    }
}

/// Computes output amplitudes `[start, start + len)` of `circuit` applied to
/// `input`, in index order. Only the returned buffer is allocated.
pub fn evaluate_chunk(
    circuit: &Circuit,
    input: &InputState,
    start: Address,
    len: u64,
) -> Result<StateChunk> {
    check_range(circuit, input, start, len)?;
    let mut amps = vec![Complex64::new(0.0, 0.0); len as usize];
    fill(circuit, input, start, &mut amps);
    Ok(StateChunk { start, amps })
}

/// Like [`evaluate_chunk`] but writes into a caller-owned buffer; the
/// buffer length is the chunk length.
pub fn evaluate_into(
    circuit: &Circuit,
    input: &InputState,
    start: Address,
    out: &mut [Complex64],
) -> Result<()> {
    check_range(circuit, input, start, out.len() as u64)?;
    fill(circuit, input, start, out);
    Ok(())
}

fn fill(circuit: &Circuit, input: &InputState, start: Address, out: &mut [Complex64]) {
    for (index, slot) in (start..).zip(out.iter_mut()) {
        let (source, phase) = circuit.trace_unchecked(index);
        *slot = phase * input.amplitude_unchecked(source);
    }
}
