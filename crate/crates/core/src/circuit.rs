use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gate::{GateStep, Kernel};
use crate::{dimension, Address, MAX_QUBITS};

/// An ordered list of steps on `num_qubits` qubits. The first step is
/// applied first, so the circuit's matrix is `U_n ··· U_2 U_1`.
#[derive(Debug, Clone)]
pub struct Circuit {
    num_qubits: u32,
    steps: Vec<GateStep>,
    kernels: Vec<Kernel>,
}

impl PartialEq for Circuit {
    fn eq(&self, other: &Self) -> bool {
        self.num_qubits == other.num_qubits && self.steps == other.steps
    }
}

impl Circuit {
    pub fn new(num_qubits: u32, steps: Vec<GateStep>) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(Error::QubitCount(num_qubits));
        }
        for step in &steps {
            step.validate(num_qubits)?;
        }
        let kernels = steps.iter().map(GateStep::kernel).collect();
        Ok(Circuit {
            num_qubits,
            steps,
            kernels,
        })
    }

    pub fn empty(num_qubits: u32) -> Result<Self> {
        Self::new(num_qubits, Vec::new())
    }

    pub fn num_qubits(&self) -> u32 {
        self.num_qubits
    }

    pub fn dim(&self) -> u64 {
        dimension(self.num_qubits)
    }

    pub fn steps(&self) -> &[GateStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn has_phase_steps(&self) -> bool {
        self.steps.iter().any(|s| !s.is_involution())
    }

    /// The circuit run backwards, each step inverted.
    pub fn inverse(&self) -> Circuit {
        let steps = self.steps.iter().rev().map(GateStep::inverse).collect();
        Circuit::new(self.num_qubits, steps).expect("inverse of a valid circuit is valid")
    }

    /// Row `address` of the composed matrix, found by threading the address
    /// backward from the last step to the first. Returns the source address
    /// `j` and phase `φ` with `out[address] = φ · in[j]`.
    pub fn map_output_address(&self, address: Address) -> Result<(Address, Complex64)> {
        let dim = self.dim();
        if address >= dim {
            return Err(Error::AddressOutOfRange { address, dim });
        }
        Ok(self.trace_unchecked(address))
    }

    #[inline]
    pub(crate) fn trace_unchecked(&self, mut address: Address) -> (Address, Complex64) {
        let mut phase: Option<Complex64> = None;
        for kernel in self.kernels.iter().rev() {
            let (source, factor) = kernel.row_entry(address);
            if let Some(f) = factor {
                phase = Some(phase.map_or(f, |p| p * f));
            }
            address = source;
        }
        (address, phase.unwrap_or(Complex64::new(1.0, 0.0)))
    }
}

/// Free-function form of [`Circuit::map_output_address`].
pub fn map_output_address(circuit: &Circuit, address: Address) -> Result<(Address, Complex64)> {
    circuit.map_output_address(address)
}
