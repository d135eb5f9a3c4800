//! Product-state inputs and on-the-fly amplitude generation.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::{dimension, Address, EXACT_TOL, MAX_QUBITS};

/// Amplitudes of `|0⟩` and `|1⟩` for one qubit. Not required to be normalized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitPair {
    pub amp0: Complex64,
    pub amp1: Complex64,
}

impl QubitPair {
    pub const ZERO: QubitPair = QubitPair::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    pub const ONE: QubitPair = QubitPair::new(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));

    pub const fn new(amp0: Complex64, amp1: Complex64) -> Self {
        QubitPair { amp0, amp1 }
    }

    pub fn real(amp0: f64, amp1: f64) -> Self {
        QubitPair::new(Complex64::new(amp0, 0.0), Complex64::new(amp1, 0.0))
    }

    #[inline]
    pub fn get(&self, bit: bool) -> Complex64 {
        if bit {
            self.amp1
        } else {
            self.amp0
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp0.norm_sqr() + self.amp1.norm_sqr()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= EXACT_TOL
    }
}

impl Default for QubitPair {
    fn default() -> Self {
        QubitPair::ZERO
    }
}

/// An `M`-qubit product state `q_M ⊗ … ⊗ q_1`.
///
/// `qubits()[0]` is `q_1` and owns the least significant address bit.
#[derive(Debug, Clone, PartialEq)]
pub struct InputState {
    qubits: Vec<QubitPair>,
}

impl InputState {
    pub fn new(qubits: Vec<QubitPair>) -> Result<Self> {
        let m = u32::try_from(qubits.len()).unwrap_or(u32::MAX);
        if m == 0 || m > MAX_QUBITS {
            return Err(Error::QubitCount(m));
        }
        Ok(InputState { qubits })
    }

    /// All qubits in `|0⟩`.
    pub fn zeros(num_qubits: u32) -> Result<Self> {
        Self::uniform(num_qubits, QubitPair::ZERO)
    }

    pub fn uniform(num_qubits: u32, pair: QubitPair) -> Result<Self> {
        Self::new(vec![pair; num_qubits as usize])
    }

    /// The computational basis state `|address⟩`.
    pub fn basis(num_qubits: u32, address: Address) -> Result<Self> {
        let mut state = Self::zeros(num_qubits)?;
        let dim = dimension(num_qubits);
        if address >= dim {
            return Err(Error::AddressOutOfRange { address, dim });
        }
        for (j, q) in state.qubits.iter_mut().enumerate() {
            if (address >> j) & 1 == 1 {
                *q = QubitPair::ONE;
            }
        }
        Ok(state)
    }

    pub fn num_qubits(&self) -> u32 {
        self.qubits.len() as u32
    }

    pub fn dim(&self) -> u64 {
        dimension(self.num_qubits())
    }

    pub fn qubits(&self) -> &[QubitPair] {
        &self.qubits
    }

    pub fn set(&mut self, bit: usize, pair: QubitPair) {
        self.qubits[bit] = pair;
    }

    pub fn is_normalized(&self) -> bool {
        self.qubits.iter().all(QubitPair::is_normalized)
    }

    /// Squared 2-norm of the full expanded vector, `∏ ‖q_j‖²`.
    pub fn norm_sqr(&self) -> f64 {
        self.qubits.iter().map(QubitPair::norm_sqr).product()
    }

    /// Amplitude at `address` without range checking. Callers guarantee
    /// `address < self.dim()`.
    #[inline]
    pub(crate) fn amplitude_unchecked(&self, address: Address) -> Complex64 {
        let mut acc = Complex64::new(1.0, 0.0);
        let mut bits = address;
        for q in &self.qubits {
            acc *= q.get(bits & 1 == 1);
            bits >>= 1;
        }
        acc
    }

    /// Element `address` of the Kronecker product: the product over qubits of
    /// the component selected by the corresponding address bit.
    pub fn amplitude(&self, address: Address) -> Result<Complex64> {
        let dim = self.dim();
        if address >= dim {
            return Err(Error::AddressOutOfRange { address, dim });
        }
        Ok(self.amplitude_unchecked(address))
    }
}

/// Free-function form of [`InputState::amplitude`].
pub fn kron_element(input: &InputState, address: Address) -> Result<Complex64> {
    input.amplitude(address)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn all_ones_selects_top_index() {
        let input = InputState::uniform(3, QubitPair::ONE).unwrap();
        assert_eq!(kron_element(&input, 0b111).unwrap(), c(1.0, 0.0));
        assert_eq!(kron_element(&input, 0b101).unwrap(), c(0.0, 0.0));
        for i in 0..7 {
            assert_eq!(input.amplitude(i).unwrap(), c(0.0, 0.0));
        }
    }

    #[test]
    fn single_qubit_base_case() {
        let a = c(0.3, -0.2);
        let b = c(-1.5, 0.25);
        let input = InputState::new(vec![QubitPair::new(a, b)]).unwrap();
        assert_eq!(input.amplitude(0).unwrap(), a);
        assert_eq!(input.amplitude(1).unwrap(), b);
    }

    #[test]
    fn out_of_range_address() {
        let input = InputState::zeros(2).unwrap();
        assert_eq!(
            input.amplitude(4),
            Err(Error::AddressOutOfRange { address: 4, dim: 4 })
        );
    }

    #[test]
    fn qubit_count_limits() {
        assert_eq!(InputState::zeros(0), Err(Error::QubitCount(0)));
        assert_eq!(InputState::zeros(63), Err(Error::QubitCount(63)));
        assert!(InputState::zeros(62).is_ok());
    }

    #[test]
    fn basis_state() {
        let input = InputState::basis(3, 0b011).unwrap();
        for i in 0..8 {
            let expected = if i == 0b011 { 1.0 } else { 0.0 };
            assert_eq!(input.amplitude(i).unwrap(), c(expected, 0.0));
        }
    }

    #[test]
    fn normalization_predicate() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(QubitPair::real(h, h).is_normalized());
        assert!(!QubitPair::real(1.0, 1.0).is_normalized());
        let input = InputState::uniform(4, QubitPair::real(1.0, 1.0)).unwrap();
        assert_eq!(input.norm_sqr(), 16.0);
    }
}
