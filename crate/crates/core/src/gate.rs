//! Gate steps and their action on a single address.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::Address;

/// Zero-based bit position within an address. Text formats use one-based
/// positions; convert with [`Bit::from_one_based`] and [`Bit::one_based`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bit(pub u32);

impl Bit {
    /// `Bit::from_one_based(1)` is the least significant bit. Returns `None`
    /// for zero.
    pub fn from_one_based(position: u32) -> Option<Bit> {
        position.checked_sub(1).map(Bit)
    }

    pub fn one_based(self) -> u32 {
        self.0 + 1
    }

    #[inline]
    pub fn mask(self) -> u64 {
        1u64 << self.0
    }
}

impl fmt::Display for Bit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.one_based())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    BitFlip,
    Phase,
    Swap,
}

/// One column of a wiring diagram.
#[derive(Debug, Clone, PartialEq)]
pub enum GateStep {
    /// Toggle `target` when every control bit is 1. No controls is NOT, one
    /// is CNOT, more is a generalized Toffoli.
    BitFlip { target: Bit, controls: Vec<Bit> },
    /// Multiply by `e^{iθ}` when every control bit is 1.
    Phase { theta: f64, controls: Vec<Bit> },
    /// Exchange two address bits.
    Swap { a: Bit, b: Bit },
}

/// `e^{iθ}`, exact when θ is a multiple of π/2 so that π gives exactly -1.
pub fn phase_factor(theta: f64) -> Complex64 {
    let quarter_turns = theta / FRAC_PI_2;
    if quarter_turns.fract() == 0.0 && quarter_turns.abs() < 1e15 {
        return match (quarter_turns as i64).rem_euclid(4) {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    let (sin, cos) = theta.sin_cos();
    Complex64::new(cos, sin)
}

impl GateStep {
    pub fn not(target: Bit) -> Self {
        GateStep::BitFlip {
            target,
            controls: Vec::new(),
        }
    }

    pub fn cnot(control: Bit, target: Bit) -> Self {
        GateStep::BitFlip {
            target,
            controls: vec![control],
        }
    }

    pub fn toffoli(controls: impl Into<Vec<Bit>>, target: Bit) -> Self {
        GateStep::BitFlip {
            target,
            controls: controls.into(),
        }
    }

    pub fn phase(theta: f64, controls: impl Into<Vec<Bit>>) -> Self {
        GateStep::Phase {
            theta,
            controls: controls.into(),
        }
    }

    pub fn swap(a: Bit, b: Bit) -> Self {
        GateStep::Swap { a, b }
    }

    pub fn kind(&self) -> GateKind {
        match self {
            GateStep::BitFlip { .. } => GateKind::BitFlip,
            GateStep::Phase { .. } => GateKind::Phase,
            GateStep::Swap { .. } => GateKind::Swap,
        }
    }

    /// True for steps whose matrix is a real symmetric permutation.
    pub fn is_involution(&self) -> bool {
        !matches!(self, GateStep::Phase { .. })
    }

    /// Every bit the step touches.
    pub fn bits(&self) -> Vec<Bit> {
        match self {
            GateStep::BitFlip { target, controls } => {
                let mut bits = controls.clone();
                bits.push(*target);
                bits
            }
            GateStep::Phase { controls, .. } => controls.clone(),
            GateStep::Swap { a, b } => vec![*a, *b],
        }
    }

    pub fn validate(&self, num_qubits: u32) -> Result<()> {
        for bit in self.bits() {
            if bit.0 >= num_qubits {
                return Err(Error::BitOutOfRange {
                    bit: bit.one_based(),
                    num_qubits,
                });
            }
        }
        match self {
            GateStep::BitFlip { target, controls } => {
                if controls.contains(target) {
                    return Err(Error::TargetIsControl(target.one_based()));
                }
                check_distinct(controls)
            }
            GateStep::Phase { theta, controls } => {
                if !theta.is_finite() {
                    return Err(Error::NonFiniteAngle(*theta));
                }
                if controls.is_empty() {
                    return Err(Error::PhaseWithoutControls);
                }
                check_distinct(controls)
            }
            GateStep::Swap { a, b } => {
                if a == b {
                    return Err(Error::SwapSameBit(a.one_based()));
                }
                Ok(())
            }
        }
    }

    /// The step that undoes this one.
    pub fn inverse(&self) -> GateStep {
        match self {
            GateStep::Phase { theta, controls } => GateStep::Phase {
                theta: -theta,
                controls: controls.clone(),
            },
            other => other.clone(),
        }
    }

    pub(crate) fn kernel(&self) -> Kernel {
        match self {
            GateStep::BitFlip { target, controls } => Kernel::Flip {
                controls: mask_of(controls),
                target: target.mask(),
            },
            GateStep::Phase { theta, controls } => Kernel::Phase {
                controls: mask_of(controls),
                factor: phase_factor(*theta),
            },
            GateStep::Swap { a, b } => Kernel::Swap { a: a.0, b: b.0 },
        }
    }

    /// Where basis state `address` goes under this step, and the phase it
    /// picks up.
    pub fn apply(&self, address: Address) -> (Address, Complex64) {
        self.kernel().apply(address)
    }

    /// Row `address` of the step matrix: the source column and the value of
    /// its single nonzero, so that `out[address] = value * in[source]`.
    pub fn row_entry(&self, address: Address) -> (Address, Complex64) {
        let (source, phase) = self.kernel().row_entry(address);
        (source, phase.unwrap_or(Complex64::new(1.0, 0.0)))
    }
}

/// Forward action of `step` on `address`; see [`GateStep::apply`].
pub fn apply_step_to_address(step: &GateStep, address: Address) -> (Address, Complex64) {
    step.apply(address)
}

fn mask_of(bits: &[Bit]) -> u64 {
    bits.iter().fold(0, |m, b| m | b.mask())
}

fn check_distinct(bits: &[Bit]) -> Result<()> {
    for (k, bit) in bits.iter().enumerate() {
        if bits[..k].contains(bit) {
            return Err(Error::DuplicateControl(bit.one_based()));
        }
    }
    Ok(())
}

/// Mask form of a step, used on the hot path.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Kernel {
    Flip { controls: u64, target: u64 },
    Phase { controls: u64, factor: Complex64 },
    Swap { a: u32, b: u32 },
}

impl Kernel {
    #[inline]
    fn apply(&self, address: Address) -> (Address, Complex64) {
        match *self {
            Kernel::Phase { .. } => {
                let (_, phase) = self.row_entry(address);
                (address, phase.unwrap_or(Complex64::new(1.0, 0.0)))
            }
            // Bit flips and swaps are involutions: the forward map equals
            // the row map.
            _ => (self.row_entry(address).0, Complex64::new(1.0, 0.0)),
        }
    }

    /// `None` stands for a phase of exactly 1.
    #[inline]
    pub(crate) fn row_entry(&self, address: Address) -> (Address, Option<Complex64>) {
        match *self {
            Kernel::Flip { controls, target } => {
                if address & controls == controls {
                    (address ^ target, None)
                } else {
                    (address, None)
                }
            }
            Kernel::Phase { controls, factor } => {
                if address & controls == controls {
                    (address, Some(factor))
                } else {
                    (address, None)
                }
            }
            Kernel::Swap { a, b } => {
                let differ = ((address >> a) ^ (address >> b)) & 1;
                (address ^ ((differ << a) | (differ << b)), None)
            }
        }
    }
}
