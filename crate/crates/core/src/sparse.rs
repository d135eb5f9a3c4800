//! Explicit phased-permutation matrices.

use num_complex::Complex64;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gate::GateStep;
use crate::{Address, DEFAULT_EXPLICIT_CAP, EXACT_TOL, MAX_QUBITS};

/// A matrix with exactly one nonzero per row. Row `i` has value `vals[i]` in
/// column `cols[i]`, i.e. `out[i] = vals[i] * in[cols[i]]`.
///
/// Construction only checks shape and column range; bijectivity and unit
/// values are properties checked by [`SparseUnitary::is_permutation`] and
/// [`crate::analysis::verify_sparse`], so corrupt matrices can still be
/// loaded and diagnosed.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseUnitary {
    cols: Vec<Address>,
    vals: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ShapeError {
    #[error("dimension {0} is not a power of two in 2..=2^62")]
    Dimension(u64),
    #[error("{cols} columns but {vals} values")]
    Length { cols: usize, vals: usize },
    #[error("row {row} points at column {col}, outside dimension {dim}")]
    Column { row: u64, col: u64, dim: u64 },
}

impl SparseUnitary {
    pub fn new(cols: Vec<Address>, vals: Vec<Complex64>) -> std::result::Result<Self, ShapeError> {
        if cols.len() != vals.len() {
            return Err(ShapeError::Length {
                cols: cols.len(),
                vals: vals.len(),
            });
        }
        let dim = cols.len() as u64;
        if dim < 2 || !dim.is_power_of_two() || dim.trailing_zeros() > MAX_QUBITS {
            return Err(ShapeError::Dimension(dim));
        }
        if let Some((row, &col)) = cols.iter().enumerate().find(|(_, &c)| c >= dim) {
            return Err(ShapeError::Column {
                row: row as u64,
                col,
                dim,
            });
        }
        Ok(SparseUnitary { cols, vals })
    }

    pub fn identity(num_qubits: u32) -> Result<Self> {
        let dim = checked_dim(num_qubits, DEFAULT_EXPLICIT_CAP)?;
        Ok(SparseUnitary {
            cols: (0..dim).collect(),
            vals: vec![Complex64::new(1.0, 0.0); dim as usize],
        })
    }

    pub fn dim(&self) -> u64 {
        self.cols.len() as u64
    }

    pub fn num_qubits(&self) -> u32 {
        self.dim().trailing_zeros()
    }

    pub fn cols(&self) -> &[Address] {
        &self.cols
    }

    pub fn vals(&self) -> &[Complex64] {
        &self.vals
    }

    pub fn row(&self, row: Address) -> (Address, Complex64) {
        (self.cols[row as usize], self.vals[row as usize])
    }

    /// Single pass with a seen-bitmap. Returns the first column hit twice.
    pub fn find_repeated_column(&self) -> Option<Address> {
        let mut seen = vec![false; self.cols.len()];
        self.cols
            .iter()
            .copied()
            .find(|&c| std::mem::replace(&mut seen[c as usize], true))
    }

    pub fn is_permutation(&self) -> bool {
        self.find_repeated_column().is_none()
    }

    /// Largest `||v| - 1|` over all rows.
    pub fn max_modulus_deviation(&self) -> f64 {
        self.vals
            .iter()
            .map(|v| (v.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn has_unit_values(&self) -> bool {
        self.max_modulus_deviation() <= EXACT_TOL
    }

    /// Transpose (not conjugate). Requires a permutation.
    pub fn transpose(&self) -> Option<SparseUnitary> {
        if !self.is_permutation() {
            return None;
        }
        let mut cols = vec![0; self.cols.len()];
        let mut vals = vec![Complex64::new(0.0, 0.0); self.vals.len()];
        for (row, (&c, &v)) in self.cols.iter().zip(&self.vals).enumerate() {
            cols[c as usize] = row as Address;
            vals[c as usize] = v;
        }
        Some(SparseUnitary { cols, vals })
    }

    /// Exact equality with the transpose.
    pub fn is_symmetric(&self) -> bool {
        self.cols
            .iter()
            .zip(&self.vals)
            .enumerate()
            .all(|(row, (&c, &v))| {
                self.cols[c as usize] == row as Address && self.vals[c as usize] == v
            })
    }

    /// `self · other`, i.e. apply `other` first.
    pub fn compose(&self, other: &SparseUnitary) -> Option<SparseUnitary> {
        if self.dim() != other.dim() {
            return None;
        }
        let (cols, vals) = self
            .cols
            .iter()
            .zip(&self.vals)
            .map(|(&c, &v)| {
                let (c2, v2) = other.row(c);
                (c2, v * v2)
            })
            .unzip();
        Some(SparseUnitary { cols, vals })
    }

    /// `out = U · input` for a dense input vector.
    pub fn apply(&self, input: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(
            input.len() as u64,
            self.dim(),
            "vector length must match dimension"
        );
        self.cols
            .iter()
            .zip(&self.vals)
            .map(|(&c, &v)| v * input[c as usize])
            .collect()
    }
}

fn checked_dim(num_qubits: u32, cap: u32) -> Result<u64> {
    if num_qubits == 0 || num_qubits > MAX_QUBITS {
        return Err(Error::QubitCount(num_qubits));
    }
    if num_qubits > cap {
        return Err(Error::TooLarge { num_qubits, cap });
    }
    Ok(1u64 << num_qubits)
}

/// Explicit matrix of a single step on `num_qubits` qubits, subject to the
/// default explicit-matrix cap.
pub fn build_step_matrix(step: &GateStep, num_qubits: u32) -> Result<SparseUnitary> {
    let dim = checked_dim(num_qubits, DEFAULT_EXPLICIT_CAP)?;
    step.validate(num_qubits)?;
    let (cols, vals) = (0..dim).map(|i| step.row_entry(i)).unzip();
    Ok(SparseUnitary { cols, vals })
}

/// Explicit matrix of the whole circuit under the default cap.
pub fn compose_explicit(circuit: &Circuit) -> Result<SparseUnitary> {
    compose_explicit_with_cap(circuit, DEFAULT_EXPLICIT_CAP)
}

/// Explicit matrix of the whole circuit; each row comes from
/// [`Circuit::map_output_address`].
pub fn compose_explicit_with_cap(circuit: &Circuit, cap: u32) -> Result<SparseUnitary> {
    let dim = checked_dim(circuit.num_qubits(), cap)?;
    let (cols, vals) = (0..dim).map(|i| circuit.trace_unchecked(i)).unzip();
    Ok(SparseUnitary { cols, vals })
}
