//! Dense brute-force reference.
//!
//! Ordering follows the product-state convention `q_M ⊗ … ⊗ q_1`: the
//! leftmost Kronecker factor is the most significant address bit, so bit 1
//! is the least significant. Getting this backwards silently transposes
//! qubits, so every builder here goes through [`kron_over_bits`].

use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex64;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gate::{Bit, GateStep};
use crate::sparse::SparseUnitary;
use crate::state::InputState;

/// Largest qubit count for dense matrices (2^20 entries).
pub const DENSE_MAX_QUBITS: u32 = 10;

/// Row-major-semantics complex matrix of dimension `2^m`, `m ≤ 10`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    inner: DMatrix<Complex64>,
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn check_cap(num_qubits: u32) -> Result<usize> {
    if num_qubits == 0 {
        return Err(Error::QubitCount(0));
    }
    if num_qubits > DENSE_MAX_QUBITS {
        return Err(Error::TooLarge {
            num_qubits,
            cap: DENSE_MAX_QUBITS,
        });
    }
    Ok(1 << num_qubits)
}

fn projector_one() -> Matrix2<Complex64> {
    Matrix2::new(zero(), zero(), zero(), one())
}

/// Elementary matrix `|row⟩⟨col|`.
fn unit(row: usize, col: usize) -> Matrix2<Complex64> {
    let mut m = Matrix2::zeros();
    m[(row, col)] = one();
    m
}

/// `F_M ⊗ … ⊗ F_1` where `factor(bit)` gives the 2×2 block for each bit.
fn kron_over_bits(
    num_qubits: u32,
    factor: impl Fn(Bit) -> Matrix2<Complex64>,
) -> DMatrix<Complex64> {
    let mut acc = DMatrix::from_element(1, 1, one());
    for b in (0..num_qubits).rev() {
        let f = factor(Bit(b));
        let f = DMatrix::from_iterator(2, 2, f.iter().copied());
        acc = acc.kronecker(&f);
    }
    acc
}

impl DenseMatrix {
    pub fn identity(num_qubits: u32) -> Result<Self> {
        let dim = check_cap(num_qubits)?;
        Ok(DenseMatrix {
            inner: DMatrix::identity(dim, dim),
        })
    }

    pub fn from_nalgebra(inner: DMatrix<Complex64>) -> Option<Self> {
        let dim = inner.nrows();
        let ok = inner.is_square()
            && dim >= 2
            && dim.is_power_of_two()
            && dim.trailing_zeros() <= DENSE_MAX_QUBITS;
        ok.then_some(DenseMatrix { inner })
    }

    /// Expands a sparse matrix into its dense form.
    pub fn from_sparse(u: &SparseUnitary) -> Result<Self> {
        let dim = check_cap(u.num_qubits())?;
        let mut inner = DMatrix::from_element(dim, dim, zero());
        for (row, (&col, &val)) in u.cols().iter().zip(u.vals()).enumerate() {
            inner[(row, col as usize)] = val;
        }
        Ok(DenseMatrix { inner })
    }

    /// Product of dense step matrices, `U_n ··· U_1`.
    pub fn from_circuit(circuit: &Circuit) -> Result<Self> {
        let mut acc = Self::identity(circuit.num_qubits())?;
        for step in circuit.steps() {
            acc = dense_step(step, circuit.num_qubits())?.mul(&acc);
        }
        Ok(acc)
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.inner[(row, col)]
    }

    pub fn as_nalgebra(&self) -> &DMatrix<Complex64> {
        &self.inner
    }

    pub fn mul(&self, rhs: &DenseMatrix) -> DenseMatrix {
        DenseMatrix {
            inner: &self.inner * &rhs.inner,
        }
    }

    pub fn transpose(&self) -> DenseMatrix {
        DenseMatrix {
            inner: self.inner.transpose(),
        }
    }

    pub fn apply(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        &self.inner * v
    }

    /// Largest entrywise `|a - b|`.
    pub fn max_abs_diff(&self, other: &DenseMatrix) -> f64 {
        assert_eq!(self.dim(), other.dim());
        self.inner
            .iter()
            .zip(other.inner.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest `|(U†U - I)_{jk}|`.
    pub fn unitarity_deviation(&self) -> f64 {
        let gram = self.inner.adjoint() * &self.inner;
        let dim = self.dim();
        gram.iter()
            .enumerate()
            .map(|(n, &v)| {
                // column-major storage: n = col * dim + row
                let expected = if n / dim == n % dim { one() } else { zero() };
                (v - expected).norm()
            })
            .fold(0.0, f64::max)
    }
}

/// Dense matrix of one step, assembled from 2×2 blocks.
///
/// * bit flip: `I + (⊗ P₁ on controls) ⊗ (X − I) on target`
/// * phase: `I + (e^{iθ} − 1) · (⊗ P₁ on controls)`
/// * swap: `Σ_{x,y} |x⟩⟨y|_a ⊗ |y⟩⟨x|_b`
pub fn dense_step(step: &GateStep, num_qubits: u32) -> Result<DenseMatrix> {
    let dim = check_cap(num_qubits)?;
    step.validate(num_qubits)?;
    let identity = DMatrix::<Complex64>::identity(dim, dim);
    let i2 = Matrix2::<Complex64>::identity();
    let inner = match step {
        GateStep::BitFlip { target, controls } => {
            let x_minus_i = Matrix2::new(-one(), one(), one(), -one());
            identity
                + kron_over_bits(num_qubits, |b| {
                    if b == *target {
                        x_minus_i
                    } else if controls.contains(&b) {
                        projector_one()
                    } else {
                        i2
                    }
                })
        }
        GateStep::Phase { theta, controls } => {
            let factor = Complex64::from_polar(1.0, *theta) - one();
            let projector = kron_over_bits(num_qubits, |b| {
                if controls.contains(&b) {
                    projector_one()
                } else {
                    i2
                }
            });
            identity + projector * factor
        }
        GateStep::Swap { a, b } => {
            let mut sum = DMatrix::from_element(dim, dim, zero());
            for x in 0..2 {
                for y in 0..2 {
                    sum += kron_over_bits(num_qubits, |bit| {
                        if bit == *a {
                            unit(x, y)
                        } else if bit == *b {
                            unit(y, x)
                        } else {
                            i2
                        }
                    });
                }
            }
            sum
        }
    };
    Ok(DenseMatrix { inner })
}

/// The input state as an explicit vector `q_M ⊗ … ⊗ q_1`.
pub fn dense_input(input: &InputState) -> Result<DVector<Complex64>> {
    check_cap(input.num_qubits())?;
    let mut acc = DMatrix::from_element(1, 1, one());
    for q in input.qubits().iter().rev() {
        let column = DMatrix::from_column_slice(2, 1, &[q.amp0, q.amp1]);
        acc = acc.kronecker(&column);
    }
    Ok(DVector::from_column_slice(acc.as_slice()))
}

/// Full output vector by applying each dense step matrix in turn.
pub fn dense_output(circuit: &Circuit, input: &InputState) -> Result<DVector<Complex64>> {
    let mut v = dense_input(input)?;
    for step in circuit.steps() {
        v = dense_step(step, circuit.num_qubits())?.apply(&v);
    }
    Ok(v)
}
