use std::fmt;

use crate::sparse::SparseUnitary;
use crate::{Address, EXACT_TOL};

use super::dense::DenseMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct UnitarityReport {
    pub is_unitary: bool,
    /// Largest `|(U†U − I)_{jk}|`.
    pub max_deviation: f64,
    /// Sparse inputs only: whether the column map is a bijection.
    pub bijective: Option<bool>,
    /// Sparse inputs only: first column that appears in two rows.
    pub repeated_column: Option<Address>,
    /// Sparse inputs only: largest `||v| − 1|`.
    pub max_modulus_deviation: Option<f64>,
}

impl fmt::Display for UnitarityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "unitary: {}", if self.is_unitary { "yes" } else { "no" })?;
        writeln!(f, "max |U†U - I|: {:e}", self.max_deviation)?;
        if let Some(bijective) = self.bijective {
            match self.repeated_column {
                Some(col) if !bijective => writeln!(f, "bijective: no (column {col} repeated)")?,
                _ => writeln!(f, "bijective: {}", if bijective { "yes" } else { "no" })?,
            }
        }
        if let Some(dev) = self.max_modulus_deviation {
            writeln!(f, "max ||v| - 1|: {dev:e}")?;
        }
        Ok(())
    }
}

/// Anything [`verify_unitary`] can check.
pub trait UnitaryCheck {
    fn unitarity(&self) -> UnitarityReport;
}

impl UnitaryCheck for SparseUnitary {
    fn unitarity(&self) -> UnitarityReport {
        verify_sparse(self)
    }
}

impl UnitaryCheck for DenseMatrix {
    fn unitarity(&self) -> UnitarityReport {
        verify_dense(self)
    }
}

pub fn verify_unitary<M: UnitaryCheck + ?Sized>(m: &M) -> UnitarityReport {
    m.unitarity()
}

/// With one nonzero per row, `U†U` is diagonal with entry `j` equal to the
/// sum of `|v_i|²` over rows `i` pointing at column `j`; that is computed
/// exactly here in one pass, alongside a bijectivity check.
pub fn verify_sparse(u: &SparseUnitary) -> UnitarityReport {
    let mut column_weight = vec![0.0f64; u.dim() as usize];
    let mut repeated_column = None;
    let mut seen = vec![false; u.dim() as usize];
    for (&c, v) in u.cols().iter().zip(u.vals()) {
        if std::mem::replace(&mut seen[c as usize], true) && repeated_column.is_none() {
            repeated_column = Some(c);
        }
        column_weight[c as usize] += v.norm_sqr();
    }
    let max_deviation = column_weight
        .iter()
        .map(|w| (w - 1.0).abs())
        .fold(0.0, f64::max);
    let modulus = u.max_modulus_deviation();
    let bijective = repeated_column.is_none();
    UnitarityReport {
        is_unitary: bijective && modulus <= EXACT_TOL && max_deviation <= EXACT_TOL,
        max_deviation,
        bijective: Some(bijective),
        repeated_column,
        max_modulus_deviation: Some(modulus),
    }
}

pub fn verify_dense(m: &DenseMatrix) -> UnitarityReport {
    let max_deviation = m.unitarity_deviation();
    UnitarityReport {
        is_unitary: max_deviation <= EXACT_TOL,
        max_deviation,
        bijective: None,
        repeated_column: None,
        max_modulus_deviation: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn example() -> SparseUnitary {
        SparseUnitary::new(vec![3, 0, 2, 1], vec![c(1.0), c(1.0), c(1.0), c(-1.0)]).unwrap()
    }

    #[test]
    fn example_matrix_is_unitary() {
        let report = verify_unitary(&example());
        assert!(report.is_unitary);
        assert_eq!(report.max_deviation, 0.0);
        let dense = DenseMatrix::from_sparse(&example()).unwrap();
        let report = verify_unitary(&dense);
        assert!(report.is_unitary);
        assert!(report.max_deviation <= 1e-12);
    }

    #[test]
    fn identity_has_zero_deviation() {
        let id = SparseUnitary::identity(3).unwrap();
        let report = verify_sparse(&id);
        assert!(report.is_unitary);
        assert_eq!(report.max_deviation, 0.0);
        let dense = verify_dense(&DenseMatrix::identity(3).unwrap());
        assert!(dense.is_unitary);
        assert_eq!(dense.max_deviation, 0.0);
    }

    #[test]
    fn duplicated_column_fails() {
        let u = SparseUnitary::new(vec![3, 0, 3, 1], vec![c(1.0); 4]).unwrap();
        let report = verify_sparse(&u);
        assert!(!report.is_unitary);
        assert_eq!(report.bijective, Some(false));
        assert_eq!(report.repeated_column, Some(3));
        assert_eq!(report.max_deviation, 1.0);
        assert!(!verify_dense(&DenseMatrix::from_sparse(&u).unwrap()).is_unitary);
        assert!(report.to_string().contains("column 3 repeated"));
    }

    #[test]
    fn non_unit_value_fails() {
        let u = SparseUnitary::new(vec![1, 0], vec![c(1.0), c(0.5)]).unwrap();
        let report = verify_sparse(&u);
        assert!(!report.is_unitary);
        assert_eq!(report.bijective, Some(true));
        assert_eq!(report.max_modulus_deviation, Some(0.5));
    }
}
