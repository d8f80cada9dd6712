//! Dense real symmetric matrices.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Symmetry tolerance used when validating externally supplied matrices.
pub const SYMMETRY_TOL: f64 = 1e-9;

/// Dense real symmetric n-by-n matrix. Construction either rejects
/// asymmetric input or symmetrizes it; afterwards `a[(i,j)] == a[(j,i)]`
/// holds exactly and all entries are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix<F> {
    data: Array2<F>,
}

impl<F: Scalar> SymmetricMatrix<F> {
    /// Validate a square matrix: finite entries, `|a_ij - a_ji| <= tol`.
    /// The upper triangle is mirrored so symmetry holds exactly.
    pub fn new_with_tol(data: Array2<F>, tol: f64) -> Result<Self> {
        let n = check_square(&data)?;
        check_finite(&data)?;
        let mut data = data;
        for i in 0..n {
            for j in (i + 1)..n {
                let delta = (data[(i, j)] - data[(j, i)]).abs();
                if delta.to_f64().unwrap() > tol {
                    return Err(Error::Asymmetric { i, j, delta: delta.to_f64().unwrap() });
                }
                data[(j, i)] = data[(i, j)];
            }
        }
        Ok(Self { data })
    }

    /// Validate with the default tolerance [`SYMMETRY_TOL`].
    pub fn new(data: Array2<F>) -> Result<Self> {
        Self::new_with_tol(data, SYMMETRY_TOL)
    }

    /// Symmetrize a square matrix as `(A + A^T) / 2`.
    pub fn symmetrized(data: Array2<F>) -> Result<Self> {
        let n = check_square(&data)?;
        check_finite(&data)?;
        let mut data = data;
        let half = crate::scalar::cast::<F>(0.5);
        for i in 0..n {
            for j in (i + 1)..n {
                let v = (data[(i, j)] + data[(j, i)]) * half;
                data[(i, j)] = v;
                data[(j, i)] = v;
            }
        }
        Ok(Self { data })
    }

    /// Build from a generator over the upper triangle (`i <= j`), mirroring
    /// the result. Infallible symmetry by construction.
    pub fn from_upper<G: FnMut(usize, usize) -> F>(n: usize, mut g: G) -> Self {
        let mut data = Array2::zeros((n, n));
        for i in 0..n {
            for j in i..n {
                let v = g(i, j);
                data[(i, j)] = v;
                data[(j, i)] = v;
            }
        }
        Self { data }
    }

    pub fn zeros(n: usize) -> Self {
        Self { data: Array2::zeros((n, n)) }
    }

    pub fn n(&self) -> usize {
        self.data.nrows()
    }

    pub fn as_array(&self) -> &Array2<F> {
        &self.data
    }

    pub fn into_array(self) -> Array2<F> {
        self.data
    }

    /// Entrywise difference as a plain array.
    pub fn minus(&self, other: &Self) -> Result<Array2<F>> {
        if self.n() != other.n() {
            return Err(Error::ShapeMismatch(format!(
                "symmetric matrices of orders {} and {}",
                self.n(),
                other.n()
            )));
        }
        Ok(&self.data - &other.data)
    }
}

impl<F: Scalar> std::ops::Index<(usize, usize)> for SymmetricMatrix<F> {
    type Output = F;

    fn index(&self, idx: (usize, usize)) -> &F {
        &self.data[idx]
    }
}

pub(crate) fn check_square<F>(data: &Array2<F>) -> Result<usize> {
    if data.nrows() != data.ncols() {
        return Err(Error::NotSquare(data.nrows(), data.ncols()));
    }
    Ok(data.nrows())
}

pub(crate) fn check_finite<F: Scalar>(data: &Array2<F>) -> Result<()> {
    for ((i, j), v) in data.indexed_iter() {
        if !v.is_finite() {
            return Err(Error::NonFinite(i, j));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn rejects_asymmetry_beyond_tol() {
        let a = array![[1.0, 2.0], [2.0 + 1e-6, 1.0]];
        match SymmetricMatrix::new(a) {
            Err(Error::Asymmetric { i: 0, j: 1, .. }) => {}
            other => panic!("expected Asymmetric, got {other:?}"),
        }
    }

    #[test]
    fn mirrors_within_tol() {
        let a = array![[1.0, 2.0], [2.0 + 1e-12, 1.0]];
        let m = SymmetricMatrix::new(a).unwrap();
        assert_eq!(m[(0, 1)], m[(1, 0)]);
    }

    #[test]
    fn rejects_non_finite() {
        let a = array![[1.0, f64::NAN], [f64::NAN, 1.0]];
        assert!(matches!(SymmetricMatrix::new(a), Err(Error::NonFinite(0, 1))));
    }

    #[test]
    fn rejects_non_square() {
        let a = Array2::<f64>::zeros((2, 3));
        assert!(matches!(SymmetricMatrix::new(a), Err(Error::NotSquare(2, 3))));
    }

    #[test]
    fn symmetrized_averages() {
        let a = array![[0.0, 1.0], [3.0, 0.0]];
        let m = SymmetricMatrix::symmetrized(a).unwrap();
        assert_eq!(m[(0, 1)], 2.0);
        assert_eq!(m[(1, 0)], 2.0);
    }

    #[test]
    fn from_upper_is_exactly_symmetric() {
        let m = SymmetricMatrix::<f64>::from_upper(4, |i, j| (i * 7 + j) as f64 * 0.1);
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(m[(i, j)], m[(j, i)]);
            }
        }
    }
}
