//! Matrix norms for dense real matrices.

use ndarray::ArrayView2;

use crate::eigen::sym_eigenvalues;
use crate::error::Result;
use crate::scalar::Scalar;
use crate::sym::SymmetricMatrix;

/// Square root of the entrywise sum of squares.
pub fn frobenius_norm<F: Scalar>(m: ArrayView2<F>) -> F {
    let mut ss = F::zero();
    for &v in m.iter() {
        ss += v * v;
    }
    ss.sqrt()
}

/// Maximum row Euclidean norm, equivalently `sup_{|v|=1} |Mv|_inf`.
pub fn two_to_infty_norm<F: Scalar>(m: ArrayView2<F>) -> F {
    let mut best = F::zero();
    for row in m.rows() {
        let mut ss = F::zero();
        for &v in row.iter() {
            ss += v * v;
        }
        best = best.max(ss);
    }
    best.sqrt()
}

/// Largest singular value, computed from the Gram matrix of the smaller side.
pub fn spectral_norm<F: Scalar>(m: ArrayView2<F>) -> Result<F> {
    let (r, c) = (m.nrows(), m.ncols());
    if r == 0 || c == 0 {
        return Ok(F::zero());
    }
    let gram = if c <= r { m.t().dot(&m) } else { m.dot(&m.t()) };
    let gram = SymmetricMatrix::symmetrized(gram)?;
    let vals = sym_eigenvalues(&gram)?;
    Ok(vals[0].max(F::zero()).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::{array, Array2};

    #[test]
    fn frobenius_examples() {
        let m = Array2::from_diag(&array![3.0, 4.0]);
        assert_abs_diff_eq!(frobenius_norm(m.view()), 5.0, epsilon = 1e-12);
        let z = Array2::<f64>::zeros((3, 4));
        assert_eq!(frobenius_norm(z.view()), 0.0);
    }

    #[test]
    fn frobenius_transpose_invariant() {
        let mut rng = crate::rng::RngStream::new(5, 0).rng();
        let m = Array2::from_shape_fn((4, 7), |_| rng.uniform() * 2.0 - 1.0);
        assert_abs_diff_eq!(
            frobenius_norm(m.view()),
            frobenius_norm(m.t()),
            epsilon = 1e-12
        );
    }

    #[test]
    fn two_inf_examples() {
        let m = array![[3.0, 4.0], [0.0, 1.0]];
        assert_abs_diff_eq!(two_to_infty_norm(m.view()), 5.0, epsilon = 1e-12);
        let id = Array2::<f64>::eye(6);
        assert_abs_diff_eq!(two_to_infty_norm(id.view()), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn spectral_examples() {
        let m = Array2::from_diag(&array![3.0, -7.0]);
        assert_abs_diff_eq!(spectral_norm(m.view()).unwrap(), 7.0, epsilon = 1e-8);

        // rank-1 u v^T with |u| = 2, |v| = 3
        let u = array![[2.0], [0.0], [0.0]];
        let v = array![[0.0, 3.0]];
        let m = u.dot(&v);
        assert_abs_diff_eq!(spectral_norm(m.view()).unwrap(), 6.0, epsilon = 1e-8);
    }

    #[test]
    fn norm_ordering_chain() {
        let mut rng = crate::rng::RngStream::new(6, 0).rng();
        for _ in 0..20 {
            let m = Array2::from_shape_fn((5, 4), |_| rng.uniform() * 2.0 - 1.0);
            let ti = two_to_infty_norm(m.view());
            let sp = spectral_norm(m.view()).unwrap();
            let fr = frobenius_norm(m.view());
            assert!(ti <= sp + 1e-10, "{ti} vs {sp}");
            assert!(sp <= fr + 1e-10, "{sp} vs {fr}");
        }
    }
}
