//! Exact linear assignment on dense square cost matrices, O(k^3)
//! shortest-augmenting-path formulation with dual potentials.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sym::check_finite;

/// An optimal row-to-column assignment: `perm[i]` is the column matched to
/// row i; `cost` is recomputed as `sum_i cost[i][perm[i]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment<F> {
    pub perm: Vec<usize>,
    pub cost: F,
}

/// Minimum-cost perfect matching of a k-by-k cost matrix.
pub fn hungarian<F: Scalar>(cost: &Array2<F>) -> Result<Assignment<F>> {
    let k = cost.nrows();
    if cost.ncols() != k {
        return Err(Error::NotSquare(cost.nrows(), cost.ncols()));
    }
    check_finite(cost)?;
    if k == 0 {
        return Ok(Assignment { perm: Vec::new(), cost: F::zero() });
    }

    let inf = F::infinity();
    // 1-based potentials; p[j] is the row matched to column j
    let mut u = vec![F::zero(); k + 1];
    let mut v = vec![F::zero(); k + 1];
    let mut p = vec![0usize; k + 1];
    let mut way = vec![0usize; k + 1];

    for i in 1..=k {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; k + 1];
        let mut used = vec![false; k + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=k {
                if used[j] {
                    continue;
                }
                let cur = cost[(i0 - 1, j - 1)] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=k {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut perm = vec![0usize; k];
    for j in 1..=k {
        perm[p[j] - 1] = j - 1;
    }
    let mut total = F::zero();
    for (i, &j) in perm.iter().enumerate() {
        total += cost[(i, j)];
    }
    Ok(Assignment { perm, cost: total })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn identity_favoring() {
        let cost = array![[1.0, 2.0], [2.0, 1.0]];
        let a = hungarian(&cost).unwrap();
        assert_eq!(a.perm, vec![0, 1]);
        assert_eq!(a.cost, 2.0);
    }

    #[test]
    fn crossing_pair() {
        let cost = array![[4.0, 1.0], [2.0, 3.0]];
        let a = hungarian(&cost).unwrap();
        assert_eq!(a.perm, vec![1, 0]);
        assert_eq!(a.cost, 3.0);
    }

    #[test]
    fn empty_and_singleton() {
        let a = hungarian(&Array2::<f64>::zeros((0, 0))).unwrap();
        assert!(a.perm.is_empty());
        let a = hungarian(&array![[5.0]]).unwrap();
        assert_eq!(a.perm, vec![0]);
        assert_eq!(a.cost, 5.0);
    }

    #[test]
    fn rejects_non_square_and_non_finite() {
        assert!(hungarian(&Array2::<f64>::zeros((2, 3))).is_err());
        assert!(hungarian(&array![[f64::NAN, 1.0], [1.0, 0.0]]).is_err());
    }

    #[test]
    fn perm_is_bijection() {
        let mut rng = crate::rng::RngStream::new(50, 0).rng();
        for _ in 0..50 {
            let k = 2 + (rng.next_u64() % 6) as usize;
            let cost = Array2::from_shape_fn((k, k), |_| rng.uniform());
            let a = hungarian(&cost).unwrap();
            let mut seen = vec![false; k];
            for &j in &a.perm {
                assert!(!seen[j]);
                seen[j] = true;
            }
        }
    }
}
