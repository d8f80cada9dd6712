//! K-means with restarts, the label-discrepancy metric, and the
//! community-recovery pipeline.

use ndarray::{Array2, ArrayView2};

use crate::embed::Embedding;
use crate::error::{Error, Result};
use crate::estimate::{plugin_embedding, RhoVariant, WeightVector};
use crate::hungarian::hungarian;
use crate::model::NetworkCollection;
use crate::rng::{CounterRng, RngStream};
use crate::scalar::{cast, Scalar};

/// A K-means solution: cluster labels in `0..k`, the k-by-d center matrix,
/// and the sum of squared distances to assigned centers.
#[derive(Debug, Clone)]
pub struct Clustering<F> {
    pub labels: Vec<usize>,
    pub centers: Array2<F>,
    pub objective: F,
}

#[derive(Debug, Clone, Copy)]
pub struct KmeansOptions {
    pub restarts: usize,
    pub max_iter: usize,
}

impl Default for KmeansOptions {
    fn default() -> Self {
        Self { restarts: 20, max_iter: 100 }
    }
}

/// Best-of-restarts Lloyd iteration with distance-weighted (k-means++)
/// seeding. Ties in the assignment step go to the lowest center index;
/// empty clusters are re-seeded from the point farthest from its assigned
/// center. Restart r draws from child stream r, and the lowest objective
/// wins with ties broken by restart index.
pub fn kmeans<F: Scalar>(
    points: ArrayView2<F>,
    k: usize,
    restarts: usize,
    max_iter: usize,
    stream: RngStream,
) -> Result<Clustering<F>> {
    let n = points.nrows();
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!("K={k} out of range for n={n} points")));
    }
    if restarts == 0 {
        return Err(Error::InvalidParameter("need at least one restart".into()));
    }
    let mut best: Option<Clustering<F>> = None;
    for r in 0..restarts {
        let mut rng = stream.child(r as u64).rng();
        let run = lloyd_once(points, k, max_iter, &mut rng);
        let replace = match &best {
            None => true,
            Some(b) => run.objective < b.objective,
        };
        if replace {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}

fn sq_dist<F: Scalar>(points: ArrayView2<F>, i: usize, center: &[F]) -> F {
    let mut s = F::zero();
    for (&c, &p) in center.iter().zip(points.row(i).iter()) {
        let d = p - c;
        s += d * d;
    }
    s
}

fn lloyd_once<F: Scalar>(
    points: ArrayView2<F>,
    k: usize,
    max_iter: usize,
    rng: &mut CounterRng,
) -> Clustering<F> {
    let n = points.nrows();
    let d = points.ncols();

    // distance-weighted seeding
    let mut centers: Vec<Vec<F>> = Vec::with_capacity(k);
    centers.push(points.row(rng.index(n)).to_vec());
    let mut d2: Vec<F> = (0..n).map(|i| sq_dist(points, i, &centers[0])).collect();
    while centers.len() < k {
        let total: F = d2.iter().cloned().sum();
        let next = if total > F::zero() {
            let mut target = cast::<F>(rng.uniform()) * total;
            let mut chosen = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                if target < w {
                    chosen = i;
                    break;
                }
                target -= w;
            }
            chosen
        } else {
            rng.index(n)
        };
        centers.push(points.row(next).to_vec());
        for i in 0..n {
            let nd = sq_dist(points, i, centers.last().unwrap());
            if nd < d2[i] {
                d2[i] = nd;
            }
        }
    }

    let mut labels = vec![0usize; n];
    let mut prev_objective = F::infinity();
    let mut objective = F::infinity();
    for _iter in 0..max_iter {
        // assignment; ties go to the lowest center index
        let mut changed = false;
        for i in 0..n {
            let mut best_c = 0usize;
            let mut best_d = sq_dist(points, i, &centers[0]);
            for (c, center) in centers.iter().enumerate().skip(1) {
                let dist = sq_dist(points, i, center);
                if dist < best_d {
                    best_d = dist;
                    best_c = c;
                }
            }
            if labels[i] != best_c {
                labels[i] = best_c;
                changed = true;
            }
        }

        // empty-cluster repair: promote the farthest point
        let mut sizes = vec![0usize; k];
        for &l in &labels {
            sizes[l] += 1;
        }
        let mut promoted = vec![false; n];
        for c in 0..k {
            if sizes[c] > 0 {
                continue;
            }
            let mut far_i = None;
            let mut far_d = F::neg_infinity();
            for i in 0..n {
                if promoted[i] || sizes[labels[i]] <= 1 {
                    continue;
                }
                let dist = sq_dist(points, i, &centers[labels[i]]);
                if dist > far_d {
                    far_d = dist;
                    far_i = Some(i);
                }
            }
            if let Some(i) = far_i {
                sizes[labels[i]] -= 1;
                labels[i] = c;
                sizes[c] = 1;
                centers[c] = points.row(i).to_vec();
                promoted[i] = true;
                changed = true;
            }
        }

        // center update
        for (c, center) in centers.iter_mut().enumerate() {
            if sizes[c] == 0 {
                continue;
            }
            for v in center.iter_mut() {
                *v = F::zero();
            }
            for i in 0..n {
                if labels[i] == c {
                    for (v, &p) in center.iter_mut().zip(points.row(i).iter()) {
                        *v += p;
                    }
                }
            }
            let inv = F::one() / cast::<F>(sizes[c] as f64);
            for v in center.iter_mut() {
                *v *= inv;
            }
        }

        objective = F::zero();
        for i in 0..n {
            objective += sq_dist(points, i, &centers[labels[i]]);
        }
        debug_assert!(
            objective <= prev_objective * (F::one() + cast::<F>(1e-9)) + cast::<F>(1e-12),
            "Lloyd objective increased"
        );
        prev_objective = objective;

        if !changed {
            break;
        }
    }

    let mut center_mat = Array2::zeros((k, d));
    for (c, center) in centers.iter().enumerate() {
        for (j, &v) in center.iter().enumerate() {
            center_mat[(c, j)] = v;
        }
    }
    Clustering { labels, centers: center_mat, objective }
}

/// Fraction of vertices mislabeled after the best relabeling:
/// `n^{-1} min_pi #{i : c_i != pi(c'_i)}`, solved exactly by assignment on
/// the co-mismatch count matrix. Unequal label alphabets are padded with
/// zero-count labels.
pub fn discrepancy(c: &[usize], c_prime: &[usize]) -> Result<f64> {
    if c.len() != c_prime.len() {
        return Err(Error::ShapeMismatch(format!(
            "label vectors of lengths {} and {}",
            c.len(),
            c_prime.len()
        )));
    }
    if c.is_empty() {
        return Err(Error::InvalidParameter("empty label vectors".into()));
    }
    let n = c.len();
    let k = c
        .iter()
        .chain(c_prime.iter())
        .max()
        .map(|&m| m + 1)
        .unwrap_or(1);

    // contingency[a][b] = #{i : c_i = a, c'_i = b}
    let mut contingency = vec![vec![0usize; k]; k];
    let mut col_count = vec![0usize; k];
    for (&a, &b) in c.iter().zip(c_prime.iter()) {
        contingency[a][b] += 1;
        col_count[b] += 1;
    }
    // cost of sending label b of c' to label a of c = mismatches in column b
    let cost = Array2::from_shape_fn((k, k), |(b, a)| (col_count[b] - contingency[a][b]) as f64);
    let assignment = hungarian(&cost)?;
    Ok(assignment.cost / n as f64)
}

/// End-to-end pipeline: plug-in embedding of the collection, then K-means
/// over embedding rows.
pub fn recover_communities<F: Scalar>(
    networks: &NetworkCollection<F>,
    d: usize,
    k: usize,
    weight_variant: RhoVariant,
    opts: KmeansOptions,
    stream: RngStream,
) -> Result<(Clustering<F>, Embedding<F>, WeightVector<F>)> {
    let plug = plugin_embedding(networks, d, weight_variant)?;
    let clustering = kmeans(
        plug.embedding.coords.view(),
        k,
        opts.restarts,
        opts.max_iter,
        stream,
    )?;
    Ok((clustering, plug.embedding, plug.weights))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    #[test]
    fn separated_duplicates_have_zero_objective() {
        // 3 distinct locations, each repeated 4 times
        let mut pts = Vec::new();
        for &(x, y) in &[(0.0, 0.0), (5.0, 5.0), (-3.0, 4.0)] {
            for _ in 0..4 {
                pts.push([x, y]);
            }
        }
        let arr = Array2::from_shape_fn((12, 2), |(i, j)| pts[i][j]);
        let c = kmeans(arr.view(), 3, 5, 100, RngStream::new(60, 0)).unwrap();
        assert_abs_diff_eq!(c.objective, 0.0, epsilon = 1e-24);
        for group in 0..3 {
            let first = c.labels[group * 4];
            for i in 0..4 {
                assert_eq!(c.labels[group * 4 + i], first);
            }
        }
    }

    #[test]
    fn k1_center_is_mean() {
        let arr: Array2<f64> = array![[1.0], [2.0], [6.0]];
        let c = kmeans(arr.view(), 1, 3, 100, RngStream::new(61, 0)).unwrap();
        assert_abs_diff_eq!(c.centers[(0, 0)], 3.0, epsilon = 1e-12);
        // objective = sum of squared deviations from the mean
        let expect = (1.0f64 - 3.0).powi(2) + (2.0f64 - 3.0).powi(2) + (6.0f64 - 3.0).powi(2);
        assert_abs_diff_eq!(c.objective, expect, epsilon = 1e-12);
    }

    #[test]
    fn objective_matches_recomputation() {
        let mut rng = RngStream::new(62, 0).rng();
        let arr = Array2::from_shape_fn((30, 2), |_| rng.uniform());
        let c = kmeans(arr.view(), 4, 8, 100, RngStream::new(62, 1)).unwrap();
        let mut obj = 0.0;
        for i in 0..30 {
            let mut s = 0.0;
            for j in 0..2 {
                let d: f64 = arr[(i, j)] - c.centers[(c.labels[i], j)];
                s += d * d;
            }
            obj += s;
        }
        assert!((obj - c.objective).abs() <= 1e-9 * obj.max(1.0));
        assert!(c.labels.iter().all(|&l| l < 4));
    }

    #[test]
    fn k_larger_than_n_rejected() {
        let arr = Array2::<f64>::zeros((3, 2));
        assert!(kmeans(arr.view(), 4, 1, 10, RngStream::new(0, 0)).is_err());
    }

    #[test]
    fn discrepancy_trivials() {
        let c = [0usize, 0, 1, 1];
        assert_eq!(discrepancy(&c, &c).unwrap(), 0.0);
        // pure relabeling
        let swapped = [1usize, 1, 0, 0];
        assert_eq!(discrepancy(&c, &swapped).unwrap(), 0.0);
        // half mismatch whichever permutation is chosen
        let mixed = [0usize, 1, 0, 1];
        assert_eq!(discrepancy(&c, &mixed).unwrap(), 0.5);
    }

    #[test]
    fn discrepancy_handles_unequal_alphabets() {
        let c = [0usize, 1, 2];
        let cp = [0usize, 1, 1];
        // best permutation keeps 0 and 1 fixed, so exactly one mismatch
        assert_abs_diff_eq!(discrepancy(&c, &cp).unwrap(), 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn discrepancy_errors() {
        assert!(discrepancy(&[0, 1], &[0]).is_err());
        assert!(discrepancy(&[], &[]).is_err());
    }
}
