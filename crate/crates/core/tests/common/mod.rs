//! Independent oracles for the integration and acceptance suites. These
//! deliberately avoid the library's own numerical paths: the eigensolver
//! here is a textbook cyclic Jacobi rotation scheme, and the combinatorial
//! solvers are exhaustive search.

#![allow(dead_code)]

use ndarray::Array2;
use specnet_core::rng::CounterRng;

/// Full eigendecomposition by cyclic Jacobi rotations. Returns eigenvalues
/// descending with matching orthonormal eigenvector columns.
pub fn jacobi_eigen(a: &Array2<f64>) -> (Vec<f64>, Array2<f64>) {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    let mut m = a.clone();
    let mut v: Array2<f64> = Array2::eye(n);
    let scale: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt().max(1.0);
    for _sweep in 0..200 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += m[(i, j)] * m[(i, j)];
            }
        }
        if off.sqrt() <= 1e-14 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if m[(p, q)].abs() <= 1e-300 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * m[(p, q)]);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (theta * theta + 1.0).sqrt())
                } else {
                    -1.0 / (-theta + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(j, j)].partial_cmp(&m[(i, i)]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| m[(i, i)]).collect();
    let mut vectors = Array2::zeros((n, n));
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors[(row, col)] = v[(row, src)];
        }
    }
    (values, vectors)
}

/// Rank-d truncation rebuilt from the Jacobi decomposition (algebraically
/// largest d eigenvalues).
pub fn jacobi_truncate(a: &Array2<f64>, d: usize) -> Array2<f64> {
    let (values, vectors) = jacobi_eigen(a);
    let n = a.nrows();
    let mut out = Array2::zeros((n, n));
    for k in 0..d {
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] += values[k] * vectors[(i, k)] * vectors[(j, k)];
            }
        }
    }
    out
}

/// All permutations of 0..k.
pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        let k = used.len();
        if prefix.len() == k {
            out.push(prefix.clone());
            return;
        }
        for c in 0..k {
            if !used[c] {
                used[c] = true;
                prefix.push(c);
                rec(prefix, used, out);
                prefix.pop();
                used[c] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; k], &mut out);
    out
}

/// Exhaustive minimum-cost assignment.
pub fn brute_assignment(cost: &Array2<f64>) -> (Vec<usize>, f64) {
    let k = cost.nrows();
    let mut best_perm = Vec::new();
    let mut best_cost = f64::INFINITY;
    for perm in permutations(k) {
        let c: f64 = perm.iter().enumerate().map(|(i, &j)| cost[(i, j)]).sum();
        if c < best_cost {
            best_cost = c;
            best_perm = perm;
        }
    }
    (best_perm, best_cost)
}

/// Exhaustive label-discrepancy: minimum mismatch fraction over all
/// relabelings of `c_prime`.
pub fn brute_discrepancy(c: &[usize], c_prime: &[usize]) -> f64 {
    let k = c.iter().chain(c_prime.iter()).max().map(|&m| m + 1).unwrap_or(1);
    let n = c.len();
    let mut best = usize::MAX;
    for perm in permutations(k) {
        let mismatches = c
            .iter()
            .zip(c_prime.iter())
            .filter(|&(&a, &b)| a != perm[b])
            .count();
        best = best.min(mismatches);
    }
    best as f64 / n as f64
}

/// Literal step-up rule: reject the k* smallest p-values with
/// `k* = max{k : p_(k) <= k alpha / m}`.
pub fn brute_bh(p: &[f64], alpha: f64) -> Vec<bool> {
    let m = p.len();
    let mut sorted: Vec<f64> = p.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut k_star = 0usize;
    for (idx, &pk) in sorted.iter().enumerate() {
        if pk <= (idx + 1) as f64 * alpha / m as f64 {
            k_star = idx + 1;
        }
    }
    if k_star == 0 {
        return vec![false; m];
    }
    let threshold = sorted[k_star - 1];
    p.iter().map(|&pi| pi <= threshold).collect()
}

/// Exhaustive K-means objective over all labelings (tiny inputs only).
pub fn brute_kmeans_objective(points: &Array2<f64>, k: usize) -> f64 {
    let n = points.nrows();
    let d = points.ncols();
    assert!(k.pow(n as u32) <= 1 << 24, "brute kmeans only for tiny inputs");
    let mut best = f64::INFINITY;
    let mut labels = vec![0usize; n];
    loop {
        // centers are per-label means
        let mut sums = vec![vec![0.0; d]; k];
        let mut counts = vec![0usize; k];
        for i in 0..n {
            counts[labels[i]] += 1;
            for j in 0..d {
                sums[labels[i]][j] += points[(i, j)];
            }
        }
        let mut obj = 0.0;
        for i in 0..n {
            let c = labels[i];
            for j in 0..d {
                let center = sums[c][j] / counts[c] as f64;
                let diff = points[(i, j)] - center;
                obj += diff * diff;
            }
        }
        best = best.min(obj);

        // next labeling
        let mut pos = 0;
        loop {
            if pos == n {
                return best;
            }
            labels[pos] += 1;
            if labels[pos] < k {
                break;
            }
            labels[pos] = 0;
            pos += 1;
        }
    }
}

/// Random orthogonal d-by-d matrix via Gram-Schmidt on Gaussian columns.
pub fn random_orthogonal(d: usize, rng: &mut CounterRng) -> Array2<f64> {
    loop {
        let g = Array2::from_shape_fn((d, d), |_| rng.standard_normal());
        let mut q: Array2<f64> = Array2::zeros((d, d));
        let mut ok = true;
        for col in 0..d {
            let mut v: Vec<f64> = (0..d).map(|r| g[(r, col)]).collect();
            for prev in 0..col {
                let dot: f64 = (0..d).map(|r| q[(r, prev)] * v[r]).sum();
                for r in 0..d {
                    v[r] -= dot * q[(r, prev)];
                }
            }
            let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm < 1e-8 {
                ok = false;
                break;
            }
            for r in 0..d {
                q[(r, col)] = v[r] / norm;
            }
        }
        if ok {
            return q;
        }
    }
}

/// Uniform-ish point on the probability simplex (normalized exponentials).
pub fn random_simplex(n: usize, rng: &mut CounterRng) -> Vec<f64> {
    let draws: Vec<f64> = (0..n).map(|_| rng.standard_exponential()).collect();
    let total: f64 = draws.iter().sum();
    draws.into_iter().map(|v| v / total).collect()
}

/// Random symmetric matrix with entries uniform in [-1, 1).
pub fn random_symmetric(n: usize, rng: &mut CounterRng) -> specnet_core::Sym64 {
    specnet_core::Sym64::from_upper(n, |_, _| rng.uniform() * 2.0 - 1.0)
}

pub fn frob(m: &Array2<f64>) -> f64 {
    m.iter().map(|x| x * x).sum::<f64>().sqrt()
}
