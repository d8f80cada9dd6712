//! Dense symmetric eigendecomposition: Householder tridiagonalization,
//! implicit-shift QL for the full spectrum, inverse iteration for the
//! eigenvectors that are actually kept.
//!
//! `sym_eigen_topd` computes the full set of eigenvalues and then the `d`
//! algebraically largest pairs. Eigenvalue selection is by algebraic (not
//! magnitude) order throughout the crate.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::scalar::{cast, cast_n, Scalar};
use crate::sym::SymmetricMatrix;

/// QL sweeps allowed per eigenvalue before reporting non-convergence.
pub const MAX_QL_ITERS: usize = 50;

/// Top-d eigenpairs of a symmetric matrix: `values` sorted descending in
/// algebraic order, `vectors` an n-by-d matrix with orthonormal columns.
#[derive(Debug, Clone)]
pub struct EigenPairs<F> {
    pub values: Vec<F>,
    pub vectors: Array2<F>,
}

impl<F: Scalar> EigenPairs<F> {
    pub fn n(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn d(&self) -> usize {
        self.values.len()
    }
}

/// The `d` algebraically largest eigenvalues and matching orthonormal
/// eigenvectors. Eigenvector signs are fixed so the first nonzero component
/// is positive.
pub fn sym_eigen_topd<F: Scalar>(a: &SymmetricMatrix<F>, d: usize) -> Result<EigenPairs<F>> {
    let n = a.n();
    if d == 0 || d > n {
        return Err(Error::DimOutOfRange { d, n });
    }
    let hh = Householder::reduce(a);
    let values_asc = ql_eigenvalues(&hh.diag, &hh.sub)?;
    let kept: Vec<F> = values_asc.iter().rev().take(d).cloned().collect();

    let mut tri_vecs: Vec<Vec<F>> = Vec::with_capacity(d);
    for &lam in &kept {
        let v = tridiag_eigenvector(&hh.diag, &hh.sub, lam, &tri_vecs)?;
        tri_vecs.push(v);
    }

    let mut vectors = Array2::zeros((n, d));
    for (k, v) in tri_vecs.into_iter().enumerate() {
        let mut z = v;
        hh.back_transform(&mut z);
        fix_sign(&mut z);
        for i in 0..n {
            vectors[(i, k)] = z[i];
        }
    }
    Ok(EigenPairs { values: kept, vectors })
}

/// All eigenvalues, descending.
pub fn sym_eigenvalues<F: Scalar>(a: &SymmetricMatrix<F>) -> Result<Vec<F>> {
    let hh = Householder::reduce(a);
    let mut vals = ql_eigenvalues(&hh.diag, &hh.sub)?;
    vals.reverse();
    Ok(vals)
}

/// Rank-d truncation: the matrix rebuilt from the d algebraically largest
/// eigenpairs (negative kept eigenvalues are retained as-is).
pub fn rank_d_truncate<F: Scalar>(a: &SymmetricMatrix<F>, d: usize) -> Result<SymmetricMatrix<F>> {
    let eig = sym_eigen_topd(a, d)?;
    Ok(reconstruct(&eig))
}

/// `U diag(values) U^T` for a computed set of pairs, exactly symmetric.
pub fn reconstruct<F: Scalar>(eig: &EigenPairs<F>) -> SymmetricMatrix<F> {
    let mut scaled = eig.vectors.clone();
    for (k, &lam) in eig.values.iter().enumerate() {
        scaled.column_mut(k).mapv_inplace(|v| v * lam);
    }
    let prod = scaled.dot(&eig.vectors.t());
    SymmetricMatrix::symmetrized(prod).expect("finite reconstruction")
}

/// Spectral condition number over the kept spectrum: `lambda_1 / lambda_d`.
pub fn condition_kappa<F: Scalar>(p: &SymmetricMatrix<F>, d: usize) -> Result<F> {
    let n = p.n();
    if d == 0 || d > n {
        return Err(Error::DimOutOfRange { d, n });
    }
    let vals = sym_eigenvalues(p)?;
    let top = vals[0];
    let bottom = vals[d - 1];
    if bottom <= F::zero() {
        return Err(Error::KeptEigenvalueNegative {
            index: d - 1,
            value: bottom.to_f64().unwrap(),
        });
    }
    Ok(top / bottom)
}

fn fix_sign<F: Scalar>(v: &mut [F]) {
    for &x in v.iter() {
        if x != F::zero() {
            if x < F::zero() {
                for y in v.iter_mut() {
                    *y = -*y;
                }
            }
            return;
        }
    }
}

/// Householder reduction to tridiagonal form. Reflectors are kept (in the
/// strict lower triangle of the workspace) so that selected tridiagonal
/// eigenvectors can be transformed back to the original basis in O(n^2)
/// per vector.
struct Householder<F> {
    n: usize,
    work: Vec<F>,
    hs: Vec<F>,
    diag: Vec<F>,
    sub: Vec<F>,
}

impl<F: Scalar> Householder<F> {
    fn reduce(a: &SymmetricMatrix<F>) -> Self {
        let n = a.n();
        let mut work: Vec<F> = Vec::with_capacity(n * n);
        for row in a.as_array().rows() {
            work.extend(row.iter().cloned());
        }
        let mut hs = vec![F::zero(); n.saturating_sub(2)];
        let mut sub = vec![F::zero(); n];
        let mut u = vec![F::zero(); n];
        let mut p = vec![F::zero(); n];

        for k in 0..n.saturating_sub(2) {
            let mut scale = F::zero();
            for i in (k + 1)..n {
                scale += work[i * n + k].abs();
            }
            if scale == F::zero() {
                sub[k] = F::zero();
                hs[k] = F::zero();
                continue;
            }
            let mut sigma2 = F::zero();
            for i in (k + 1)..n {
                let x = work[i * n + k] / scale;
                u[i] = x;
                sigma2 += x * x;
            }
            let sigma = sigma2.sqrt();
            let alpha = if u[k + 1] > F::zero() { -sigma } else { sigma };
            let h = sigma2 - alpha * u[k + 1];
            u[k + 1] -= alpha;
            sub[k] = scale * alpha;
            if h == F::zero() {
                hs[k] = F::zero();
                continue;
            }

            // p = A_block u / h over the trailing block
            for i in (k + 1)..n {
                let row = &work[i * n + (k + 1)..i * n + n];
                let mut acc = F::zero();
                for (j, &r) in row.iter().enumerate() {
                    acc += r * u[k + 1 + j];
                }
                p[i] = acc / h;
            }
            let mut upk = F::zero();
            for i in (k + 1)..n {
                upk += u[i] * p[i];
            }
            let kk = upk / (h + h);
            // w = p - K u, then A <- A - u w^T - w u^T
            for i in (k + 1)..n {
                p[i] -= kk * u[i];
            }
            for i in (k + 1)..n {
                let ui = u[i];
                let wi = p[i];
                let row = &mut work[i * n + (k + 1)..i * n + n];
                for (j, r) in row.iter_mut().enumerate() {
                    *r = *r - ui * p[k + 1 + j] - wi * u[k + 1 + j];
                }
            }
            // retain the reflector
            for i in (k + 1)..n {
                work[i * n + k] = u[i];
            }
            hs[k] = h;
        }

        let mut diag = vec![F::zero(); n];
        for i in 0..n {
            diag[i] = work[i * n + i];
        }
        if n >= 2 {
            sub[n - 2] = work[(n - 1) * n + (n - 2)];
        }
        sub[n - 1] = F::zero();

        Self { n, work, hs, diag, sub }
    }

    /// Apply the accumulated orthogonal transform to a tridiagonal-basis
    /// vector, yielding a vector in the original basis.
    fn back_transform(&self, z: &mut [F]) {
        let n = self.n;
        for k in (0..n.saturating_sub(2)).rev() {
            let h = self.hs[k];
            if h == F::zero() {
                continue;
            }
            let mut s = F::zero();
            for i in (k + 1)..n {
                s += self.work[i * n + k] * z[i];
            }
            s /= h;
            for i in (k + 1)..n {
                z[i] -= s * self.work[i * n + k];
            }
        }
    }
}

/// Eigenvalues of a symmetric tridiagonal matrix, ascending. `sub[i]`
/// couples rows i and i+1; `sub[n-1]` is ignored. Implicit-shift QL.
fn ql_eigenvalues<F: Scalar>(diag: &[F], sub: &[F]) -> Result<Vec<F>> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = sub.to_vec();
    e[n - 1] = F::zero();
    let eps = F::epsilon();
    let two = cast::<F>(2.0);

    let mut f = F::zero();
    let mut tst1 = F::zero();
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_QL_ITERS {
                    return Err(Error::NoConvergence(MAX_QL_ITERS));
                }
                // implicit shift
                let g = d[l];
                let mut p = (d[l + 1] - g) / (two * e[l]);
                let mut r = p.hypot(F::one());
                if p < F::zero() {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for item in d.iter_mut().take(n).skip(l + 2) {
                    *item -= h;
                }
                f += h;

                // QL sweep
                p = d[m];
                let mut c = F::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = F::zero();
                let mut s2 = F::zero();
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g2 = c * e[i];
                    let h2 = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g2;
                    d[i + 1] = h2 + s * (c * g2 + s * d[i]);
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = F::zero();
    }
    d.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    Ok(d)
}

/// One eigenvector of the tridiagonal matrix by inverse iteration,
/// orthogonalized against previously accepted vectors (which handles
/// repeated or clustered eigenvalues).
fn tridiag_eigenvector<F: Scalar>(
    diag: &[F],
    sub: &[F],
    lambda: F,
    accepted: &[Vec<F>],
) -> Result<Vec<F>> {
    let n = diag.len();
    if n == 1 {
        return Ok(vec![F::one()]);
    }
    let mut anorm = F::zero();
    for i in 0..n {
        let mut row = diag[i].abs();
        if i > 0 {
            row += sub[i - 1].abs();
        }
        if i + 1 < n {
            row += sub[i].abs();
        }
        anorm = anorm.max(row);
    }
    let eps = F::epsilon();
    let pivmin = eps * anorm.max(F::one());
    let tol_res = cast::<F>(100.0) * eps * cast_n::<F>(n).sqrt() * (anorm + lambda.abs() + F::one());

    // deterministic varied start vectors
    let mut pattern = 0x9e37u64.wrapping_add(accepted.len() as u64);
    let mut best: Option<(F, Vec<F>)> = None;
    for _attempt in 0..4 {
        let mut x = vec![F::zero(); n];
        for item in x.iter_mut() {
            pattern = pattern.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            *item = cast::<F>(((pattern >> 33) as f64) / (2f64.powi(31)) - 1.0);
        }
        orthogonalize(&mut x, accepted);
        if !normalize(&mut x) {
            continue;
        }
        let mut ok = true;
        for _iter in 0..3 {
            let mut y = solve_shifted(diag, sub, lambda, &x, pivmin);
            orthogonalize(&mut y, accepted);
            if !normalize(&mut y) {
                ok = false;
                break;
            }
            x = y;
        }
        if !ok {
            continue;
        }
        let res = shifted_residual(diag, sub, lambda, &x);
        if res <= tol_res {
            return Ok(x);
        }
        match &best {
            Some((r, _)) if *r <= res => {}
            _ => best = Some((res, x)),
        }
    }
    // accept the best attempt if it is still within the documented bound
    if let Some((res, x)) = best {
        let documented = cast::<F>(1e-8) * (F::one() + lambda.abs());
        if res <= documented {
            return Ok(x);
        }
    }
    Err(Error::NoConvergence(MAX_QL_ITERS))
}

fn orthogonalize<F: Scalar>(x: &mut [F], basis: &[Vec<F>]) {
    for v in basis {
        let mut dot = F::zero();
        for (a, b) in x.iter().zip(v.iter()) {
            dot += *a * *b;
        }
        for (a, b) in x.iter_mut().zip(v.iter()) {
            *a -= dot * *b;
        }
    }
}

fn normalize<F: Scalar>(x: &mut [F]) -> bool {
    let mut ss = F::zero();
    for &v in x.iter() {
        ss += v * v;
    }
    let norm = ss.sqrt();
    if !(norm.is_finite()) || norm < F::epsilon() {
        return false;
    }
    for v in x.iter_mut() {
        *v /= norm;
    }
    true
}

/// Solve `(T - lambda I) y = x` by Gaussian elimination with partial
/// pivoting on the tridiagonal band; near-zero pivots are replaced by
/// `pivmin` so exact singularity still yields a usable direction.
fn solve_shifted<F: Scalar>(diag: &[F], sub: &[F], lambda: F, x: &[F], pivmin: F) -> Vec<F> {
    let n = diag.len();
    let mut alpha: Vec<F> = diag.iter().map(|&d| d - lambda).collect();
    let mut beta: Vec<F> = (0..n).map(|i| if i + 1 < n { sub[i] } else { F::zero() }).collect();
    let mut gamma = vec![F::zero(); n];
    let mut low: Vec<F> = beta.clone();
    let mut y = x.to_vec();

    for i in 0..n - 1 {
        // row i holds (alpha[i], beta[i], gamma[i]); row i+1 holds
        // (low[i], alpha[i+1], beta[i+1]) in columns (i, i+1, i+2)
        if low[i].abs() > alpha[i].abs() {
            std::mem::swap(&mut alpha[i], &mut low[i]);
            std::mem::swap(&mut beta[i], &mut alpha[i + 1]);
            std::mem::swap(&mut gamma[i], &mut beta[i + 1]);
            y.swap(i, i + 1);
        }
        if alpha[i].abs() < pivmin {
            alpha[i] = pivmin;
        }
        let mult = low[i] / alpha[i];
        alpha[i + 1] -= mult * beta[i];
        beta[i + 1] -= mult * gamma[i];
        y[i + 1] = y[i + 1] - mult * y[i];
    }
    if alpha[n - 1].abs() < pivmin {
        alpha[n - 1] = pivmin;
    }

    y[n - 1] /= alpha[n - 1];
    if n >= 2 {
        y[n - 2] = (y[n - 2] - beta[n - 2] * y[n - 1]) / alpha[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        y[i] = (y[i] - beta[i] * y[i + 1] - gamma[i] * y[i + 2]) / alpha[i];
    }
    y
}

fn shifted_residual<F: Scalar>(diag: &[F], sub: &[F], lambda: F, x: &[F]) -> F {
    let n = diag.len();
    let mut ss = F::zero();
    for i in 0..n {
        let mut v = (diag[i] - lambda) * x[i];
        if i > 0 {
            v += sub[i - 1] * x[i - 1];
        }
        if i + 1 < n {
            v += sub[i] * x[i + 1];
        }
        ss += v * v;
    }
    ss.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    fn sym(a: Array2<f64>) -> SymmetricMatrix<f64> {
        SymmetricMatrix::new(a).unwrap()
    }

    #[test]
    fn diagonal_case() {
        let a = sym(Array2::from_diag(&array![5.0, 2.0, -1.0]));
        let eig = sym_eigen_topd(&a, 2).unwrap();
        assert_abs_diff_eq!(eig.values[0], 5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(eig.values[1], 2.0, epsilon = 1e-12);
        // eigenvectors are (signed) standard basis vectors
        assert_abs_diff_eq!(eig.vectors[(0, 0)].abs(), 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(eig.vectors[(1, 1)].abs(), 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(eig.vectors[(1, 0)], 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(eig.vectors[(2, 1)], 0.0, epsilon = 1e-10);
    }

    #[test]
    fn rank_one_outer_product() {
        // (3,4)(3,4)^T
        let a = sym(array![[9.0, 12.0], [12.0, 16.0]]);
        let eig = sym_eigen_topd(&a, 1).unwrap();
        assert_abs_diff_eq!(eig.values[0], 25.0, epsilon = 1e-10);
        let v = (eig.vectors[(0, 0)], eig.vectors[(1, 0)]);
        assert_abs_diff_eq!(v.0.abs(), 0.6, epsilon = 1e-10);
        assert_abs_diff_eq!(v.1.abs(), 0.8, epsilon = 1e-10);
        assert!(v.0 * v.1 > 0.0, "components share the sign of (0.6, 0.8)");
    }

    #[test]
    fn d_out_of_range() {
        let a = sym(array![[1.0, 0.0], [0.0, 1.0]]);
        assert!(matches!(sym_eigen_topd(&a, 0), Err(Error::DimOutOfRange { .. })));
        assert!(matches!(sym_eigen_topd(&a, 3), Err(Error::DimOutOfRange { .. })));
    }

    #[test]
    fn repeated_eigenvalues_give_orthonormal_vectors() {
        let n = 6;
        let a = SymmetricMatrix::from_upper(n, |i, j| if i == j { 3.0 } else { 0.0 });
        let eig = sym_eigen_topd(&a, n).unwrap();
        for k in 0..n {
            assert_abs_diff_eq!(eig.values[k], 3.0, epsilon = 1e-12);
        }
        for k in 0..n {
            for l in 0..n {
                let mut dot = 0.0;
                for i in 0..n {
                    dot += eig.vectors[(i, k)] * eig.vectors[(i, l)];
                }
                let expect = if k == l { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(dot, expect, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn truncation_diagonal() {
        let a = sym(Array2::from_diag(&array![5.0, 2.0, -1.0]));
        let t = rank_d_truncate(&a, 1).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if (i, j) == (0, 0) { 5.0 } else { 0.0 };
                assert_abs_diff_eq!(t[(i, j)], expect, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn truncation_idempotent_on_rank_d_psd() {
        // A = XX^T with X 5x2 is exactly rank 2 and PSD
        let x: Array2<f64> = array![[1.0, 0.5], [0.2, -1.0], [0.7, 0.3], [-0.4, 0.8], [0.1, 0.9]];
        let a = SymmetricMatrix::new(x.dot(&x.t())).unwrap();
        let t = rank_d_truncate(&a, 2).unwrap();
        let mut err = 0.0f64;
        for i in 0..5 {
            for j in 0..5 {
                err += (t[(i, j)] - a[(i, j)]).powi(2);
            }
        }
        assert!(err.sqrt() <= 1e-8, "frobenius error {}", err.sqrt());
    }

    #[test]
    fn kappa_examples() {
        let p = sym(Array2::from_diag(&array![4.0, 2.0, 0.0]));
        assert_abs_diff_eq!(condition_kappa(&p, 2).unwrap(), 2.0, epsilon = 1e-12);

        // c * rank-d projector
        let x = array![[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]];
        let proj = SymmetricMatrix::new(x.dot(&x.t()) * 2.5).unwrap();
        assert_abs_diff_eq!(condition_kappa(&proj, 2).unwrap(), 1.0, epsilon = 1e-10);

        assert!(matches!(
            condition_kappa(&p, 3),
            Err(Error::KeptEigenvalueNegative { index: 2, .. })
        ));
    }

    #[test]
    fn residuals_on_small_random_matrices() {
        for seed in 0..50u64 {
            let mut rng = crate::rng::RngStream::new(900 + seed, 0).rng();
            let n = 2 + (seed as usize % 7);
            let a = SymmetricMatrix::from_upper(n, |_, _| rng.uniform() * 2.0 - 1.0);
            let eig = sym_eigen_topd(&a, n.min(3)).unwrap();
            for k in 0..eig.d() {
                let lam = eig.values[k];
                let mut res = 0.0f64;
                for i in 0..n {
                    let mut av = 0.0;
                    for j in 0..n {
                        av += a[(i, j)] * eig.vectors[(j, k)];
                    }
                    res += (av - lam * eig.vectors[(i, k)]).powi(2);
                }
                assert!(
                    res.sqrt() <= 1e-8 * (1.0 + lam.abs()),
                    "seed {seed} pair {k}: residual {}",
                    res.sqrt()
                );
            }
        }
    }
}
