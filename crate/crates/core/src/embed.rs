//! Adjacency spectral embedding and Procrustes alignment.

use ndarray::Array2;

use crate::eigen::{sym_eigen_topd, EigenPairs};
use crate::error::{Error, Result};
use crate::norms::frobenius_norm;
use crate::scalar::{cast, Scalar};
use crate::sym::SymmetricMatrix;

/// Relative tolerance below which kept negative eigenvalues are clamped to
/// zero rather than rejected.
pub const ASE_NEG_TOL: f64 = 1e-8;

/// Latent-position estimates: an n-by-d coordinate matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding<F> {
    pub coords: Array2<F>,
}

impl<F: Scalar> Embedding<F> {
    pub fn n(&self) -> usize {
        self.coords.nrows()
    }

    pub fn d(&self) -> usize {
        self.coords.ncols()
    }
}

/// Adjacency spectral embedding `U_A S_A^{1/2}` from the top-d
/// eigendecomposition. Kept eigenvalues slightly below zero (within
/// `ASE_NEG_TOL * (1 + |lambda_1|)`) are clamped to zero; anything lower is
/// a `KeptEigenvalueNegative` error, signalling the input is not
/// approximately PSD on its top-d spectrum.
pub fn ase<F: Scalar>(a: &SymmetricMatrix<F>, d: usize) -> Result<Embedding<F>> {
    let eig = sym_eigen_topd(a, d)?;
    ase_from_pairs(&eig)
}

/// Embedding from already-computed top-d pairs.
pub fn ase_from_pairs<F: Scalar>(eig: &EigenPairs<F>) -> Result<Embedding<F>> {
    let tol = cast::<F>(ASE_NEG_TOL) * (F::one() + eig.values[0].abs());
    let mut coords = eig.vectors.clone();
    for (k, &lam) in eig.values.iter().enumerate() {
        if lam < -tol {
            return Err(Error::KeptEigenvalueNegative {
                index: k,
                value: lam.to_f64().unwrap(),
            });
        }
        let root = lam.max(F::zero()).sqrt();
        coords.column_mut(k).mapv_inplace(|v| v * root);
    }
    Ok(Embedding { coords })
}

/// Result of a Procrustes alignment: the orthogonal matrix minimizing
/// `|Y - X W|_F`, with a flag raised when `X^T Y` is rank deficient (the
/// minimizer is then non-unique and an arbitrary valid completion is used).
#[derive(Debug, Clone)]
pub struct ProcrustesAlignment<F> {
    pub rotation: Array2<F>,
    pub rank_deficient: bool,
}

/// Orthogonal `W` minimizing `|Y - X W|_F`, via the polar factor of `X^T Y`.
pub fn procrustes_align<F: Scalar>(y: &Array2<F>, x: &Array2<F>) -> Result<ProcrustesAlignment<F>> {
    if y.dim() != x.dim() {
        return Err(Error::ShapeMismatch(format!(
            "procrustes inputs {:?} vs {:?}",
            y.dim(),
            x.dim()
        )));
    }
    crate::sym::check_finite(y)?;
    crate::sym::check_finite(x)?;
    let d = y.ncols();
    if d == 0 {
        return Ok(ProcrustesAlignment { rotation: Array2::zeros((0, 0)), rank_deficient: false });
    }
    let b = x.t().dot(y);

    // SVD of the small d-by-d matrix via the eigendecomposition of B^T B.
    let btb = SymmetricMatrix::symmetrized(b.t().dot(&b))?;
    let eig = sym_eigen_topd(&btb, d)?;
    let sigma: Vec<F> = eig.values.iter().map(|&l| l.max(F::zero()).sqrt()).collect();
    let sigma_max = sigma[0];
    let cutoff = cast::<F>(1e-12) * sigma_max.max(F::one());

    // left singular vectors; columns with vanishing sigma are completed to
    // an orthonormal basis
    let mut u = Array2::<F>::zeros((d, d));
    let mut rank_deficient = false;
    let mut filled: Vec<Vec<F>> = Vec::with_capacity(d);
    for k in 0..d {
        if sigma[k] > cutoff {
            let mut col = vec![F::zero(); d];
            for i in 0..d {
                let mut acc = F::zero();
                for j in 0..d {
                    acc += b[(i, j)] * eig.vectors[(j, k)];
                }
                col[i] = acc / sigma[k];
            }
            filled.push(col);
        } else {
            rank_deficient = true;
            filled.push(complete_orthonormal(&filled, d));
        }
    }
    for (k, col) in filled.iter().enumerate() {
        for i in 0..d {
            u[(i, k)] = col[i];
        }
    }

    let rotation = u.dot(&eig.vectors.t());
    Ok(ProcrustesAlignment { rotation, rank_deficient })
}

/// Residual `|Y - X W|_F` of an alignment.
pub fn procrustes_residual<F: Scalar>(y: &Array2<F>, x: &Array2<F>, w: &Array2<F>) -> F {
    let diff = y - &x.dot(w);
    frobenius_norm(diff.view())
}

fn complete_orthonormal<F: Scalar>(existing: &[Vec<F>], d: usize) -> Vec<F> {
    for trial in 0..d {
        let mut v = vec![F::zero(); d];
        v[trial] = F::one();
        for e in existing {
            let mut dot = F::zero();
            for i in 0..d {
                dot += v[i] * e[i];
            }
            for i in 0..d {
                v[i] -= dot * e[i];
            }
        }
        let mut ss = F::zero();
        for &x in &v {
            ss += x * x;
        }
        let norm = ss.sqrt();
        if norm > cast::<F>(0.5) {
            for x in v.iter_mut() {
                *x /= norm;
            }
            return v;
        }
    }
    unreachable!("orthonormal completion always succeeds for some basis vector")
}
