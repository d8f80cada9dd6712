//! Noise-scale estimation, weight construction, weighted means, and the
//! plug-in spectral embedding.

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::eigen::rank_d_truncate;
use crate::embed::{ase, Embedding};
use crate::error::{Error, Result};
use crate::model::NetworkCollection;
use crate::noise::NoiseSpec;
use crate::norms::{frobenius_norm, spectral_norm, two_to_infty_norm};
use crate::scalar::{cast, cast_n, Scalar};
use crate::sym::SymmetricMatrix;

/// Which residual-variance estimator produced a set of rho values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RhoVariant {
    Gaussian,
    Subgamma,
}

/// Per-network residual-scale estimates.
#[derive(Debug, Clone)]
pub struct RhoEstimates<F> {
    pub rho: Vec<F>,
    pub variant: RhoVariant,
}

/// Where a weight vector came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightProvenance {
    Uniform,
    Oracle,
    EstimatedGaussian,
    EstimatedSubgamma,
}

/// Nonnegative weights summing to one.
#[derive(Debug, Clone)]
pub struct WeightVector<F> {
    weights: Vec<F>,
    provenance: WeightProvenance,
}

impl<F: Scalar> WeightVector<F> {
    /// Validate: nonnegative entries summing to 1 within 1e-12.
    pub fn new(weights: Vec<F>, provenance: WeightProvenance) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidParameter("empty weight vector".into()));
        }
        let mut sum = F::zero();
        for &w in &weights {
            if !w.is_finite() || w < F::zero() {
                return Err(Error::InvalidParameter("weights must be finite and >= 0".into()));
            }
            sum += w;
        }
        if (sum - F::one()).abs() > cast::<F>(1e-12) {
            return Err(Error::InvalidParameter(format!(
                "weights sum to {} rather than 1",
                sum.to_f64().unwrap()
            )));
        }
        Ok(Self { weights, provenance })
    }

    pub fn uniform(n: usize) -> Self {
        let w = F::one() / cast_n::<F>(n);
        Self { weights: vec![w; n], provenance: WeightProvenance::Uniform }
    }

    pub fn weights(&self) -> &[F] {
        &self.weights
    }

    pub fn provenance(&self) -> WeightProvenance {
        self.provenance
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Sum of squared residual entries over the upper triangle with diagonal,
/// `sum_{i <= j} (A - Phat)_{ij}^2`.
fn residual_upper_sq<F: Scalar>(a: &SymmetricMatrix<F>, phat: &SymmetricMatrix<F>) -> F {
    let n = a.n();
    let mut s = F::zero();
    for i in 0..n {
        for j in i..n {
            let r = a[(i, j)] - phat[(i, j)];
            s += r * r;
        }
    }
    s
}

/// Residual-variance MLE under Gaussian edge noise:
/// `sum_{i<=j} 2 (A - Phat)_{ij}^2 / (n (n+1))` with `Phat` the rank-d
/// truncation of A.
pub fn estimate_rho_gaussian<F: Scalar>(a: &SymmetricMatrix<F>, d: usize) -> Result<F> {
    let phat = rank_d_truncate(a, d)?;
    Ok(rho_gaussian_residual(a, &phat))
}

/// Sub-gamma residual scale:
/// `sum_{i<=j} (A - Phat)_{ij}^2 / (16 n (n+1))`. Equals the Gaussian
/// estimate divided by exactly 32.
pub fn estimate_rho_subgamma<F: Scalar>(a: &SymmetricMatrix<F>, d: usize) -> Result<F> {
    let phat = rank_d_truncate(a, d)?;
    Ok(rho_subgamma_residual(a, &phat))
}

/// Gaussian-variant residual statistic against an arbitrary reference
/// matrix (callers pass the rank-d truncation or, in diagnostics, the
/// known expectation).
pub fn rho_gaussian_residual<F: Scalar>(a: &SymmetricMatrix<F>, reference: &SymmetricMatrix<F>) -> F {
    let n = a.n();
    let m = cast_n::<F>(n) * cast_n::<F>(n + 1);
    cast::<F>(2.0) * residual_upper_sq(a, reference) / m
}

/// Sub-gamma-variant residual statistic against an arbitrary reference.
pub fn rho_subgamma_residual<F: Scalar>(a: &SymmetricMatrix<F>, reference: &SymmetricMatrix<F>) -> F {
    let n = a.n();
    let m = cast_n::<F>(n) * cast_n::<F>(n + 1);
    residual_upper_sq(a, reference) / (cast::<F>(16.0) * m)
}

/// Inverse-rho weights `w_s = rho_s^{-1} / sum_t rho_t^{-1}`. A zero rho
/// (noise-free network under the model) is surfaced as `ZeroRho`; callers
/// decide how to treat it.
pub fn weights_from_rho<F: Scalar>(rho: &RhoEstimates<F>) -> Result<WeightVector<F>> {
    if rho.rho.is_empty() {
        return Err(Error::InvalidParameter("empty rho vector".into()));
    }
    let mut inv = Vec::with_capacity(rho.rho.len());
    for (s, &r) in rho.rho.iter().enumerate() {
        if !(r.is_finite()) || r < F::zero() {
            return Err(Error::InvalidParameter(format!("rho[{s}] must be finite and >= 0")));
        }
        if r == F::zero() {
            return Err(Error::ZeroRho(s));
        }
        inv.push(F::one() / r);
    }
    let total: F = inv.iter().cloned().sum();
    let weights: Vec<F> = inv.into_iter().map(|v| v / total).collect();
    let provenance = match rho.variant {
        RhoVariant::Gaussian => WeightProvenance::EstimatedGaussian,
        RhoVariant::Subgamma => WeightProvenance::EstimatedSubgamma,
    };
    Ok(WeightVector { weights, provenance })
}

/// Variance-optimal weights from known sub-gamma pairs:
/// `w*_s = (nu_s + b_s^2)^{-1} / sum_t (nu_t + b_t^2)^{-1}`, the simplex
/// minimizer of `sum_s w_s^2 (nu_s + b_s^2)`.
pub fn oracle_weights<F: Scalar>(specs: &[NoiseSpec]) -> Result<WeightVector<F>> {
    if specs.is_empty() {
        return Err(Error::InvalidParameter("empty spec list".into()));
    }
    let mut inv = Vec::with_capacity(specs.len());
    for (s, spec) in specs.iter().enumerate() {
        let (nu, b) = spec.subgamma_params();
        let c = nu + b * b;
        if c <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "network {s} has degenerate noiseless spec (nu + b^2 = 0)"
            )));
        }
        inv.push(1.0 / c);
    }
    let total: f64 = inv.iter().sum();
    let weights: Vec<F> = inv.into_iter().map(|v| cast::<F>(v / total)).collect();
    Ok(WeightVector { weights, provenance: WeightProvenance::Oracle })
}

/// Weighted network mean `sum_s w_s A_s`.
pub fn weighted_mean<F: Scalar>(
    networks: &NetworkCollection<F>,
    w: &WeightVector<F>,
) -> Result<SymmetricMatrix<F>> {
    if networks.len() != w.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} networks vs {} weights",
            networks.len(),
            w.len()
        )));
    }
    let n = networks.n();
    let mut acc = Array2::<F>::zeros((n, n));
    for (net, &ws) in networks.networks().iter().zip(w.weights()) {
        acc.zip_mut_with(net.as_array(), |a, &b| *a += ws * b);
    }
    Ok(SymmetricMatrix::from_upper(n, |i, j| acc[(i, j)]))
}

/// Everything the plug-in pipeline produces.
#[derive(Debug, Clone)]
pub struct PluginEmbedding<F> {
    pub embedding: Embedding<F>,
    pub weights: WeightVector<F>,
    pub rho: RhoEstimates<F>,
}

/// Plug-in spectral embedding: per-network rho estimates (in network
/// order), inverse-rho weights, weighted mean, then ASE. The Gaussian and
/// sub-gamma variants produce identical weights and embeddings because the
/// two rho formulas differ by the constant factor 32.
pub fn plugin_embedding<F: Scalar>(
    networks: &NetworkCollection<F>,
    d: usize,
    variant: RhoVariant,
) -> Result<PluginEmbedding<F>> {
    let rho = estimate_rho_all(networks, d, variant)?;
    let weights = weights_from_rho(&rho)?;
    let mean = weighted_mean(networks, &weights)?;
    let embedding = ase(&mean, d)?;
    Ok(PluginEmbedding { embedding, weights, rho })
}

/// Per-network rho estimates, indexed by network order.
pub fn estimate_rho_all<F: Scalar>(
    networks: &NetworkCollection<F>,
    d: usize,
    variant: RhoVariant,
) -> Result<RhoEstimates<F>> {
    let mut rho = Vec::with_capacity(networks.len());
    for net in networks.networks() {
        let r = match variant {
            RhoVariant::Gaussian => estimate_rho_gaussian(net, d)?,
            RhoVariant::Subgamma => estimate_rho_subgamma(net, d)?,
        };
        rho.push(r);
    }
    Ok(RhoEstimates { rho, variant })
}

/// Matrix norms selectable in reports and configs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixNorm {
    Frobenius,
    Spectral,
    TwoInf,
}

impl MatrixNorm {
    pub fn name(&self) -> &'static str {
        match self {
            MatrixNorm::Frobenius => "frobenius",
            MatrixNorm::Spectral => "spectral",
            MatrixNorm::TwoInf => "two_inf",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "frobenius" => Ok(MatrixNorm::Frobenius),
            "spectral" => Ok(MatrixNorm::Spectral),
            "two_inf" => Ok(MatrixNorm::TwoInf),
            other => Err(Error::InvalidParameter(format!("unknown norm '{other}'"))),
        }
    }

    pub fn eval<F: Scalar>(&self, m: ArrayView2<F>) -> Result<F> {
        Ok(match self {
            MatrixNorm::Frobenius => frobenius_norm(m),
            MatrixNorm::Spectral => spectral_norm(m)?,
            MatrixNorm::TwoInf => two_to_infty_norm(m),
        })
    }
}

/// Relative improvement of the weighted estimate over the baseline:
/// `(|P_base - P| - |P_wtd - P|) / |P_base - P|` in the chosen norm.
pub fn relative_improvement<F: Scalar>(
    p: &SymmetricMatrix<F>,
    p_baseline: &SymmetricMatrix<F>,
    p_weighted: &SymmetricMatrix<F>,
    norm: MatrixNorm,
) -> Result<F> {
    let base = norm.eval(p_baseline.minus(p)?.view())?;
    let wtd = norm.eval(p_weighted.minus(p)?.view())?;
    if base == F::zero() {
        return Err(Error::DivisionByZero("baseline estimate equals the target".into()));
    }
    Ok((base - wtd) / base)
}
