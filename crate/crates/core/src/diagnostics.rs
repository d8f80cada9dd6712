//! Computable concentration-bound quantities and growth-condition
//! diagnostics.
//!
//! Unspecified universal constants are fixed to 1 and every output is a
//! shape diagnostic, not a certified bound; asymptotic conditions are
//! reported as finite LHS/RHS pairs flagged informational, never pass/fail.
//! Natural logarithms are used throughout.

use std::collections::BTreeMap;

use ndarray::Array2;
use serde::Serialize;

use crate::eigen::{sym_eigen_topd, sym_eigenvalues};
use crate::error::{Error, Result};
use crate::estimate::{weighted_mean, WeightVector};
use crate::model::NetworkCollection;
use crate::noise::NoiseSpec;
use crate::norms::{frobenius_norm, spectral_norm, two_to_infty_norm};
use crate::scalar::Scalar;
use crate::sym::SymmetricMatrix;

/// Sub-gamma parameters supplied either per network (broadcast over all
/// edges) or per edge.
#[derive(Debug, Clone)]
pub enum ParamField {
    PerNetwork { values: Vec<f64>, n: usize },
    PerEdge(Vec<Array2<f64>>),
}

impl ParamField {
    fn shape(&self) -> Result<(usize, usize)> {
        match self {
            ParamField::PerNetwork { values, n } => Ok((values.len(), *n)),
            ParamField::PerEdge(fields) => {
                if fields.is_empty() {
                    return Err(Error::InvalidParameter("empty parameter field".into()));
                }
                let n = fields[0].nrows();
                for f in fields {
                    if f.nrows() != n || f.ncols() != n {
                        return Err(Error::ShapeMismatch("ragged per-edge parameter field".into()));
                    }
                }
                Ok((fields.len(), n))
            }
        }
    }

    #[inline]
    fn at(&self, s: usize, i: usize, j: usize) -> f64 {
        match self {
            ParamField::PerNetwork { values, .. } => values[s],
            ParamField::PerEdge(fields) => fields[s][(i, j)],
        }
    }
}

/// Variance proxy of the weighted noise matrix:
/// `2 max_i sum_s sum_j w_s^2 (sqrt(2 nu_sij) + 2 b_sij)^2`.
pub fn eta_squared(weights: &[f64], nu: &ParamField, b: &ParamField) -> Result<f64> {
    let (n_nets, n) = nu.shape()?;
    if b.shape()? != (n_nets, n) {
        return Err(Error::ShapeMismatch("nu and b parameter fields differ in shape".into()));
    }
    if weights.len() != n_nets {
        return Err(Error::ShapeMismatch(format!(
            "{} weights vs {n_nets} networks",
            weights.len()
        )));
    }
    let mut worst = 0.0f64;
    for i in 0..n {
        let mut row = 0.0;
        for (s, &w) in weights.iter().enumerate() {
            let w2 = w * w;
            for j in 0..n {
                let term = (2.0 * nu.at(s, i, j)).sqrt() + 2.0 * b.at(s, i, j);
                row += w2 * term * term;
            }
        }
        worst = worst.max(row);
    }
    Ok(2.0 * worst)
}

/// High-probability spectral error bound `(15/2) sqrt(2 eta^2) ln n`.
pub fn spectral_error_bound(eta_sq: f64, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter("spectral bound needs n >= 2".into()));
    }
    Ok(7.5 * (2.0 * eta_sq).sqrt() * (n as f64).ln())
}

/// The two constituents of the row-wise embedding-error bound (universal
/// constants set to 1):
/// `term1 = d lambda_d^{-1/2} sqrt(S) ln n`,
/// `term2 = d n kappa lambda_d^{-3/2} S ln^2 n`,
/// with `S = sum_s w_s^2 (nu_s + b_s^2)`.
pub fn two_inf_bound_terms<F: Scalar>(
    weights: &[f64],
    specs: &[NoiseSpec],
    p: &SymmetricMatrix<F>,
    d: usize,
) -> Result<(f64, f64)> {
    if weights.len() != specs.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} weights vs {} specs",
            weights.len(),
            specs.len()
        )));
    }
    let n = p.n();
    let (lambda_1, lambda_d) = top_and_dth_eigenvalue(p, d)?;
    let s: f64 = weights
        .iter()
        .zip(specs)
        .map(|(&w, spec)| {
            let (nu, b) = spec.subgamma_params();
            w * w * (nu + b * b)
        })
        .sum();
    let ln_n = (n as f64).ln();
    let df = d as f64;
    let term1 = df * s.sqrt() * ln_n / lambda_d.sqrt();
    let term2 = df * (n as f64) * (lambda_1 / lambda_d) * s * ln_n * ln_n / lambda_d.powf(1.5);
    Ok((term1, term2))
}

/// The three constituents of the generic row-wise perturbation bound with
/// constants set to 1:
/// `(|(A-P)U_P|_{2,inf} / sqrt(lambda_d),
///   |U_P^T (A-P) U_P|_F / sqrt(lambda_d),
///   d |A-P|^2 kappa / lambda_d^{3/2})`.
pub fn perturbation_terms<F: Scalar>(
    a: &SymmetricMatrix<F>,
    p: &SymmetricMatrix<F>,
    d: usize,
) -> Result<(f64, f64, f64)> {
    if a.n() != p.n() {
        return Err(Error::ShapeMismatch("matrices differ in order".into()));
    }
    let eig = sym_eigen_topd(p, d)?;
    let lambda_1 = eig.values[0].to_f64().unwrap();
    let lambda_d = eig.values[d - 1].to_f64().unwrap();
    if lambda_d <= 0.0 {
        return Err(Error::KeptEigenvalueNegative { index: d - 1, value: lambda_d });
    }
    let diff = a.minus(p)?;
    let eu = diff.dot(&eig.vectors);
    let t1 = two_to_infty_norm(eu.view()).to_f64().unwrap() / lambda_d.sqrt();
    let core = eig.vectors.t().dot(&diff).dot(&eig.vectors);
    let t2 = frobenius_norm(core.view()).to_f64().unwrap() / lambda_d.sqrt();
    let spec = spectral_norm(diff.view())?.to_f64().unwrap();
    let t3 = (d as f64) * spec * spec * (lambda_1 / lambda_d) / lambda_d.powf(1.5);
    Ok((t1, t2, t3))
}

/// Estimation-rate factor
/// `[sqrt(d) (ln N + ln n)^2 + N^{1/l} n^{(2-l)/(2l)} (ln n)^{c_l}] / sqrt(n)`.
pub fn gamma_n_ell(n: usize, n_nets: usize, d: usize, ell: u32, c_ell: f64) -> Result<f64> {
    if ell == 0 {
        return Err(Error::InvalidParameter("ell must be a positive integer".into()));
    }
    if c_ell <= 1.0 / ell as f64 {
        return Err(Error::InvalidParameter(format!(
            "c_ell must exceed 1/ell = {}",
            1.0 / ell as f64
        )));
    }
    if n < 2 {
        return Err(Error::InvalidParameter("gamma factor needs n >= 2".into()));
    }
    let nf = n as f64;
    let nn = n_nets as f64;
    let lf = ell as f64;
    let ln_n = nf.ln();
    let first = (d as f64).sqrt() * (nn.ln() + ln_n).powi(2);
    let second = nn.powf(1.0 / lf) * nf.powf((2.0 - lf) / (2.0 * lf)) * ln_n.powf(c_ell);
    Ok((first + second) / nf.sqrt())
}

/// Expected residual scale of the sub-gamma rho statistic under edge
/// variance `v`: exactly `v / 32`.
pub fn tau_from_variance(edge_variance: f64) -> f64 {
    debug_assert!(edge_variance >= 0.0);
    edge_variance / 32.0
}

/// One reported growth condition: finite LHS and RHS values, with their
/// ratio, flagged informational.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionValue {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub note: &'static str,
}

impl ConditionValue {
    fn informational(lhs: f64, rhs: f64) -> Self {
        ConditionValue { lhs, rhs, ratio: lhs / rhs, note: "informational" }
    }
}

/// Bound quantities plus growth-condition evaluations for one
/// configuration.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub eta_sq: f64,
    pub spectral_bound: f64,
    /// `|A_wtd - P|` of an observed collection, when one is supplied.
    pub empirical_spectral_error: Option<f64>,
    pub two_inf_terms: (f64, f64),
    pub condition_values: BTreeMap<String, ConditionValue>,
}

/// Assemble the full report for expectation `p`, per-network specs and
/// weights. `memberships` enables the minimum-community-size condition;
/// `observed` fills the empirical spectral error. Networks whose spec is
/// exactly noise-free contribute zero to the noise-side quantities, and
/// the reciprocal-sum condition is omitted when any such network exists.
#[allow(clippy::too_many_arguments)]
pub fn growth_report<F: Scalar>(
    p: &SymmetricMatrix<F>,
    d: usize,
    specs: &[NoiseSpec],
    weights: &WeightVector<F>,
    memberships: Option<&[usize]>,
    ell: u32,
    c_ell: f64,
    observed: Option<&NetworkCollection<F>>,
) -> Result<BoundReport> {
    let n = p.n();
    if n < 2 {
        return Err(Error::InvalidParameter("growth report needs n >= 2".into()));
    }
    if specs.len() != weights.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} specs vs {} weights",
            specs.len(),
            weights.len()
        )));
    }
    let w: Vec<f64> = weights.weights().iter().map(|v| v.to_f64().unwrap()).collect();
    let (_lambda_1, lambda_d) = top_and_dth_eigenvalue(p, d)?;
    let ln_n = (n as f64).ln();

    let cs: Vec<f64> = specs
        .iter()
        .map(|sp| {
            let (nu, b) = sp.subgamma_params();
            nu + b * b
        })
        .collect();
    let taus: Vec<f64> = specs.iter().map(|sp| tau_from_variance(sp.variance())).collect();
    let s_w: f64 = w.iter().zip(&cs).map(|(&wi, &ci)| wi * wi * ci).sum();

    let nu_field = ParamField::PerNetwork {
        values: specs.iter().map(|sp| sp.subgamma_params().0).collect(),
        n,
    };
    let b_field = ParamField::PerNetwork {
        values: specs.iter().map(|sp| sp.subgamma_params().1).collect(),
        n,
    };
    let eta_sq = eta_squared(&w, &nu_field, &b_field)?;
    let spectral_bound = spectral_error_bound(eta_sq, n)?;
    let two_inf = two_inf_bound_terms(&w, specs, p, d)?;

    let mut conditions = BTreeMap::new();
    conditions.insert(
        "paragrowth".to_string(),
        ConditionValue::informational(s_w, lambda_d * lambda_d / ((n as f64) * ln_n * ln_n)),
    );
    if let Some(memberships) = memberships {
        let mut k = 0usize;
        let mut sizes: Vec<usize> = Vec::new();
        for &c in memberships {
            if c >= k {
                k = c + 1;
                sizes.resize(k, 0);
            }
            sizes[c] += 1;
        }
        let n_min = sizes.iter().copied().min().unwrap_or(0) as f64;
        let df2 = (d as f64) * (d as f64);
        conditions.insert(
            "nmin_growth".to_string(),
            ConditionValue::informational(n_min, df2 * s_w + df2 * s_w * s_w * ln_n.powi(4)),
        );
    }
    if cs.iter().all(|&c| c > 0.0) {
        let recip: f64 = cs.iter().map(|&c| 1.0 / c).sum();
        conditions.insert(
            "subgamma_growth".to_string(),
            ConditionValue::informational(recip, (n as f64) * ln_n * ln_n / (lambda_d * lambda_d)),
        );
    }
    let gamma = gamma_n_ell(n, specs.len(), d, ell, c_ell)?;
    let tightness_max = cs
        .iter()
        .zip(&taus)
        .map(|(&c, &t)| if c == 0.0 { 0.0 } else { c / t })
        .fold(0.0f64, f64::max);
    conditions.insert(
        "ratio_growth".to_string(),
        ConditionValue::informational(gamma * tightness_max, 1.0),
    );
    let harmonicish_lhs = if cs.iter().all(|&c| c > 0.0) {
        let num: f64 = cs.iter().map(|&c| 1.0 / c).sum();
        let den: f64 = taus.iter().map(|&t| 1.0 / t).sum();
        let cross: f64 = taus.iter().zip(&cs).map(|(&t, &c)| c / t).sum();
        (num / den) * cross
    } else {
        0.0
    };
    let n_nets = specs.len() as f64;
    conditions.insert(
        "harmonicish".to_string(),
        ConditionValue::informational(
            harmonicish_lhs,
            ln_n * ln_n / (n_nets.ln() + ln_n).powi(2),
        ),
    );

    let empirical_spectral_error = match observed {
        Some(nets) => {
            let mean = weighted_mean(nets, weights)?;
            let diff = mean.minus(p)?;
            Some(spectral_norm(diff.view())?.to_f64().unwrap())
        }
        None => None,
    };

    Ok(BoundReport {
        eta_sq,
        spectral_bound,
        empirical_spectral_error,
        two_inf_terms: two_inf,
        condition_values: conditions,
    })
}

fn top_and_dth_eigenvalue<F: Scalar>(p: &SymmetricMatrix<F>, d: usize) -> Result<(f64, f64)> {
    if d == 0 || d > p.n() {
        return Err(Error::DimOutOfRange { d, n: p.n() });
    }
    let vals = sym_eigenvalues(p)?;
    let lambda_1 = vals[0].to_f64().unwrap();
    let lambda_d = vals[d - 1].to_f64().unwrap();
    if lambda_d <= 0.0 {
        return Err(Error::KeptEigenvalueNegative { index: d - 1, value: lambda_d });
    }
    Ok((lambda_1, lambda_d))
}
