//! Config-driven synthetic experiments with deterministic, replayable
//! output tables.
//!
//! Each replication r draws from stream r of the config seed, so the
//! result table is a pure function of the config, identical under serial
//! and parallel execution. `SPECNET_THREADS` caps the worker count.

use ndarray::{array, Array2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::celltest::{cell_test_report, FdrMethod, Parcellation};
use crate::cluster::{discrepancy, recover_communities, KmeansOptions};
use crate::eigen::rank_d_truncate;
use crate::embed::{ase, procrustes_align, Embedding};
use crate::error::{Error, Result};
use crate::estimate::{
    estimate_rho_all, oracle_weights, relative_improvement, weighted_mean, weights_from_rho,
    MatrixNorm, RhoVariant, WeightVector,
};
use crate::model::{
    generate_collection, generate_latent_gaussian, make_balanced_memberships, CommunityModel,
    LatentModel, NetworkCollection,
};
use crate::noise::NoiseSpec;
use crate::norms::two_to_infty_norm;
use crate::rng::RngStream;
use crate::sym::SymmetricMatrix;

/// Default latent-position distribution for the synthetic experiments:
/// rows drawn i.i.d. normal with this mean and covariance.
pub const LATENT_MEAN: [f64; 3] = [1.0, 1.0, 1.0];

pub fn latent_cov() -> Array2<f64> {
    array![[3.0, 2.0, 1.0], [2.0, 3.0, 2.0], [1.0, 2.0, 3.0]]
}

/// Significance level used by the null-calibration cell-test experiment.
pub const CELLTEST_NULL_ALPHA: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Improvement,
    Recovery,
    WeightConsistency,
    CelltestNull,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Improvement => "improvement",
            ExperimentKind::Recovery => "recovery",
            ExperimentKind::WeightConsistency => "weight-consistency",
            ExperimentKind::CelltestNull => "celltest-null",
        }
    }
}

fn default_replications() -> usize {
    50
}

fn default_norms() -> Vec<MatrixNorm> {
    vec![MatrixNorm::Frobenius]
}

/// One experiment cell. Unknown JSON keys are rejected so parameter-sweep
/// typos fail loudly.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub n: usize,
    #[serde(rename = "N")]
    pub networks: usize,
    pub d: usize,
    #[serde(rename = "K", default)]
    pub communities: Option<usize>,
    #[serde(default)]
    pub noise: Vec<NoiseSpec>,
    #[serde(default)]
    pub outlier_variance: Option<f64>,
    #[serde(default = "default_replications")]
    pub replications: usize,
    pub seed: u64,
    #[serde(default = "default_norms")]
    pub norms: Vec<MatrixNorm>,
    #[serde(default)]
    pub output_path: Option<String>,
}

impl ExperimentConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.replications == 0 {
            return bad("replications must be >= 1".into());
        }
        if self.n < 2 || self.networks == 0 || self.d == 0 || self.d > self.n {
            return bad(format!(
                "sizes out of range: n={}, N={}, d={}",
                self.n, self.networks, self.d
            ));
        }
        if self.norms.is_empty() {
            return bad("at least one norm must be requested".into());
        }
        if !self.noise.is_empty() {
            if self.noise.len() != self.networks {
                return bad(format!(
                    "{} noise specs vs N={}",
                    self.noise.len(),
                    self.networks
                ));
            }
            for s in &self.noise {
                s.validate()?;
            }
        }
        match self.experiment {
            ExperimentKind::Improvement => {
                if self.d != 3 {
                    return bad("improvement uses the 3-dimensional latent model; set d=3".into());
                }
                if self.noise.is_empty() {
                    match self.outlier_variance {
                        Some(v) if v.is_finite() && v > 0.0 => {}
                        _ => {
                            return bad(
                                "improvement needs outlier_variance > 0 (or an explicit noise list)"
                                    .into(),
                            )
                        }
                    }
                }
            }
            ExperimentKind::Recovery => {
                let k = self
                    .communities
                    .ok_or_else(|| Error::Config("recovery needs K".into()))?;
                if k < 2 || k > self.n {
                    return bad(format!("K={k} out of range for n={}", self.n));
                }
                if self.d != k {
                    return bad("recovery uses K community latent positions; set d=K".into());
                }
                if self.noise.is_empty() {
                    return bad("recovery needs an explicit noise list".into());
                }
            }
            ExperimentKind::WeightConsistency => {
                if self.d != 3 {
                    return bad(
                        "weight-consistency uses the 3-dimensional latent model; set d=3".into(),
                    );
                }
                if self.noise.is_empty() {
                    return bad("weight-consistency needs an explicit noise list".into());
                }
            }
            ExperimentKind::CelltestNull => {
                if self.d != 3 {
                    return bad(
                        "celltest-null uses the 3-dimensional latent model; set d=3".into(),
                    );
                }
                let k = self
                    .communities
                    .ok_or_else(|| Error::Config("celltest-null needs K (region count)".into()))?;
                if k < 2 || k > self.n {
                    return bad(format!("K={k} out of range for n={}", self.n));
                }
                if self.noise.is_empty() {
                    return bad("celltest-null needs an explicit noise list".into());
                }
            }
        }
        Ok(())
    }

    /// The effective per-network noise list: the explicit list when given,
    /// otherwise (improvement only) one Laplace outlier plus N-1 unit
    /// Laplace networks.
    pub fn noise_specs(&self) -> Result<Vec<NoiseSpec>> {
        if !self.noise.is_empty() {
            return Ok(self.noise.clone());
        }
        match (self.experiment, self.outlier_variance) {
            (ExperimentKind::Improvement, Some(v)) => {
                let mut specs = vec![NoiseSpec::Laplace { variance: v }];
                specs.extend(vec![NoiseSpec::Laplace { variance: 1.0 }; self.networks - 1]);
                Ok(specs)
            }
            _ => Err(Error::Config("no noise specification available".into())),
        }
    }

    fn params_string(&self) -> String {
        let mut parts = vec![
            format!("n={}", self.n),
            format!("N={}", self.networks),
            format!("d={}", self.d),
        ];
        if let Some(k) = self.communities {
            parts.push(format!("K={k}"));
        }
        if let Some(v) = self.outlier_variance {
            parts.push(format!("sigma1_sq={v}"));
        }
        parts.join(";")
    }
}

/// One (replication, metric) observation.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub experiment: String,
    pub replication: usize,
    pub params: String,
    pub metric: String,
    pub value: f64,
}

/// Tidy long-format result table.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
}

impl ResultTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("experiment,replication,params,metric,value\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.experiment, r.replication, r.params, r.metric, r.value
            ));
        }
        out
    }
}

/// Worker-count cap: `SPECNET_THREADS` when set, available parallelism
/// otherwise.
pub fn effective_threads() -> usize {
    std::env::var("SPECNET_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&t| t >= 1)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|v| v.get()).unwrap_or(1))
}

/// Run an experiment with the default worker count.
pub fn run(config: &ExperimentConfig) -> Result<ResultTable> {
    run_with_threads(config, effective_threads())
}

/// Run with an explicit worker count; the output is identical for every
/// count because replication r is a pure function of (config, r).
pub fn run_with_threads(config: &ExperimentConfig, threads: usize) -> Result<ResultTable> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let rows: Result<Vec<Vec<ResultRow>>> = pool.install(|| {
        (0..config.replications)
            .into_par_iter()
            .map(|rep| replicate(config, rep))
            .collect()
    });
    Ok(ResultTable { rows: rows?.into_iter().flatten().collect() })
}

fn replicate(config: &ExperimentConfig, rep: usize) -> Result<Vec<ResultRow>> {
    match config.experiment {
        ExperimentKind::Improvement => improvement_replication(config, rep),
        ExperimentKind::Recovery => recovery_replication(config, rep),
        ExperimentKind::WeightConsistency => weight_consistency_replication(config, rep),
        ExperimentKind::CelltestNull => celltest_null_replication(config, rep),
    }
}

fn row(config: &ExperimentConfig, rep: usize, metric: &str, value: f64) -> ResultRow {
    ResultRow {
        experiment: config.experiment.name().to_string(),
        replication: rep,
        params: config.params_string(),
        metric: metric.to_string(),
        value,
    }
}

fn default_latent(n: usize, stream: RngStream) -> Result<LatentModel<f64>> {
    generate_latent_gaussian(n, &LATENT_MEAN, &latent_cov(), stream)
}

/// Community latent positions: `K` rows in `R^K` with an on-diagonal
/// strength of 0.8 and off-diagonal 0.1.
pub fn community_latent(k: usize) -> Array2<f64> {
    Array2::from_shape_fn((k, k), |(i, j)| if i == j { 0.8 } else { 0.1 })
}

/// The truth/collection pair replication `rep` of this config works with;
/// lets the CLI materialize exactly what an experiment consumes.
pub fn simulate_collection(
    config: &ExperimentConfig,
    rep: usize,
) -> Result<(SymmetricMatrix<f64>, NetworkCollection<f64>)> {
    config.validate()?;
    let specs = config.noise_specs()?;
    let root = RngStream::new(config.seed, rep as u64);
    let p = match config.experiment {
        ExperimentKind::Recovery => {
            let k = config.communities.expect("validated");
            let memberships = make_balanced_memberships(config.n, k)?;
            CommunityModel::from_latent(memberships, community_latent(k))?.expectation()
        }
        _ => default_latent(config.n, root.child(0))?.expectation().clone(),
    };
    let nets = generate_collection(&p, &specs, root.child(1))?;
    Ok((p, nets))
}

fn improvement_replication(config: &ExperimentConfig, rep: usize) -> Result<Vec<ResultRow>> {
    let specs = config.noise_specs()?;
    let root = RngStream::new(config.seed, rep as u64);
    let latent = default_latent(config.n, root.child(0))?;
    let p = latent.expectation();
    let nets = generate_collection(p, &specs, root.child(1))?;

    let p_bar = rank_d_truncate(
        &weighted_mean(&nets, &WeightVector::uniform(config.networks))?,
        config.d,
    )?;
    let rho = estimate_rho_all(&nets, config.d, RhoVariant::Subgamma)?;
    let w = weights_from_rho(&rho)?;
    let p_tilde = rank_d_truncate(&weighted_mean(&nets, &w)?, config.d)?;

    let mut rows = Vec::with_capacity(config.norms.len());
    for norm in &config.norms {
        let value = relative_improvement(p, &p_bar, &p_tilde, *norm)?;
        rows.push(row(config, rep, &format!("improvement_{}", norm.name()), value));
    }
    Ok(rows)
}

fn recovery_replication(config: &ExperimentConfig, rep: usize) -> Result<Vec<ResultRow>> {
    let specs = config.noise_specs()?;
    let k = config.communities.expect("validated");
    let root = RngStream::new(config.seed, rep as u64);
    let memberships = make_balanced_memberships(config.n, k)?;
    let model = CommunityModel::from_latent(memberships.clone(), community_latent(k))?;
    let nets = generate_collection(&model.expectation(), &specs, root.child(1))?;
    let (clustering, _, _) = recover_communities(
        &nets,
        config.d,
        k,
        RhoVariant::Subgamma,
        KmeansOptions::default(),
        root.child(2),
    )?;
    let value = discrepancy(&memberships, &clustering.labels)?;
    Ok(vec![row(config, rep, "discrepancy", value)])
}

fn align_error(embedding: &Embedding<f64>, x: &Array2<f64>) -> Result<f64> {
    let alignment = procrustes_align(&embedding.coords, x)?;
    let diff = &embedding.coords - &x.dot(&alignment.rotation);
    Ok(two_to_infty_norm(diff.view()))
}

fn weight_consistency_replication(config: &ExperimentConfig, rep: usize) -> Result<Vec<ResultRow>> {
    let specs = config.noise_specs()?;
    let root = RngStream::new(config.seed, rep as u64);
    let latent = default_latent(config.n, root.child(0))?;
    let nets = generate_collection(latent.expectation(), &specs, root.child(1))?;

    let rho = estimate_rho_all(&nets, config.d, RhoVariant::Subgamma)?;
    let w_hat = weights_from_rho(&rho)?;
    let w_star = oracle_weights::<f64>(&specs)?;
    let max_err = w_hat
        .weights()
        .iter()
        .zip(w_star.weights())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);

    let plug = ase(&weighted_mean(&nets, &w_hat)?, config.d)?;
    let ring = ase(&weighted_mean(&nets, &w_star)?, config.d)?;
    let err_plug = align_error(&plug, latent.x())?;
    let err_ring = align_error(&ring, latent.x())?;
    if err_ring == 0.0 {
        return Err(Error::DivisionByZero("oracle embedding error is zero".into()));
    }

    Ok(vec![
        row(config, rep, "max_weight_error", max_err),
        row(config, rep, "two_inf_ratio", err_plug / err_ring),
    ])
}

fn celltest_null_replication(config: &ExperimentConfig, rep: usize) -> Result<Vec<ResultRow>> {
    let specs = config.noise_specs()?;
    let k = config.communities.expect("validated");
    let root = RngStream::new(config.seed, rep as u64);
    let latent = default_latent(config.n, root.child(0))?;
    let p = latent.expectation();
    let parc = Parcellation::new(make_balanced_memberships(config.n, k)?, k, None)?;

    let group_average = |nets: &NetworkCollection<f64>| -> Result<SymmetricMatrix<f64>> {
        let rho = estimate_rho_all(nets, config.d, RhoVariant::Subgamma)?;
        let w = weights_from_rho(&rho)?;
        rank_d_truncate(&weighted_mean(nets, &w)?, config.d)
    };
    let nets_a = generate_collection(p, &specs, root.child(1))?;
    let nets_b = generate_collection(p, &specs, root.child(2))?;
    let p_a = group_average(&nets_a)?;
    let p_b = group_average(&nets_b)?;

    let bh = cell_test_report(&p_a, &p_b, &parc, CELLTEST_NULL_ALPHA, FdrMethod::Bh)?;
    let by = cell_test_report(&p_a, &p_b, &parc, CELLTEST_NULL_ALPHA, FdrMethod::By)?;
    let by_subset = by
        .cells
        .iter()
        .zip(bh.cells.iter())
        .all(|(y, h)| !y.rejected | h.rejected);

    Ok(vec![
        row(config, rep, "bh_rejected_cells", bh.rejected_count() as f64),
        row(config, rep, "by_rejected_cells", by.rejected_count() as f64),
        row(config, rep, "tested_cells", bh.tested_count() as f64),
        row(config, rep, "by_subset_of_bh", by_subset as u8 as f64),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_improvement_config() -> ExperimentConfig {
        ExperimentConfig {
            experiment: ExperimentKind::Improvement,
            n: 30,
            networks: 3,
            d: 3,
            communities: None,
            noise: Vec::new(),
            outlier_variance: Some(4.0),
            replications: 3,
            seed: 11,
            norms: vec![MatrixNorm::Frobenius, MatrixNorm::Spectral],
            output_path: None,
        }
    }

    #[test]
    fn config_json_round_trip_and_unknown_keys() {
        let json = r#"{
            "experiment": "improvement",
            "n": 40, "N": 5, "d": 3,
            "outlier_variance": 5.0,
            "replications": 2,
            "seed": 7,
            "norms": ["frobenius"]
        }"#;
        let cfg = ExperimentConfig::from_json_str(json).unwrap();
        assert_eq!(cfg.networks, 5);
        assert_eq!(cfg.replications, 2);

        let bad = r#"{
            "experiment": "improvement",
            "n": 40, "N": 5, "d": 3,
            "outlier_variance": 5.0,
            "seed": 7,
            "replicatons": 2
        }"#;
        assert!(matches!(ExperimentConfig::from_json_str(bad), Err(Error::Config(_))));
    }

    #[test]
    fn config_defaults() {
        let json = r#"{"experiment":"improvement","n":40,"N":5,"d":3,
                       "outlier_variance":2.0,"seed":3}"#;
        let cfg = ExperimentConfig::from_json_str(json).unwrap();
        assert_eq!(cfg.replications, 50);
        assert_eq!(cfg.norms, vec![MatrixNorm::Frobenius]);
    }

    #[test]
    fn validation_catches_size_errors() {
        let mut cfg = small_improvement_config();
        cfg.replications = 0;
        assert!(cfg.validate().is_err());

        let mut cfg = small_improvement_config();
        cfg.d = 4;
        assert!(cfg.validate().is_err(), "improvement pins d=3");

        let mut cfg = small_improvement_config();
        cfg.outlier_variance = None;
        assert!(cfg.validate().is_err());

        let cfg = ExperimentConfig {
            experiment: ExperimentKind::Recovery,
            communities: Some(2),
            d: 2,
            noise: vec![NoiseSpec::Gaussian { variance: 0.25 }; 2],
            networks: 2,
            n: 20,
            outlier_variance: None,
            replications: 1,
            seed: 0,
            norms: default_norms(),
            output_path: None,
        };
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn improvement_noise_list_shape() {
        let cfg = small_improvement_config();
        let specs = cfg.noise_specs().unwrap();
        assert_eq!(specs.len(), 3);
        assert_eq!(specs[0], NoiseSpec::Laplace { variance: 4.0 });
        assert_eq!(specs[1], NoiseSpec::Laplace { variance: 1.0 });
    }

    #[test]
    fn rerun_is_byte_identical_and_thread_invariant() {
        let cfg = small_improvement_config();
        let a = run_with_threads(&cfg, 1).unwrap();
        let b = run_with_threads(&cfg, 1).unwrap();
        let c = run_with_threads(&cfg, 4).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        assert_eq!(a.to_csv(), c.to_csv());
    }

    #[test]
    fn row_count_is_replications_times_metrics() {
        let cfg = small_improvement_config();
        let table = run_with_threads(&cfg, 2).unwrap();
        assert_eq!(table.rows.len(), cfg.replications * cfg.norms.len());
        for (i, r) in table.rows.iter().enumerate() {
            assert_eq!(r.replication, i / cfg.norms.len(), "rows ordered by replication");
        }
    }

    #[test]
    fn zero_noise_recovery_is_exact() {
        let cfg = ExperimentConfig {
            experiment: ExperimentKind::Recovery,
            n: 24,
            networks: 2,
            d: 2,
            communities: Some(2),
            noise: vec![NoiseSpec::Gaussian { variance: 0.0 }; 2],
            outlier_variance: None,
            replications: 3,
            seed: 5,
            norms: default_norms(),
            output_path: None,
        };
        let table = run(&cfg).unwrap();
        for r in &table.rows {
            assert_eq!(r.metric, "discrepancy");
            assert_eq!(r.value, 0.0);
        }
    }

    #[test]
    fn single_network_weight_consistency_is_exact() {
        let cfg = ExperimentConfig {
            experiment: ExperimentKind::WeightConsistency,
            n: 25,
            networks: 1,
            d: 3,
            communities: None,
            noise: vec![NoiseSpec::Gaussian { variance: 1.0 }],
            outlier_variance: None,
            replications: 2,
            seed: 9,
            norms: default_norms(),
            output_path: None,
        };
        let table = run(&cfg).unwrap();
        for r in &table.rows {
            match r.metric.as_str() {
                "max_weight_error" => assert_eq!(r.value, 0.0),
                "two_inf_ratio" => assert_eq!(r.value, 1.0),
                other => panic!("unexpected metric {other}"),
            }
        }
    }
}
