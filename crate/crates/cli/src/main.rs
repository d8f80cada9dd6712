//! `specnet`: estimation of shared low-rank structure from collections of
//! weighted networks.
//!
//! Exit codes: 0 success, 2 invalid config/arguments/input files, 3 numeric
//! failure during computation, 1 anything else (I/O).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use specnet_core::celltest::{cell_test_report, FdrMethod};
use specnet_core::cluster::kmeans;
use specnet_core::eigen::rank_d_truncate;
use specnet_core::embed::ase;
use specnet_core::error::Error;
use specnet_core::estimate::{
    estimate_rho_all, oracle_weights, relative_improvement, weighted_mean, weights_from_rho,
    MatrixNorm, RhoVariant, WeightProvenance,
};
use specnet_core::experiment::{run, simulate_collection, ExperimentConfig, ExperimentKind};
use specnet_core::io;
use specnet_core::model::make_balanced_memberships;
use specnet_core::rng::RngStream;
use specnet_core::{Collection64, Rho64, Weights64};

#[derive(Parser)]
#[command(
    name = "specnet",
    about = "Shared low-rank structure from multiple weighted networks",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WeightChoice {
    Estimated,
    Uniform,
    Oracle,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantChoice {
    Gaussian,
    Subgamma,
}

impl From<VariantChoice> for RhoVariant {
    fn from(v: VariantChoice) -> Self {
        match v {
            VariantChoice::Gaussian => RhoVariant::Gaussian,
            VariantChoice::Subgamma => RhoVariant::Subgamma,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodChoice {
    Bh,
    By,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the network collection a config replication would consume.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Replication index selecting the random stream.
        #[arg(long, default_value_t = 0)]
        replication: usize,
        /// Output NETSET path.
        #[arg(long)]
        out: PathBuf,
        /// Where to write the expectation matrix (SYMMAT).
        #[arg(long)]
        truth: Option<PathBuf>,
        /// Sidecar JSON for per-network noise metadata
        /// (defaults to `<out>.json`).
        #[arg(long)]
        sidecar: Option<PathBuf>,
    },
    /// Estimate per-network residual scales and plug-in weights.
    Estimate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        d: usize,
        #[arg(long, value_enum, default_value = "subgamma")]
        variant: VariantChoice,
        /// Output JSON {rho, weights, variant}.
        #[arg(long)]
        out: PathBuf,
    },
    /// Spectral embedding of a weighted network average.
    Embed {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        d: usize,
        #[arg(long, value_enum, default_value = "estimated")]
        weights: WeightChoice,
        /// Noise-spec sidecar (needed for oracle weights).
        #[arg(long)]
        sidecar: Option<PathBuf>,
        /// Output CSV `vertex,x1..xd`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Community recovery: plug-in embedding, then K-means on its rows.
    Cluster {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        d: usize,
        #[arg(long = "K")]
        k: usize,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "estimated")]
        weights: WeightChoice,
        /// Output CSV `vertex,label`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Relative improvement of weighted over unweighted truncation.
    Compare {
        #[arg(long)]
        input: PathBuf,
        /// Known expectation matrix (SYMMAT).
        #[arg(long)]
        truth: PathBuf,
        #[arg(long)]
        d: usize,
        /// Comma-separated subset of frobenius,spectral,two_inf.
        #[arg(long, default_value = "frobenius")]
        norms: String,
        /// Output JSON report.
        #[arg(long)]
        out: PathBuf,
    },
    /// Cell-level two-sample tests between two group averages.
    Celltest {
        #[arg(long = "group-a")]
        group_a: PathBuf,
        #[arg(long = "group-b")]
        group_b: PathBuf,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        parcellation: PathBuf,
        #[arg(long, default_value_t = 0.01)]
        alpha: f64,
        #[arg(long, value_enum, default_value = "bh")]
        method: MethodChoice,
        #[arg(long, value_enum, default_value = "estimated")]
        weights: WeightChoice,
        /// Output CSV of per-cell results.
        #[arg(long)]
        out: PathBuf,
    },
    /// Concentration-bound and growth-condition report for a config.
    Diagnose {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 0)]
        replication: usize,
        #[arg(long, value_enum, default_value = "oracle")]
        weights: WeightChoice,
        #[arg(long, default_value_t = 2)]
        ell: u32,
        #[arg(long = "c-ell", default_value_t = 1.0)]
        c_ell: f64,
        /// Output JSON report.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a configured experiment and write its result table.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// Override the config's output_path.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Additionally write the tidy long-format table here for plotting.
        #[arg(long = "emit-plot-data")]
        emit_plot_data: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_)
        | Error::Parse { .. }
        | Error::InvalidParameter(_)
        | Error::ShapeMismatch(_)
        | Error::DimOutOfRange { .. }
        | Error::NotSquare(..)
        | Error::Asymmetric { .. }
        | Error::NonFinite(..) => 2,
        Error::NoConvergence(_)
        | Error::KeptEigenvalueNegative { .. }
        | Error::ZeroRho(_)
        | Error::DegenerateSample(_)
        | Error::DivisionByZero(_) => 3,
        Error::Io(_) => 1,
    }
}

/// Zero estimated rho means a noise-free network under the model: warn and
/// put all weight on it instead of failing.
fn weights_or_noiseless(rho: &Rho64) -> specnet_core::Result<Weights64> {
    match weights_from_rho(rho) {
        Ok(w) => Ok(w),
        Err(Error::ZeroRho(s)) => {
            eprintln!(
                "warning: network {} has zero estimated rho (noise-free under the model); assigning it weight 1",
                s + 1
            );
            let mut w = vec![0.0; rho.rho.len()];
            w[s] = 1.0;
            Weights64::new(w, WeightProvenance::EstimatedSubgamma)
        }
        Err(e) => Err(e),
    }
}

fn choose_weights(
    nets: &Collection64,
    d: usize,
    choice: WeightChoice,
    sidecar: Option<&Path>,
) -> specnet_core::Result<Weights64> {
    match choice {
        WeightChoice::Uniform => Ok(Weights64::uniform(nets.len())),
        WeightChoice::Estimated => {
            let rho = estimate_rho_all(nets, d, RhoVariant::Subgamma)?;
            weights_or_noiseless(&rho)
        }
        WeightChoice::Oracle => {
            let path = sidecar.ok_or_else(|| {
                Error::Config("oracle weights need --sidecar with noise specs".into())
            })?;
            let specs = io::read_noise_specs(path)?;
            if specs.len() != nets.len() {
                return Err(Error::ShapeMismatch(format!(
                    "{} sidecar specs vs {} networks",
                    specs.len(),
                    nets.len()
                )));
            }
            oracle_weights(&specs)
        }
    }
}

fn parse_norms(s: &str) -> specnet_core::Result<Vec<MatrixNorm>> {
    let norms: specnet_core::Result<Vec<MatrixNorm>> =
        s.split(',').map(|t| MatrixNorm::parse(t.trim())).collect();
    let norms = norms?;
    if norms.is_empty() {
        return Err(Error::InvalidParameter("empty norm list".into()));
    }
    Ok(norms)
}

fn dispatch(cmd: Command) -> specnet_core::Result<()> {
    match cmd {
        Command::Simulate { config, replication, out, truth, sidecar } => {
            let cfg = ExperimentConfig::from_path(&config)?;
            let (p, nets) = simulate_collection(&cfg, replication)?;
            io::write_netset_file(&out, &nets)?;
            let sidecar = sidecar.unwrap_or_else(|| {
                let mut s = out.as_os_str().to_owned();
                s.push(".json");
                PathBuf::from(s)
            });
            io::write_noise_specs(&sidecar, nets.specs().expect("generated collection"))?;
            if let Some(truth_path) = truth {
                io::write_symmat_file(&truth_path, &p)?;
            }
            Ok(())
        }
        Command::Estimate { input, d, variant, out } => {
            let nets = io::read_netset_file::<f64>(&input)?;
            let rho = estimate_rho_all(&nets, d, variant.into())?;
            let weights = weights_or_noiseless(&rho)?;
            let report = io::EstimateReport {
                rho: rho.rho.clone(),
                weights: weights.weights().to_vec(),
                variant: match rho.variant {
                    RhoVariant::Gaussian => "gaussian".into(),
                    RhoVariant::Subgamma => "subgamma".into(),
                },
            };
            let json = serde_json::to_string_pretty(&report)
                .map_err(|e| Error::Config(e.to_string()))?;
            std::fs::write(&out, json)?;
            Ok(())
        }
        Command::Embed { input, d, weights, sidecar, out } => {
            let nets = io::read_netset_file::<f64>(&input)?;
            let w = choose_weights(&nets, d, weights, sidecar.as_deref())?;
            let mean = weighted_mean(&nets, &w)?;
            let emb = ase(&mean, d)?;
            let mut buf = Vec::new();
            io::write_coords_csv(&mut buf, &emb.coords)?;
            std::fs::write(&out, buf)?;
            Ok(())
        }
        Command::Cluster { input, d, k, restarts, seed, weights, out } => {
            let nets = io::read_netset_file::<f64>(&input)?;
            let w = choose_weights(&nets, d, weights, None)?;
            let mean = weighted_mean(&nets, &w)?;
            let emb = ase(&mean, d)?;
            let clustering =
                kmeans(emb.coords.view(), k, restarts, 100, RngStream::new(seed, 0))?;
            let mut buf = Vec::new();
            io::write_labels_csv(&mut buf, &clustering.labels)?;
            std::fs::write(&out, buf)?;
            Ok(())
        }
        Command::Compare { input, truth, d, norms, out } => {
            let nets = io::read_netset_file::<f64>(&input)?;
            let p = io::read_symmat_file::<f64>(&truth)?;
            let norms = parse_norms(&norms)?;
            let p_bar =
                rank_d_truncate(&weighted_mean(&nets, &Weights64::uniform(nets.len()))?, d)?;
            let rho = estimate_rho_all(&nets, d, RhoVariant::Subgamma)?;
            let w = weights_or_noiseless(&rho)?;
            let p_tilde = rank_d_truncate(&weighted_mean(&nets, &w)?, d)?;
            let mut values = serde_json::Map::new();
            for norm in norms {
                let v = relative_improvement(&p, &p_bar, &p_tilde, norm)?;
                values.insert(norm.name().to_string(), serde_json::json!(v));
            }
            let json = serde_json::to_string_pretty(&serde_json::Value::Object(values))
                .map_err(|e| Error::Config(e.to_string()))?;
            std::fs::write(&out, json)?;
            Ok(())
        }
        Command::Celltest { group_a, group_b, d, parcellation, alpha, method, weights, out } => {
            let parc = io::read_parcellation_file(&parcellation)?;
            let average = |path: &Path| -> specnet_core::Result<specnet_core::Sym64> {
                let nets = io::read_netset_file::<f64>(path)?;
                let w = choose_weights(&nets, d, weights, None)?;
                rank_d_truncate(&weighted_mean(&nets, &w)?, d)
            };
            let p_a = average(&group_a)?;
            let p_b = average(&group_b)?;
            let method = match method {
                MethodChoice::Bh => FdrMethod::Bh,
                MethodChoice::By => FdrMethod::By,
            };
            let report = cell_test_report(&p_a, &p_b, &parc, alpha, method)?;
            let mut buf = Vec::new();
            io::write_cells_csv(&mut buf, &report)?;
            std::fs::write(&out, buf)?;
            Ok(())
        }
        Command::Diagnose { config, replication, weights, ell, c_ell, out } => {
            let cfg = ExperimentConfig::from_path(&config)?;
            let specs = cfg.noise_specs()?;
            let (p, nets) = simulate_collection(&cfg, replication)?;
            let w = match weights {
                WeightChoice::Uniform => Weights64::uniform(specs.len()),
                WeightChoice::Oracle => oracle_weights(&specs)?,
                WeightChoice::Estimated => {
                    let rho = estimate_rho_all(&nets, cfg.d, RhoVariant::Subgamma)?;
                    weights_or_noiseless(&rho)?
                }
            };
            let memberships = match cfg.experiment {
                ExperimentKind::Recovery => Some(make_balanced_memberships(
                    cfg.n,
                    cfg.communities.expect("validated recovery config"),
                )?),
                _ => None,
            };
            let report = specnet_core::diagnostics::growth_report(
                &p,
                cfg.d,
                &specs,
                &w,
                memberships.as_deref(),
                ell,
                c_ell,
                Some(&nets),
            )?;
            let json = serde_json::to_string_pretty(&report)
                .map_err(|e| Error::Config(e.to_string()))?;
            std::fs::write(&out, json)?;
            Ok(())
        }
        Command::Experiment { config, out, emit_plot_data } => {
            let cfg = ExperimentConfig::from_path(&config)?;
            let table = run(&cfg)?;
            let csv = table.to_csv();
            let target = match (&out, &cfg.output_path) {
                (Some(path), _) => path.clone(),
                (None, Some(path)) => PathBuf::from(path),
                (None, None) => {
                    return Err(Error::Config(
                        "no output path: set output_path in the config or pass --out".into(),
                    ))
                }
            };
            std::fs::write(&target, &csv)?;
            if let Some(plot_path) = emit_plot_data {
                std::fs::write(&plot_path, &csv)?;
            }
            Ok(())
        }
    }
}
