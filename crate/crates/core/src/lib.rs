//! Estimation of shared low-rank structure from collections of vertex-aligned
//! weighted networks with heterogeneous edge noise.
//!
//! The crate provides:
//!
//! - dense symmetric linear algebra: top-d eigendecomposition, rank-d
//!   truncation, adjacency spectral embedding, matrix norms, Procrustes
//!   alignment ([`eigen`], [`norms`], [`embed`]);
//! - edge-noise models with their sub-gamma `(nu, b)` parameters and
//!   reproducible counter-based generators for synthetic collections
//!   ([`noise`], [`model`], [`rng`]);
//! - noise-scale estimation from truncation residuals, inverse-variance
//!   weights, weighted network means and the plug-in spectral embedding
//!   ([`estimate`]);
//! - K-means with restarts, exact linear assignment, the label-discrepancy
//!   metric and the end-to-end community-recovery pipeline ([`cluster`],
//!   [`hungarian`]);
//! - computable concentration-bound quantities and growth-condition
//!   diagnostics ([`diagnostics`]);
//! - cell-level two-sample testing under a vertex parcellation with BH/BY
//!   false-discovery control ([`ttest`], [`celltest`]);
//! - text/JSON file formats and a config-driven simulation harness
//!   ([`io`], [`experiment`]).
//!
//! All numeric routines are generic over the floating-point scalar via
//! [`Scalar`]; the `*64` aliases below fix `f64`, which is what the CLI and
//! the experiment harness use.

#![allow(clippy::needless_range_loop)]

pub mod celltest;
pub mod cluster;
pub mod diagnostics;
pub mod eigen;
pub mod embed;
pub mod error;
pub mod estimate;
pub mod experiment;
pub mod hungarian;
pub mod io;
pub mod model;
pub mod noise;
pub mod norms;
pub mod rng;
pub mod scalar;
pub mod special;
pub mod sym;
pub mod ttest;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Double-precision aliases; the CLI and experiment harness work in these.
pub type Sym64 = sym::SymmetricMatrix<f64>;
pub type EigenPairs64 = eigen::EigenPairs<f64>;
pub type Embedding64 = embed::Embedding<f64>;
pub type Weights64 = estimate::WeightVector<f64>;
pub type Rho64 = estimate::RhoEstimates<f64>;
pub type Collection64 = model::NetworkCollection<f64>;
pub type Latent64 = model::LatentModel<f64>;
pub type Community64 = model::CommunityModel<f64>;
pub type Clustering64 = cluster::Clustering<f64>;
