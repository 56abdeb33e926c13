//! Outlier-robust principal component analysis.
//!
//! The core algorithm learns a per-sample weight by scoring every sample from
//! three viewpoints — variance inside the current subspace, residual outside
//! it, and distance from the current center — and alternates that weight
//! learning with weighted mean/subspace estimation until both stabilize.
//! Outliers end up with small weights and stop distorting the fit.
//!
//! The crate also ships the classical baselines the method is compared
//! against (PCA, greedy L1 PCA, optimal-mean L2,1 reweighting, L2,p
//! reweighting), synthetic data generators with seeded contamination, and the
//! evaluation metrics used by the benchmark CLI.
//!
//! With the default `parallel` feature, embarrassingly parallel inner loops
//! (per-sample scores, projections, cross-validation folds) fan out over
//! rayon; results are bit-identical to the sequential build.

pub mod baselines;
pub mod error;
pub mod eval;
pub mod harness;
pub mod linalg;
mod par;
pub mod rng;
pub mod solver;
pub mod types;
pub mod weights;

pub use error::{Error, Result};
pub use solver::{converged, fit_rpca_dswl, FitResult};
pub use types::{
    DataMatrix, IterationRecord, SolverConfig, SolverTrace, SubspaceModel, TauSetting, WeightVector,
};
