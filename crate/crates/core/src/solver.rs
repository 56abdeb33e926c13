//! The iterative fixed-point loop that alternates discriminant weight
//! learning with weighted mean/subspace estimation.
//!
//! One iteration, in order: m ← X·w, S ← weighted scatter, P ← top-k
//! eigenvectors of S, then the three weight families from (P, m) merged into
//! the next w. The loop stops when both the projector distance between
//! consecutive subspaces and the L1 distance between consecutive weight
//! vectors fall under their tolerances, or at the iteration cap (reported,
//! not an error). The whole procedure is deterministic for fixed inputs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{projector_distance, top_k_eigh, weighted_mean, weighted_scatter};
use crate::types::{
    DataMatrix, IterationRecord, SolverConfig, SolverTrace, SubspaceModel, TauSetting, WeightVector,
};
use crate::weights::{auto_tau, entropy_softmax, merge_weights, score_dist, score_ocs, score_pcs};

/// Outcome of an iterative fit: the fitted subspace, the final merged
/// weights, the full per-iteration trace, and whether the convergence test
/// passed before the iteration cap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: SubspaceModel,
    pub weights: WeightVector,
    pub trace: SolverTrace,
    pub converged: bool,
    pub iterations: usize,
}

/// Resolves a temperature setting against the scores it will be applied to,
/// honoring the freeze-after-first-iteration option.
pub(crate) struct TauResolver {
    setting: TauSetting,
    freeze: bool,
    frozen: Option<f64>,
}

impl TauResolver {
    pub(crate) fn new(setting: TauSetting, freeze: bool) -> Self {
        Self {
            setting,
            freeze,
            frozen: None,
        }
    }

    pub(crate) fn resolve(&mut self, scores: &crate::weights::ScoreVector) -> f64 {
        match self.setting {
            TauSetting::Fixed(v) => v,
            TauSetting::Auto => {
                if let Some(v) = self.frozen {
                    return v;
                }
                let v = auto_tau(scores);
                if self.freeze {
                    self.frozen = Some(v);
                }
                v
            }
        }
    }
}

pub(crate) fn check_rank(x: &DataMatrix, k: usize) -> Result<()> {
    let max = x.d().min(x.n().saturating_sub(1));
    if k < 1 || k > max {
        return Err(Error::RankRequestTooLarge { k, max });
    }
    Ok(())
}

pub(crate) fn degenerate_scatter(s: &ndarray::Array2<f64>, x: &DataMatrix) -> bool {
    let s_frob: f64 = s.iter().map(|v| v * v).sum::<f64>().sqrt();
    let x_frob2: f64 = x.values().iter().map(|v| v * v).sum();
    s_frob <= 1e-24 * x_frob2.max(1.0)
}

/// Fits the discriminant-weight model (`rpca-dswl`).
pub fn fit_rpca_dswl(x: &DataMatrix, config: &SolverConfig) -> Result<FitResult> {
    config.validate()?;
    check_rank(x, config.k)?;

    let n = x.n();
    let mut w = WeightVector::uniform(n)?;
    let mut prev_projection: Option<ndarray::Array2<f64>> = None;
    let mut tau_a = TauResolver::new(config.tau_a, config.freeze_tau);
    let mut tau_b = TauResolver::new(config.tau_b, config.freeze_tau);
    let mut tau_c = TauResolver::new(config.tau_c, config.freeze_tau);

    let mut trace = SolverTrace::new();
    for t in 1..=config.max_iterations {
        let m = weighted_mean(x, &w)?;
        let s = weighted_scatter(x, &w)?;
        if degenerate_scatter(&s, x) {
            return Err(Error::DegenerateData);
        }
        let eig = top_k_eigh(&s, config.k)?;
        let model = SubspaceModel::new(eig.vectors().clone(), m.clone())?;

        let s_a = score_pcs(x, &model)?;
        let s_b = score_ocs(x, &model)?;
        let s_c = score_dist(x, &m)?;
        let a = entropy_softmax(&s_a, tau_a.resolve(&s_a))?;
        let b = entropy_softmax(&s_b, tau_b.resolve(&s_b))?;
        let c = entropy_softmax(&s_c, tau_c.resolve(&s_c))?;
        let w_next = merge_weights(&a, &b, &c)?;

        let subspace_change = prev_projection
            .as_ref()
            .map(|p| projector_distance(model.projection(), p))
            .transpose()?;
        let weight_change = w_next.l1_distance(&w);
        trace.push(IterationRecord {
            iteration: t,
            mean: m.to_vec(),
            eigenvalues: eig.values().to_vec(),
            subspace_change,
            weight_change,
            weighted_variance: eig.values().iter().sum(),
            objective: None,
            weights: w_next.entries().to_vec(),
        })?;

        let done = matches!(subspace_change, Some(ds) if ds <= config.subspace_tolerance)
            && weight_change <= config.weight_tolerance;
        prev_projection = Some(model.projection().clone());
        w = w_next;
        if done || t == config.max_iterations {
            return Ok(FitResult {
                model,
                weights: w,
                trace,
                converged: done,
                iterations: t,
            });
        }
    }
    unreachable!("loop always returns at the iteration cap");
}

/// The convergence test used by all iterative fits: consecutive subspaces
/// compared through their projectors (basis- and sign-independent) and
/// consecutive weights through the L1 distance.
pub fn converged(
    prev_model: &SubspaceModel,
    prev_weights: &WeightVector,
    curr_model: &SubspaceModel,
    curr_weights: &WeightVector,
    config: &SolverConfig,
) -> Result<bool> {
    if prev_weights.len() != curr_weights.len() {
        return Err(Error::LengthMismatch {
            left: prev_weights.len(),
            right: curr_weights.len(),
        });
    }
    let ds = projector_distance(curr_model.projection(), prev_model.projection())?;
    let dw = curr_weights.l1_distance(prev_weights);
    Ok(ds <= config.subspace_tolerance && dw <= config.weight_tolerance)
}
