//! Comparison algorithms: standard PCA, the greedy L1-norm variant, and the
//! two implicit-reweighting baselines (optimal-mean L2,1 and L2,p). The
//! reweighting baselines reuse the same weighted-scatter/eigendecomposition
//! machinery as the main solver; their implicit weights are renormalized to
//! the simplex each iteration, which rescales the scatter uniformly and so
//! leaves the argmax subspace unchanged.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::linalg::{
    orthonormalize_columns, projector_distance, top_k_eigh, weighted_mean, weighted_scatter,
};
use crate::rng::SeedRng;
use crate::solver::{degenerate_scatter, FitResult};
use crate::types::{DataMatrix, IterationRecord, SolverConfig, SolverTrace, SubspaceModel, WeightVector};
use crate::weights::score_ocs;

/// Residuals below this are floored before inversion in the implicit-weight
/// updates.
const RESIDUAL_FLOOR: f64 = 1e-12;

/// Classical PCA: unweighted mean, top-k eigenvectors of the centered
/// scatter (uniform weights through the shared scatter kernel).
pub fn fit_pca(x: &DataMatrix, k: usize) -> Result<SubspaceModel> {
    if k < 1 || k > x.d() {
        return Err(Error::RankRequestTooLarge { k, max: x.d() });
    }
    let w = WeightVector::uniform(x.n())?;
    let m = weighted_mean(x, &w)?;
    let s = weighted_scatter(x, &w)?;
    let eig = top_k_eigh(&s, k)?;
    SubspaceModel::new(eig.vectors().clone(), m)
}

/// Result of the greedy L1 fit: the model plus the per-component history of
/// the Σ|pᵀxᵢ| objective, one entry per sign iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaL1Fit {
    pub model: SubspaceModel,
    pub objectives: Vec<Vec<f64>>,
}

/// L1-dispersion PCA by the fixed-point sign iteration, one component at a
/// time with deflation.
///
/// Data is centered by the unweighted mean internally. Each component starts
/// from the L2 principal component of the deflated data; the iteration
/// p ← Σᵢ sign(pᵀxᵢ)·xᵢ (normalized, sign(0) = +1) runs until the sign
/// pattern repeats, and its objective is non-decreasing. The seed only comes
/// into play when an iterate collapses to numerical zero and a fresh
/// direction must be drawn.
pub fn fit_pca_l1(x: &DataMatrix, k: usize, seed: u64) -> Result<PcaL1Fit> {
    const MAX_SIGN_ITERATIONS: usize = 1000;
    if k < 1 || k > x.d() {
        return Err(Error::RankRequestTooLarge { k, max: x.d() });
    }
    let (d, n) = (x.d(), x.n());
    let uniform = WeightVector::uniform(n)?;
    let m = weighted_mean(x, &uniform)?;
    let mut data = x.centered(&m);
    let mut rng = SeedRng::new(seed);

    let mut components = Array2::zeros((d, k));
    let mut objectives = Vec::with_capacity(k);
    for comp in 0..k {
        let gram = data.dot(&data.t());
        let mut sym = gram.clone();
        for i in 0..d {
            for j in 0..d {
                sym[[i, j]] = 0.5 * (gram[[i, j]] + gram[[j, i]]);
            }
        }
        let eig = top_k_eigh(&sym, 1)?;
        let mut p: Array1<f64> = eig.vectors().column(0).to_owned();

        let mut history = Vec::new();
        let mut prev_signs: Option<Vec<i8>> = None;
        let mut iterations = 0;
        loop {
            iterations += 1;
            if iterations > MAX_SIGN_ITERATIONS {
                return Err(Error::ConvergenceFailure {
                    iterations: MAX_SIGN_ITERATIONS,
                });
            }
            let signs: Vec<i8> = (0..n)
                .map(|j| {
                    let dot: f64 = (0..d).map(|i| p[i] * data[[i, j]]).sum();
                    if dot < 0.0 {
                        -1
                    } else {
                        1
                    }
                })
                .collect();
            let mut candidate = Array1::<f64>::zeros(d);
            for j in 0..n {
                let s = signs[j] as f64;
                for i in 0..d {
                    candidate[i] += s * data[[i, j]];
                }
            }
            let norm = candidate.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm <= 1e-300 {
                // every sample cancelled out; restart from a random direction
                candidate = Array1::from_shape_fn(d, |_| rng.next_normal());
                let rnorm = candidate.iter().map(|v| v * v).sum::<f64>().sqrt();
                if rnorm <= 1e-300 || data.iter().all(|v| v.abs() <= 1e-300) {
                    break; // deflated data is numerically zero, keep current p
                }
                candidate.mapv_inplace(|v| v / rnorm);
            } else {
                candidate.mapv_inplace(|v| v / norm);
            }
            p = candidate;
            let objective: f64 = (0..n)
                .map(|j| (0..d).map(|i| p[i] * data[[i, j]]).sum::<f64>().abs())
                .sum();
            history.push(objective);
            if prev_signs.as_deref() == Some(&signs) {
                break;
            }
            prev_signs = Some(signs);
        }
        objectives.push(history);

        for i in 0..d {
            components[[i, comp]] = p[i];
        }
        // deflate: remove the recovered direction from every sample
        for j in 0..n {
            let z: f64 = (0..d).map(|i| p[i] * data[[i, j]]).sum();
            for i in 0..d {
                data[[i, j]] -= p[i] * z;
            }
        }
    }
    orthonormalize_columns(&mut components)?;
    let model = SubspaceModel::new(components, m)?;
    Ok(PcaL1Fit { model, objectives })
}

/// Optimal-mean robust PCA solved by iterative reweighting: the implicit
/// weight of sample i is the inverse of its orthogonal residual, renormalized
/// to the simplex, and (m, P) come from the shared weighted machinery. The
/// trace records the Σᵢ‖(I−PPᵀ)(xᵢ−m)‖₂ objective per iteration, which is
/// non-increasing.
pub fn fit_rpca_om(x: &DataMatrix, k: usize, config: &SolverConfig) -> Result<FitResult> {
    config.validate()?;
    if k < 1 || k > x.d() {
        return Err(Error::RankRequestTooLarge { k, max: x.d() });
    }
    let n = x.n();
    let mut w = WeightVector::uniform(n)?;
    let mut prev_projection: Option<Array2<f64>> = None;
    let mut trace = SolverTrace::new();
    for t in 1..=config.max_iterations {
        let m = weighted_mean(x, &w)?;
        let s = weighted_scatter(x, &w)?;
        if degenerate_scatter(&s, x) {
            return Err(Error::DegenerateData);
        }
        let eig = top_k_eigh(&s, k)?;
        let model = SubspaceModel::new(eig.vectors().clone(), m.clone())?;

        let residuals: Vec<f64> = score_ocs(x, &model)?
            .values()
            .iter()
            .map(|&sq| sq.sqrt())
            .collect();
        let objective: f64 = residuals.iter().sum();
        let inv: Vec<f64> = residuals.iter().map(|&r| 1.0 / r.max(RESIDUAL_FLOOR)).collect();
        let total: f64 = inv.iter().sum();
        let w_next = WeightVector::new(inv.into_iter().map(|v| v / total).collect())?;

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
            objective: Some(objective),
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

/// L2,p-norm PCA (0 < p ≤ 2) by iterative reweighting on internally centered
/// data. The implicit weight rᵢ^(p−2) is renormalized each iteration; the
/// scatter keeps the fixed unweighted center (the objective has no mean
/// parameter). p = 2 reduces exactly to classical PCA.
pub fn fit_l2p_pca(x: &DataMatrix, k: usize, p: f64, config: &SolverConfig) -> Result<FitResult> {
    if !(p > 0.0 && p <= 2.0) || !p.is_finite() {
        return Err(Error::InvalidP { value: p });
    }
    config.validate()?;
    if k < 1 || k > x.d() {
        return Err(Error::RankRequestTooLarge { k, max: x.d() });
    }
    let (d, n) = (x.d(), x.n());
    let uniform = WeightVector::uniform(n)?;
    let m = weighted_mean(x, &uniform)?;
    let centered = x.centered(&m);

    let mut w = uniform;
    let mut prev_projection: Option<Array2<f64>> = None;
    let mut trace = SolverTrace::new();
    for t in 1..=config.max_iterations {
        // weighted second-moment scatter about the fixed center
        let mut y = centered.clone();
        for (mut col, &wi) in y.columns_mut().into_iter().zip(w.entries().iter()) {
            col *= wi.sqrt();
        }
        let raw = y.dot(&y.t());
        let mut s = raw.clone();
        for i in 0..d {
            for j in 0..d {
                s[[i, j]] = 0.5 * (raw[[i, j]] + raw[[j, i]]);
            }
        }
        let eig = top_k_eigh(&s, k)?;
        let model = SubspaceModel::new(eig.vectors().clone(), m.clone())?;

        let proj = model.projection();
        let residuals: Vec<f64> = (0..n)
            .map(|j| {
                let mut z = vec![0.0; k];
                for (kk, slot) in z.iter_mut().enumerate() {
                    *slot = (0..d).map(|i| proj[[i, kk]] * centered[[i, j]]).sum();
                }
                let mut acc = 0.0;
                for i in 0..d {
                    let back: f64 = (0..k).map(|kk| proj[[i, kk]] * z[kk]).sum();
                    let r = centered[[i, j]] - back;
                    acc += r * r;
                }
                acc.sqrt()
            })
            .collect();
        let objective: f64 = residuals.iter().map(|&r| r.powf(p)).sum();
        let raw_w: Vec<f64> = residuals
            .iter()
            .map(|&r| r.max(RESIDUAL_FLOOR).powf(p - 2.0))
            .collect();
        let total: f64 = raw_w.iter().sum();
        let w_next = WeightVector::new(raw_w.into_iter().map(|v| v / total).collect())?;

        let subspace_change = prev_projection
            .as_ref()
            .map(|pm| projector_distance(model.projection(), pm))
            .transpose()?;
        let weight_change = w_next.l1_distance(&w);
        trace.push(IterationRecord {
            iteration: t,
            mean: m.to_vec(),
            eigenvalues: eig.values().to_vec(),
            subspace_change,
            weight_change,
            weighted_variance: eig.values().iter().sum(),
            objective: Some(objective),
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
