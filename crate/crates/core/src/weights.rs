//! The discriminant sample-weight learner.
//!
//! Three score families rate each sample from a different viewpoint —
//! variance inside the subspace, residual outside it, and distance from the
//! center. Each family is pushed through an entropy-regularized softmax that
//! assigns *large* weights to *suspicious* samples, and the three results are
//! merged by inverse-product softmax so that a sample flagged by any family
//! ends up with a small final weight.
//!
//! Everything runs in log domain: the merge in particular inverts tiny
//! products that would overflow in linear domain for a few hundred samples.

use ndarray::Array1;

use crate::error::{Error, Result};
use crate::par::map_indexed;
use crate::types::{DataMatrix, SubspaceModel, WeightVector, WEIGHT_FLOOR};

/// Per-sample nonnegative scores in squared data units.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector {
    scores: Array1<f64>,
}

impl ScoreVector {
    pub fn new(scores: Vec<f64>) -> Result<Self> {
        if scores.is_empty() {
            return Err(Error::EmptyMatrix);
        }
        for (i, &s) in scores.iter().enumerate() {
            if !s.is_finite() || s < 0.0 {
                return Err(Error::config(format!("score {i} must be finite and >= 0, got {s}")));
            }
        }
        Ok(Self {
            scores: Array1::from_vec(scores),
        })
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn values(&self) -> &Array1<f64> {
        &self.scores
    }
}

/// Projection-variance scores: ‖Pᵀ(xᵢ − m)‖₂².
pub fn score_pcs(x: &DataMatrix, model: &SubspaceModel) -> Result<ScoreVector> {
    check_dims(x, model)?;
    let p = model.projection();
    let m = model.mean();
    let (d, k) = (model.d(), model.k());
    let scores = map_indexed(x.n(), |j| {
        let xj = x.sample(j);
        let mut acc = 0.0;
        for kk in 0..k {
            let mut z = 0.0;
            for i in 0..d {
                z += p[[i, kk]] * (xj[i] - m[i]);
            }
            acc += z * z;
        }
        acc
    });
    ScoreVector::new(scores)
}

/// Residual scores in the orthogonal complement: ‖(I − PPᵀ)(xᵢ − m)‖₂².
pub fn score_ocs(x: &DataMatrix, model: &SubspaceModel) -> Result<ScoreVector> {
    check_dims(x, model)?;
    let p = model.projection();
    let m = model.mean();
    let (d, k) = (model.d(), model.k());
    let scores = map_indexed(x.n(), |j| {
        let xj = x.sample(j);
        let mut z = vec![0.0; k];
        for (kk, slot) in z.iter_mut().enumerate() {
            let mut acc = 0.0;
            for i in 0..d {
                acc += p[[i, kk]] * (xj[i] - m[i]);
            }
            *slot = acc;
        }
        let mut acc = 0.0;
        for i in 0..d {
            let mut back = 0.0;
            for kk in 0..k {
                back += p[[i, kk]] * z[kk];
            }
            let r = (xj[i] - m[i]) - back;
            acc += r * r;
        }
        acc
    });
    ScoreVector::new(scores)
}

/// Distance-from-center scores: ‖xᵢ − m‖₂².
pub fn score_dist(x: &DataMatrix, m: &Array1<f64>) -> Result<ScoreVector> {
    if m.len() != x.d() {
        return Err(Error::dim(format!(
            "mean length {} vs data dimension {}",
            m.len(),
            x.d()
        )));
    }
    let scores = map_indexed(x.n(), |j| {
        let xj = x.sample(j);
        let mut acc = 0.0;
        for i in 0..x.d() {
            let r = xj[i] - m[i];
            acc += r * r;
        }
        acc
    });
    ScoreVector::new(scores)
}

/// Closed-form maximizer of (1/n)·Σ wᵢsᵢ + τ·entropy(w) over the simplex:
/// wᵢ ∝ exp(sᵢ / (n·τ)), computed with max-shift and renormalized.
pub fn entropy_softmax(s: &ScoreVector, tau: f64) -> Result<WeightVector> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::NonPositiveTau { value: tau });
    }
    let n = s.len();
    let scale = 1.0 / (n as f64 * tau);
    let z: Vec<f64> = s.values().iter().map(|&v| v * scale).collect();
    softmax(&z)
}

/// Merged weights of the three families: wᵢ = (aᵢbᵢcᵢ)⁻¹ / Σⱼ(aⱼbⱼcⱼ)⁻¹,
/// evaluated as a softmax of −(ln aᵢ + ln bᵢ + ln cᵢ).
pub fn merge_weights(a: &WeightVector, b: &WeightVector, c: &WeightVector) -> Result<WeightVector> {
    if a.len() != b.len() || a.len() != c.len() {
        return Err(Error::dim(format!(
            "weight families have lengths {}, {}, {}",
            a.len(),
            b.len(),
            c.len()
        )));
    }
    let (la, lb, lc) = (a.log_entries(), b.log_entries(), c.log_entries());
    let z: Vec<f64> = (0..a.len()).map(|i| -(la[i] + lb[i] + lc[i])).collect();
    softmax(&z)
}

/// Scale-free default temperature: τ = mean(s)/n, so the softmax exponent is
/// sᵢ/mean(s). All-zero scores fall back to τ = 1 (the weights are uniform
/// either way).
pub fn auto_tau(s: &ScoreVector) -> f64 {
    let mean = s.values().iter().sum::<f64>() / s.len() as f64;
    if mean > 0.0 {
        mean / s.len() as f64
    } else {
        1.0
    }
}

fn softmax(z: &[f64]) -> Result<WeightVector> {
    let max = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = z.iter().map(|&v| (v - max).exp().max(WEIGHT_FLOOR)).collect();
    let sum: f64 = exps.iter().sum();
    WeightVector::new(exps.into_iter().map(|e| e / sum).collect())
}

fn check_dims(x: &DataMatrix, model: &SubspaceModel) -> Result<()> {
    if model.d() != x.d() {
        return Err(Error::dim(format!(
            "model dimension {} vs data dimension {}",
            model.d(),
            x.d()
        )));
    }
    Ok(())
}
