//! Evaluation metrics: reconstruction error, PSNR, stratified k-fold
//! nearest-neighbor accuracy, and the weight-separation diagnostic, plus the
//! serializable per-run report.

use std::collections::BTreeMap;
use std::io::{self, Write};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::map_indexed;
use crate::rng::SeedRng;
use crate::types::{DataMatrix, SubspaceModel, WeightVector};

/// Mean L2 reconstruction error over the test samples.
///
/// The uncentered variant reconstructs straight through the projector,
/// (1/n)·Σᵢ‖xᵢ − PPᵀxᵢ‖₂, exactly as the headline formula prints it. With
/// `centered` the model mean is subtracted before projecting and added back,
/// which is the fair variant for mean-learning methods; reports must state
/// which one was used.
pub fn recon_error(model: &SubspaceModel, xtest: &DataMatrix, centered: bool) -> Result<f64> {
    if model.d() != xtest.d() {
        return Err(Error::dim(format!(
            "model dimension {} vs test data dimension {}",
            model.d(),
            xtest.d()
        )));
    }
    let per_sample = per_sample_residuals(model, xtest, centered);
    Ok(per_sample.iter().sum::<f64>() / xtest.n() as f64)
}

/// ‖xᵢ − x̂ᵢ‖₂ per test sample; shared by recon_error and the PSNR pipeline.
pub fn per_sample_residuals(model: &SubspaceModel, xtest: &DataMatrix, centered: bool) -> Vec<f64> {
    let (d, k) = (model.d(), model.k());
    let p = model.projection();
    let m = model.mean();
    map_indexed(xtest.n(), |j| {
        let xj = xtest.sample(j);
        let mut z = vec![0.0; k];
        for (kk, slot) in z.iter_mut().enumerate() {
            let mut acc = 0.0;
            for i in 0..d {
                let xi = if centered { xj[i] - m[i] } else { xj[i] };
                acc += p[[i, kk]] * xi;
            }
            *slot = acc;
        }
        let mut sum = 0.0;
        for i in 0..d {
            let xi = if centered { xj[i] - m[i] } else { xj[i] };
            let back: f64 = (0..k).map(|kk| p[[i, kk]] * z[kk]).sum();
            sum += (xi - back) * (xi - back);
        }
        sum.sqrt()
    })
}

/// Peak signal-to-noise ratio in dB: 10·log₁₀(peak²/MSE). Returns `None`
/// (serialized as null) for a perfect reconstruction, where the ratio is
/// infinite.
pub fn psnr(original: &[f64], reconstructed: &[f64], peak: f64) -> Result<Option<f64>> {
    if original.len() != reconstructed.len() {
        return Err(Error::LengthMismatch {
            left: original.len(),
            right: reconstructed.len(),
        });
    }
    if original.is_empty() {
        return Err(Error::EmptyMatrix);
    }
    if !(peak > 0.0) || !peak.is_finite() {
        return Err(Error::config(format!("peak must be positive, got {peak}")));
    }
    let mse: f64 = original
        .iter()
        .zip(reconstructed.iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / original.len() as f64;
    if mse == 0.0 {
        return Ok(None);
    }
    Ok(Some(10.0 * (peak * peak / mse).log10()))
}

/// Stratified fold assignment: classes visited in ascending label order, each
/// class's indices shuffled with the seeded generator, then dealt to folds by
/// a round-robin counter that continues across classes (keeps every fold
/// non-empty whenever n ≥ folds).
pub fn stratified_folds(labels: &[i64], folds: usize, seed: u64) -> Result<Vec<usize>> {
    if folds < 2 {
        return Err(Error::config("folds must be at least 2"));
    }
    if labels.len() < folds {
        return Err(Error::TooFewSamples {
            n: labels.len(),
            required: folds,
        });
    }
    let mut by_class: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        by_class.entry(l).or_default().push(i);
    }
    let mut rng = SeedRng::new(seed);
    let mut assignment = vec![0usize; labels.len()];
    let mut counter = 0usize;
    for (_, mut indices) in by_class {
        rng.shuffle(&mut indices);
        for idx in indices {
            assignment[idx] = counter % folds;
            counter += 1;
        }
    }
    Ok(assignment)
}

/// k-nearest-neighbor cross-validated accuracy on a k×n feature matrix.
///
/// Euclidean distance, ties broken by lowest training index; label votes tied
/// by smallest label. Folds are evaluated independently and averaged in fold
/// order. Returns (mean accuracy, per-fold accuracies).
pub fn knn_cv_accuracy(
    features: &Array2<f64>,
    labels: &[i64],
    folds: usize,
    neighbors: usize,
    seed: u64,
) -> Result<(f64, Vec<f64>)> {
    let n = features.ncols();
    if labels.len() != n {
        return Err(Error::LengthMismatch {
            left: labels.len(),
            right: n,
        });
    }
    if neighbors < 1 {
        return Err(Error::config("neighbors must be at least 1"));
    }
    let assignment = stratified_folds(labels, folds, seed)?;

    let per_fold = map_indexed(folds, |fold| {
        let test: Vec<usize> = (0..n).filter(|&i| assignment[i] == fold).collect();
        let train: Vec<usize> = (0..n).filter(|&i| assignment[i] != fold).collect();
        if test.is_empty() {
            return 1.0; // unreachable for n >= folds with the dealer above
        }
        let mut correct = 0usize;
        for &t in &test {
            let predicted = knn_predict(features, labels, &train, t, neighbors);
            if predicted == labels[t] {
                correct += 1;
            }
        }
        correct as f64 / test.len() as f64
    });
    let mean = per_fold.iter().sum::<f64>() / folds as f64;
    Ok((mean, per_fold))
}

fn knn_predict(
    features: &Array2<f64>,
    labels: &[i64],
    train: &[usize],
    query: usize,
    neighbors: usize,
) -> i64 {
    let dim = features.nrows();
    let mut dists: Vec<(f64, usize)> = train
        .iter()
        .map(|&j| {
            let mut acc = 0.0;
            for i in 0..dim {
                let diff = features[[i, query]] - features[[i, j]];
                acc += diff * diff;
            }
            (acc, j)
        })
        .collect();
    dists.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    let take = neighbors.min(dists.len());
    let mut votes: BTreeMap<i64, usize> = BTreeMap::new();
    for &(_, j) in &dists[..take] {
        *votes.entry(labels[j]).or_insert(0) += 1;
    }
    // highest count wins; BTreeMap order makes the smallest label win ties
    let mut best = (i64::MIN, 0usize);
    for (&label, &count) in &votes {
        if count > best.1 {
            best = (label, count);
        }
    }
    best.0
}

/// Separation diagnostic between normal-sample and outlier weights: a ratio
/// above 1 means every outlier sits strictly below every normal sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightSeparation {
    pub min_normal: f64,
    pub max_outlier: f64,
    pub ratio: f64,
}

pub fn weight_separation(weights: &WeightVector, mask: &[bool]) -> Result<WeightSeparation> {
    if mask.len() != weights.len() {
        return Err(Error::LengthMismatch {
            left: mask.len(),
            right: weights.len(),
        });
    }
    let any_outlier = mask.iter().any(|&m| m);
    let any_normal = mask.iter().any(|&m| !m);
    if !any_outlier || !any_normal {
        return Err(Error::DegenerateMask);
    }
    let mut min_normal = f64::INFINITY;
    let mut max_outlier = f64::NEG_INFINITY;
    for (i, &flag) in mask.iter().enumerate() {
        let w = weights.entries()[i];
        if flag {
            max_outlier = max_outlier.max(w);
        } else {
            min_normal = min_normal.min(w);
        }
    }
    Ok(WeightSeparation {
        min_normal,
        max_outlier,
        ratio: min_normal / max_outlier,
    })
}

/// Per-(method, k) evaluation results. Aggregates equal the mean of their
/// `per_fold` series within 1e-12; `validate` enforces that.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub method: String,
    pub k: usize,
    pub mean_reconstruction_error: f64,
    /// Whether the reconstruction error used the centered variant.
    pub centered: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub psnr_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cv_accuracy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub weight_separation: Option<WeightSeparation>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub angle_to_reference_degrees: Option<f64>,
    pub per_fold: BTreeMap<String, Vec<f64>>,
    pub seed: u64,
}

impl EvalReport {
    pub fn validate(&self) -> Result<()> {
        let check = |name: &str, aggregate: f64| -> Result<()> {
            if let Some(values) = self.per_fold.get(name) {
                if !values.is_empty() {
                    let mean = values.iter().sum::<f64>() / values.len() as f64;
                    if (mean - aggregate).abs() > 1e-12 {
                        return Err(Error::config(format!(
                            "aggregate {name}={aggregate} != mean of folds {mean}"
                        )));
                    }
                }
            }
            Ok(())
        };
        check("recon_error", self.mean_reconstruction_error)?;
        if let Some(acc) = self.cv_accuracy {
            check("cv_accuracy", acc)?;
        }
        if let Some(p) = self.psnr_db {
            check("psnr_db", p)?;
        }
        Ok(())
    }
}

/// Long-format CSV export: method,k,metric,fold,value with one aggregate row
/// (fold = "mean") per metric.
pub fn write_reports_csv<W: Write>(out: &mut W, reports: &[EvalReport]) -> io::Result<()> {
    writeln!(out, "method,k,metric,fold,value")?;
    for r in reports {
        for (metric, values) in &r.per_fold {
            for (fold, v) in values.iter().enumerate() {
                writeln!(out, "{},{},{},{},{}", r.method, r.k, metric, fold, v)?;
            }
        }
        writeln!(
            out,
            "{},{},recon_error,mean,{}",
            r.method, r.k, r.mean_reconstruction_error
        )?;
        if let Some(acc) = r.cv_accuracy {
            writeln!(out, "{},{},cv_accuracy,mean,{}", r.method, r.k, acc)?;
        }
        if let Some(p) = r.psnr_db {
            writeln!(out, "{},{},psnr_db,mean,{}", r.method, r.k, p)?;
        }
        if let Some(ws) = &r.weight_separation {
            writeln!(out, "{},{},weight_separation_ratio,mean,{}", r.method, r.k, ws.ratio)?;
        }
        if let Some(angle) = r.angle_to_reference_degrees {
            writeln!(out, "{},{},angle_to_reference_degrees,mean,{}", r.method, r.k, angle)?;
        }
    }
    Ok(())
}
