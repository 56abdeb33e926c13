//! Experiment configuration and the end-to-end evaluation pipeline:
//! load/generate → contaminate → fit per (method, k) → metrics → report.
//!
//! Every output embeds the fully resolved config and seed; re-running from an
//! embedded config reproduces the report byte for byte. Independent
//! (method, k) cells fan out across worker threads with the `parallel`
//! feature; results are collected in canonical order either way.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use rpca::baselines::{fit_l2p_pca, fit_pca, fit_pca_l1, fit_rpca_om};
use rpca::error::Error;
use rpca::eval::{
    knn_cv_accuracy, per_sample_residuals, recon_error, stratified_folds, weight_separation,
    EvalReport,
};
use rpca::harness::{
    contaminate_images, contaminate_tabular, gen_toy, FactorDrawMode, LabeledDataset,
    OutlierCategory, ToySpec,
};
use rpca::linalg::{largest_principal_angle, project};
use rpca::solver::fit_rpca_dswl;
use rpca::types::{DataMatrix, SolverConfig, SolverTrace, SubspaceModel, TauSetting, WeightVector};

pub type Result<T> = std::result::Result<T, Error>;

/// Where the experiment data comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DatasetSource {
    Toy {
        n_normal: usize,
        correlation: f64,
        outlier_category: OutlierCategory,
        n_outliers: usize,
        magnitude: f64,
    },
    Csv {
        path: PathBuf,
        #[serde(default)]
        has_labels: bool,
    },
    PgmDir {
        path: PathBuf,
        shape: (usize, usize),
    },
}

/// Optional outlier injection applied before fitting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ContaminationSpec {
    Tabular {
        fraction: f64,
        factors: Vec<f64>,
        #[serde(default)]
        per_feature: bool,
    },
    Image {
        shape: (usize, usize),
        fraction: f64,
        block_area_ratio: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum MethodName {
    #[serde(rename = "pca")]
    #[value(name = "pca")]
    Pca,
    #[serde(rename = "pca-l1")]
    #[value(name = "pca-l1")]
    PcaL1,
    #[serde(rename = "rpca-om")]
    #[value(name = "rpca-om")]
    RpcaOm,
    #[serde(rename = "l2p-pca")]
    #[value(name = "l2p-pca")]
    L2pPca,
    #[serde(rename = "rpca-dswl")]
    #[value(name = "rpca-dswl")]
    RpcaDswl,
}

impl MethodName {
    pub fn as_str(&self) -> &'static str {
        match self {
            MethodName::Pca => "pca",
            MethodName::PcaL1 => "pca-l1",
            MethodName::RpcaOm => "rpca-om",
            MethodName::L2pPca => "l2p-pca",
            MethodName::RpcaDswl => "rpca-dswl",
        }
    }

    /// Mean-learning methods get the centered reconstruction error.
    pub fn centered_by_default(&self) -> bool {
        matches!(self, MethodName::RpcaOm | MethodName::RpcaDswl)
    }
}

fn default_tau() -> TauSetting {
    TauSetting::Auto
}

/// One method entry with its per-method knobs; unset fields fall back to the
/// solver defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSpec {
    pub name: MethodName,
    #[serde(default = "default_tau")]
    pub tau_a: TauSetting,
    #[serde(default = "default_tau")]
    pub tau_b: TauSetting,
    #[serde(default = "default_tau")]
    pub tau_c: TauSetting,
    #[serde(default)]
    pub freeze_tau: bool,
    /// Exponent for the L2,p baseline; 1 when unset.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub max_iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub subspace_tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub weight_tolerance: Option<f64>,
    /// Override the per-method centered-reconstruction policy.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub centered: Option<bool>,
}

impl MethodSpec {
    pub fn bare(name: MethodName) -> Self {
        Self {
            name,
            tau_a: TauSetting::Auto,
            tau_b: TauSetting::Auto,
            tau_c: TauSetting::Auto,
            freeze_tau: false,
            p: None,
            max_iterations: None,
            subspace_tolerance: None,
            weight_tolerance: None,
            centered: None,
        }
    }

    pub fn solver_config(&self, k: usize, seed: u64) -> SolverConfig {
        let mut cfg = SolverConfig::new(k);
        cfg.tau_a = self.tau_a;
        cfg.tau_b = self.tau_b;
        cfg.tau_c = self.tau_c;
        cfg.freeze_tau = self.freeze_tau;
        if let Some(m) = self.max_iterations {
            cfg.max_iterations = m;
        }
        if let Some(t) = self.subspace_tolerance {
            cfg.subspace_tolerance = t;
        }
        if let Some(t) = self.weight_tolerance {
            cfg.weight_tolerance = t;
        }
        cfg.rng_seed = seed;
        cfg
    }

    pub fn centered(&self) -> bool {
        self.centered.unwrap_or_else(|| self.name.centered_by_default())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    ReconError,
    Psnr,
    CvAccuracy,
    WeightSeparation,
    AngleToCleanPca,
}

fn default_folds() -> usize {
    10
}

fn default_neighbors() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dataset: DatasetSource,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub contamination: Option<ContaminationSpec>,
    pub methods: Vec<MethodSpec>,
    pub ks: Vec<usize>,
    pub metrics: Vec<Metric>,
    #[serde(default = "default_folds")]
    pub folds: usize,
    #[serde(default = "default_neighbors")]
    pub neighbors: usize,
    #[serde(default)]
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() || self.ks.is_empty() {
            return Err(Error::InvalidConfig {
                message: "need at least one method and one k".into(),
            });
        }
        if self.metrics.is_empty() {
            return Err(Error::InvalidConfig {
                message: "need at least one metric".into(),
            });
        }
        match &self.dataset {
            DatasetSource::Csv { path, .. } => preflight(path)?,
            DatasetSource::PgmDir { path, .. } => preflight(path)?,
            DatasetSource::Toy { .. } => {}
        }
        Ok(())
    }
}

pub fn preflight(path: &Path) -> Result<()> {
    if !path.exists() {
        return Err(Error::InvalidConfig {
            message: format!("input path {} does not exist", path.display()),
        });
    }
    Ok(())
}

/// The report document written by `eval`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalOutput {
    pub config: ExperimentConfig,
    pub seed: u64,
    pub results: Vec<EvalReport>,
}

/// Outcome of fitting one method at one k.
pub struct FittedMethod {
    pub model: SubspaceModel,
    pub weights: Option<WeightVector>,
    pub trace: Option<SolverTrace>,
    pub converged: Option<bool>,
    pub iterations: Option<usize>,
}

/// Dispatches a fit by method name.
pub fn fit_method(
    spec: &MethodSpec,
    data: &DataMatrix,
    k: usize,
    seed: u64,
) -> Result<FittedMethod> {
    let cfg = spec.solver_config(k, seed);
    match spec.name {
        MethodName::Pca => {
            let model = fit_pca(data, k)?;
            Ok(FittedMethod {
                model,
                weights: None,
                trace: None,
                converged: None,
                iterations: None,
            })
        }
        MethodName::PcaL1 => {
            let fit = fit_pca_l1(data, k, seed)?;
            let iterations = fit.objectives.iter().map(|h| h.len()).sum();
            Ok(FittedMethod {
                model: fit.model,
                weights: None,
                trace: None,
                converged: Some(true),
                iterations: Some(iterations),
            })
        }
        MethodName::RpcaOm => {
            let fit = fit_rpca_om(data, k, &cfg)?;
            Ok(FittedMethod {
                model: fit.model,
                weights: Some(fit.weights),
                trace: Some(fit.trace),
                converged: Some(fit.converged),
                iterations: Some(fit.iterations),
            })
        }
        MethodName::L2pPca => {
            let fit = fit_l2p_pca(data, k, spec.p.unwrap_or(1.0), &cfg)?;
            Ok(FittedMethod {
                model: fit.model,
                weights: Some(fit.weights),
                trace: Some(fit.trace),
                converged: Some(fit.converged),
                iterations: Some(fit.iterations),
            })
        }
        MethodName::RpcaDswl => {
            let fit = fit_rpca_dswl(data, &cfg)?;
            Ok(FittedMethod {
                model: fit.model,
                weights: Some(fit.weights),
                trace: Some(fit.trace),
                converged: Some(fit.converged),
                iterations: Some(fit.iterations),
            })
        }
    }
}

/// Sub-seed derivation for internal stages, documented so reruns and
/// reimplementations agree: stage seeds are `seed + tag` in wrapping
/// arithmetic, with tag 1 = global contamination, 2 = fold assignment,
/// 3 = cross-validation, 1000 + f = contamination of fold f's training data.
fn subseed(seed: u64, tag: u64) -> u64 {
    seed.wrapping_add(tag)
}

fn load_dataset(config: &ExperimentConfig) -> Result<LabeledDataset> {
    match &config.dataset {
        DatasetSource::Toy {
            n_normal,
            correlation,
            outlier_category,
            n_outliers,
            magnitude,
        } => gen_toy(&ToySpec {
            n_normal: *n_normal,
            correlation: *correlation,
            outlier_category: *outlier_category,
            n_outliers: *n_outliers,
            magnitude: *magnitude,
            rng_seed: config.seed,
        }),
        DatasetSource::Csv { path, has_labels } => rpca::harness::load_csv(path, *has_labels),
        DatasetSource::PgmDir { path, shape } => rpca::harness::load_pgm_dir(path, *shape),
    }
}

fn apply_contamination(
    ds: &LabeledDataset,
    spec: &ContaminationSpec,
    seed: u64,
) -> Result<LabeledDataset> {
    match spec {
        ContaminationSpec::Tabular {
            fraction,
            factors,
            per_feature,
        } => {
            let mode = if *per_feature {
                FactorDrawMode::PerFeature
            } else {
                FactorDrawMode::PerSample
            };
            contaminate_tabular(ds, *fraction, factors, mode, seed)
        }
        ContaminationSpec::Image {
            shape,
            fraction,
            block_area_ratio,
        } => contaminate_images(ds, *shape, *fraction, *block_area_ratio, seed),
    }
}

fn select_columns(ds: &LabeledDataset, idx: &[usize]) -> Result<LabeledDataset> {
    let d = ds.d();
    let mut values = ndarray::Array2::zeros((d, idx.len()));
    for (col, &j) in idx.iter().enumerate() {
        for i in 0..d {
            values[[i, col]] = ds.data().values()[[i, j]];
        }
    }
    let labels = ds.labels().map(|l| idx.iter().map(|&j| l[j]).collect());
    let mask = idx.iter().map(|&j| ds.outlier_mask()[j]).collect();
    LabeledDataset::new(DataMatrix::new(values)?, labels, mask)
}

#[cfg(feature = "parallel")]
fn map_cells<T: Send, F: Fn(usize) -> T + Sync + Send>(n: usize, f: F) -> Vec<T> {
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_cells<T: Send, F: Fn(usize) -> T + Sync + Send>(n: usize, f: F) -> Vec<T> {
    (0..n).map(f).collect()
}

/// Runs the full experiment described by the config.
pub fn run_eval(config: &ExperimentConfig) -> Result<EvalOutput> {
    config.validate()?;
    let seed = config.seed;
    let original = load_dataset(config)?;

    let contaminated = match &config.contamination {
        Some(spec) => apply_contamination(&original, spec, subseed(seed, 1))?,
        None => original.clone(),
    };

    // clean twin for the angle metric: same generator, outliers removed
    let clean_reference: Option<LabeledDataset> =
        if config.metrics.contains(&Metric::AngleToCleanPca) {
            match &config.dataset {
                DatasetSource::Toy {
                    n_normal,
                    correlation,
                    ..
                } => Some(gen_toy(&ToySpec {
                    n_normal: *n_normal,
                    correlation: *correlation,
                    outlier_category: OutlierCategory::None,
                    n_outliers: 0,
                    magnitude: 1.0,
                    rng_seed: seed,
                })?),
                _ => {
                    return Err(Error::InvalidConfig {
                        message: "angle_to_clean_pca requires the toy dataset source".into(),
                    })
                }
            }
        } else {
            None
        };

    let wants_cv_recon = (config.metrics.contains(&Metric::ReconError)
        || config.metrics.contains(&Metric::Psnr))
        && config.folds >= 2;
    let fold_assignment: Option<Vec<usize>> = if wants_cv_recon {
        let labels: Vec<i64> = match original.labels() {
            Some(l) => l.to_vec(),
            None => vec![0; original.n()],
        };
        Some(stratified_folds(&labels, config.folds, subseed(seed, 2))?)
    } else {
        None
    };
    let peak: f64 = original
        .data()
        .values()
        .iter()
        .fold(0.0f64, |acc, &v| acc.max(v.abs()))
        .max(f64::MIN_POSITIVE);

    let cells: Vec<(usize, usize)> = (0..config.methods.len())
        .flat_map(|mi| (0..config.ks.len()).map(move |ki| (mi, ki)))
        .collect();

    let results: Vec<Result<EvalReport>> = map_cells(cells.len(), |cell| {
        let (mi, ki) = cells[cell];
        let method = &config.methods[mi];
        let k = config.ks[ki];
        evaluate_cell(
            config,
            method,
            k,
            seed,
            &original,
            &contaminated,
            clean_reference.as_ref(),
            fold_assignment.as_deref(),
            peak,
        )
    });

    let mut reports = Vec::with_capacity(results.len());
    for r in results {
        reports.push(r?);
    }
    Ok(EvalOutput {
        config: config.clone(),
        seed,
        results: reports,
    })
}

#[allow(clippy::too_many_arguments)]
fn evaluate_cell(
    config: &ExperimentConfig,
    method: &MethodSpec,
    k: usize,
    seed: u64,
    original: &LabeledDataset,
    contaminated: &LabeledDataset,
    clean_reference: Option<&LabeledDataset>,
    fold_assignment: Option<&[usize]>,
    peak: f64,
) -> Result<EvalReport> {
    let centered = method.centered();
    let mut per_fold: BTreeMap<String, Vec<f64>> = BTreeMap::new();

    // reconstruction metrics, cross-validated when folds allow it
    let want_recon = config.metrics.contains(&Metric::ReconError);
    let want_psnr = config.metrics.contains(&Metric::Psnr);
    let mut mean_recon = f64::NAN;
    let mut mean_psnr: Option<f64> = None;
    if let (true, Some(assignment)) = (want_recon || want_psnr, fold_assignment) {
        let mut recon_folds = Vec::with_capacity(config.folds);
        let mut psnr_folds: Vec<f64> = Vec::with_capacity(config.folds);
        let mut psnr_defined = true;
        for fold in 0..config.folds {
            let train_idx: Vec<usize> =
                (0..original.n()).filter(|&j| assignment[j] != fold).collect();
            let test_idx: Vec<usize> =
                (0..original.n()).filter(|&j| assignment[j] == fold).collect();
            let train = select_columns(original, &train_idx)?;
            let test = select_columns(original, &test_idx)?;
            let train = match &config.contamination {
                Some(spec) => apply_contamination(&train, spec, subseed(seed, 1000 + fold as u64))?,
                None => train,
            };
            let fitted = fit_method(method, train.data(), k, seed)?;
            recon_folds.push(recon_error(&fitted.model, test.data(), centered)?);
            if want_psnr {
                match mean_psnr_over_samples(&fitted.model, test.data(), centered, peak)? {
                    Some(v) => psnr_folds.push(v),
                    None => psnr_defined = false,
                }
            }
        }
        mean_recon = recon_folds.iter().sum::<f64>() / recon_folds.len() as f64;
        per_fold.insert("recon_error".into(), recon_folds);
        if want_psnr && psnr_defined {
            mean_psnr = Some(psnr_folds.iter().sum::<f64>() / psnr_folds.len() as f64);
            per_fold.insert("psnr_db".into(), psnr_folds);
        }
    }

    // everything else runs on the globally contaminated data
    let fitted = fit_method(method, contaminated.data(), k, seed)?;
    if (want_recon || want_psnr) && fold_assignment.is_none() {
        mean_recon = recon_error(&fitted.model, contaminated.data(), centered)?;
        per_fold.insert("recon_error".into(), vec![mean_recon]);
        if want_psnr {
            if let Some(v) = mean_psnr_over_samples(&fitted.model, contaminated.data(), centered, peak)? {
                mean_psnr = Some(v);
                per_fold.insert("psnr_db".into(), vec![v]);
            }
        }
    }
    if !(want_recon || want_psnr) {
        // the headline reconstruction number is always reported
        mean_recon = recon_error(&fitted.model, contaminated.data(), centered)?;
    }

    let mut cv_accuracy = None;
    if config.metrics.contains(&Metric::CvAccuracy) {
        let labels = contaminated.labels().ok_or_else(|| Error::InvalidConfig {
            message: "cv_accuracy requires a labeled dataset".into(),
        })?;
        let features = project(&fitted.model, contaminated.data())?;
        let (mean, folds) = knn_cv_accuracy(
            &features,
            labels,
            config.folds,
            config.neighbors,
            subseed(seed, 3),
        )?;
        cv_accuracy = Some(mean);
        per_fold.insert("cv_accuracy".into(), folds);
    }

    let mut separation = None;
    if config.metrics.contains(&Metric::WeightSeparation) {
        if let Some(w) = &fitted.weights {
            let mask = contaminated.outlier_mask();
            if mask.iter().any(|&m| m) && mask.iter().any(|&m| !m) {
                separation = Some(weight_separation(w, mask)?);
            }
        }
    }

    let mut angle = None;
    if let Some(clean) = clean_reference {
        let reference = fit_pca(clean.data(), k)?;
        let radians =
            largest_principal_angle(fitted.model.projection(), reference.projection())?;
        angle = Some(radians.to_degrees());
    }

    let report = EvalReport {
        method: method.name.as_str().to_string(),
        k,
        mean_reconstruction_error: mean_recon,
        centered,
        psnr_db: mean_psnr,
        cv_accuracy,
        weight_separation: separation,
        angle_to_reference_degrees: angle,
        per_fold,
        seed,
    };
    report.validate()?;
    Ok(report)
}

/// Mean per-sample PSNR of the reconstructions. Samples reconstructed
/// perfectly have infinite PSNR and are excluded from the mean; `None` means
/// every sample was perfect (the metric's null sentinel).
fn mean_psnr_over_samples(
    model: &SubspaceModel,
    xtest: &DataMatrix,
    centered: bool,
    peak: f64,
) -> Result<Option<f64>> {
    let residuals = per_sample_residuals(model, xtest, centered);
    let d = xtest.d() as f64;
    let mut sum = 0.0;
    let mut count = 0usize;
    for r in residuals {
        let mse = r * r / d;
        if mse > 0.0 {
            sum += 10.0 * (peak * peak / mse).log10();
            count += 1;
        }
    }
    if count == 0 {
        return Ok(None);
    }
    Ok(Some(sum / count as f64))
}
