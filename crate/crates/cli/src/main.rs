//! Benchmark CLI: synthesize toy data, inject outliers, fit subspace models,
//! transform features, and run full evaluation experiments from a JSON
//! config. Progress goes to standard error; with `--json`, standard output
//! carries only the machine-readable result document.
//!
//! Exit codes: 0 success, 2 usage or validation failure, 3 runtime failure
//! (including non-convergence under `--strict`).

mod experiments;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use experiments::{preflight, run_eval, ExperimentConfig, MethodName, MethodSpec};
use rpca::error::Error;
use rpca::eval::{recon_error, write_reports_csv};
use rpca::harness::{
    gen_toy, load_csv, load_mask_csv, write_mask_csv, write_matrix_csv, LabeledDataset,
    OutlierCategory, ToySpec,
};
use rpca::linalg::project;
use rpca::types::{SolverConfig, SubspaceModel, TauSetting};

#[derive(Parser)]
#[command(
    name = "rpca",
    version,
    about = "Outlier-robust PCA benchmark toolkit",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Print the machine-readable result document on stdout
    #[arg(long, global = true)]
    json: bool,
    /// Treat non-convergence as a runtime failure (exit 3)
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the 2-D correlated-Gaussian toy dataset (CSV + outlier mask)
    Synth(SynthArgs),
    /// Inject outliers into an existing dataset
    Contaminate(ContaminateArgs),
    /// Fit a subspace model and write model + trace JSON
    Fit(FitArgs),
    /// Project samples through a fitted model
    Transform(TransformArgs),
    /// Run a full experiment from a JSON config and write the report
    Eval(EvalArgs),
}

#[derive(Args)]
struct SynthArgs {
    /// Number of normal samples
    #[arg(long, default_value_t = 200)]
    n: usize,
    /// Correlation between the two dimensions, strictly inside (-1, 1)
    #[arg(long, default_value_t = 0.95)]
    corr: f64,
    /// Outlier injection as CATEGORY:COUNT:MAGNITUDE with CATEGORY one of
    /// pcs|ocs|both (omit for clean data)
    #[arg(long, value_parser = parse_outlier_spec)]
    outliers: Option<(OutlierCategory, usize, f64)>,
    #[arg(long, env = "RPCA_SEED", default_value_t = 0)]
    seed: u64,
    /// Output CSV path (one sample per row)
    #[arg(long, short)]
    out: PathBuf,
    /// Mask CSV path; defaults to the output path with a .mask.csv suffix
    #[arg(long)]
    mask_out: Option<PathBuf>,
}

#[derive(Args)]
struct ContaminateArgs {
    #[arg(long, short)]
    input: PathBuf,
    /// Input CSV has a final integer label column
    #[arg(long)]
    labels: bool,
    /// Existing outlier mask to carry through
    #[arg(long)]
    mask: Option<PathBuf>,
    #[arg(long, value_enum)]
    mode: ContaminateMode,
    #[arg(long, default_value_t = 0.25)]
    fraction: f64,
    /// Amplification factors (tabular mode)
    #[arg(long, value_delimiter = ',', default_values_t = [5.0, 10.0, 20.0])]
    factors: Vec<f64>,
    /// Draw an independent factor per feature instead of one per sample
    #[arg(long)]
    per_feature: bool,
    /// Image dimensions as HxW (image mode)
    #[arg(long, value_parser = parse_shape)]
    image_shape: Option<(usize, usize)>,
    /// Corrupted block area as a fraction of the image (image mode)
    #[arg(long, default_value_t = 0.25)]
    block_ratio: f64,
    #[arg(long, env = "RPCA_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, short)]
    out: PathBuf,
    #[arg(long)]
    mask_out: Option<PathBuf>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum ContaminateMode {
    Tabular,
    Image,
}

#[derive(Args)]
struct FitArgs {
    #[arg(long, value_enum)]
    method: MethodName,
    #[arg(long, short)]
    k: usize,
    #[arg(long, short)]
    input: PathBuf,
    /// Input CSV has a final integer label column (ignored for fitting)
    #[arg(long)]
    labels: bool,
    /// Model JSON output path
    #[arg(long, short)]
    out: PathBuf,
    /// Trace JSON path; defaults to the model path with a .trace.json suffix
    #[arg(long)]
    trace_out: Option<PathBuf>,
    /// Temperature for the subspace-variance weights: "auto" or a positive
    /// number
    #[arg(long, value_parser = parse_tau, default_value = "auto")]
    tau_a: TauSetting,
    /// Temperature for the residual weights
    #[arg(long, value_parser = parse_tau, default_value = "auto")]
    tau_b: TauSetting,
    /// Temperature for the distance weights
    #[arg(long, value_parser = parse_tau, default_value = "auto")]
    tau_c: TauSetting,
    /// Resolve auto temperatures once and reuse them across iterations
    #[arg(long)]
    freeze_tau: bool,
    /// Residual-norm exponent for l2p-pca (default 1)
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, default_value_t = 100)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-6)]
    subspace_tol: f64,
    #[arg(long, default_value_t = 1e-8)]
    weight_tol: f64,
    /// Force the centered (true) or uncentered (false) reconstruction error;
    /// defaults to centered for the mean-learning methods
    #[arg(long)]
    centered: Option<bool>,
    #[arg(long, env = "RPCA_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct TransformArgs {
    /// Model JSON (a fit document or a bare model object)
    #[arg(long, short)]
    model: PathBuf,
    #[arg(long, short)]
    input: PathBuf,
    /// Input CSV has a final integer label column, passed through to the
    /// output
    #[arg(long)]
    labels: bool,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    /// Experiment config JSON, or a previous report (its embedded config is
    /// reused)
    #[arg(long, short)]
    config: PathBuf,
    /// Report output path
    #[arg(long, short)]
    out: PathBuf,
    /// Also export the long-format CSV (method,k,metric,fold,value)
    #[arg(long)]
    csv: Option<PathBuf>,
}

/// Errors split by exit code.
enum CliError {
    Validation(String),
    Runtime(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Runtime(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::ConvergenceFailure { .. } | Error::DegenerateData | Error::Io { .. } => {
                CliError::Runtime(e.to_string())
            }
            _ => CliError::Validation(e.to_string()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn parse_outlier_spec(raw: &str) -> Result<(OutlierCategory, usize, f64), String> {
    let parts: Vec<&str> = raw.split(':').collect();
    if parts.len() != 3 {
        return Err(format!(
            "--outliers expects CATEGORY:COUNT:MAGNITUDE, got {raw:?}"
        ));
    }
    let category: OutlierCategory = parts[0].parse().map_err(|e: Error| e.to_string())?;
    if category == OutlierCategory::None {
        return Err("--outliers category must be pcs, ocs, or both".into());
    }
    let count: usize = parts[1]
        .parse()
        .map_err(|_| format!("bad outlier count {:?}", parts[1]))?;
    let magnitude: f64 = parts[2]
        .parse()
        .map_err(|_| format!("bad outlier magnitude {:?}", parts[2]))?;
    if !(magnitude > 0.0) {
        return Err("outlier magnitude must be positive".into());
    }
    Ok((category, count, magnitude))
}

fn parse_shape(raw: &str) -> Result<(usize, usize), String> {
    let (h, w) = raw
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected HxW, got {raw:?}"))?;
    let h: usize = h.parse().map_err(|_| format!("bad height {h:?}"))?;
    let w: usize = w.parse().map_err(|_| format!("bad width {w:?}"))?;
    if h == 0 || w == 0 {
        return Err("shape dimensions must be positive".into());
    }
    Ok((h, w))
}

fn parse_tau(raw: &str) -> Result<TauSetting, String> {
    if raw == "auto" {
        return Ok(TauSetting::Auto);
    }
    let v: f64 = raw
        .parse()
        .map_err(|_| format!("expected \"auto\" or a positive number, got {raw:?}"))?;
    if v > 0.0 && v.is_finite() {
        Ok(TauSetting::Fixed(v))
    } else {
        Err(format!("tau must be positive, got {v}"))
    }
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

fn derived_path(base: &Path, suffix: &str) -> PathBuf {
    let text = base.to_string_lossy();
    let stem = text
        .strip_suffix(".csv")
        .or_else(|| text.strip_suffix(".json"))
        .unwrap_or(&text);
    PathBuf::from(format!("{stem}{suffix}"))
}

fn save_dataset(
    ds: &LabeledDataset,
    out: &Path,
    mask_out: Option<&Path>,
) -> CliResult<(PathBuf, PathBuf)> {
    let mut data_bytes = Vec::new();
    write_matrix_csv(&mut data_bytes, ds)
        .map_err(|e| CliError::Runtime(format!("serialize dataset: {e}")))?;
    write_text(out, &String::from_utf8(data_bytes).expect("csv is utf-8"))?;

    let mask_path = mask_out
        .map(Path::to_path_buf)
        .unwrap_or_else(|| derived_path(out, ".mask.csv"));
    let mut mask_bytes = Vec::new();
    write_mask_csv(&mut mask_bytes, ds.outlier_mask())
        .map_err(|e| CliError::Runtime(format!("serialize mask: {e}")))?;
    write_text(&mask_path, &String::from_utf8(mask_bytes).expect("csv is utf-8"))?;
    Ok((out.to_path_buf(), mask_path))
}

fn cmd_synth(args: &SynthArgs, json: bool) -> CliResult<()> {
    let (category, n_outliers, magnitude) = match args.outliers {
        Some((c, n, m)) => (c, n, m),
        None => (OutlierCategory::None, 0, 1.0),
    };
    let spec = ToySpec {
        n_normal: args.n,
        correlation: args.corr,
        outlier_category: category,
        n_outliers,
        magnitude,
        rng_seed: args.seed,
    };
    let ds = gen_toy(&spec)?;
    let (data_path, mask_path) = save_dataset(&ds, &args.out, args.mask_out.as_deref())?;
    eprintln!(
        "wrote {} samples ({} outliers) to {}",
        ds.n(),
        n_outliers,
        data_path.display()
    );
    if json {
        println!(
            "{}",
            serde_json::json!({
                "dataset": data_path,
                "mask": mask_path,
                "n": ds.n(),
                "d": ds.d(),
                "seed": args.seed,
            })
        );
    }
    Ok(())
}

fn cmd_contaminate(args: &ContaminateArgs, json: bool) -> CliResult<()> {
    preflight(&args.input)?;
    let loaded = load_csv(&args.input, args.labels)?;
    let ds = match &args.mask {
        Some(path) => {
            preflight(path)?;
            let mask = load_mask_csv(path)?;
            LabeledDataset::new(
                loaded.data().clone(),
                loaded.labels().map(<[i64]>::to_vec),
                mask,
            )?
        }
        None => loaded,
    };
    let out = match args.mode {
        ContaminateMode::Tabular => {
            let mode = if args.per_feature {
                rpca::harness::FactorDrawMode::PerFeature
            } else {
                rpca::harness::FactorDrawMode::PerSample
            };
            rpca::harness::contaminate_tabular(&ds, args.fraction, &args.factors, mode, args.seed)?
        }
        ContaminateMode::Image => {
            let shape = args.image_shape.ok_or_else(|| {
                CliError::Validation("--image-shape is required in image mode".into())
            })?;
            rpca::harness::contaminate_images(
                &ds,
                shape,
                args.fraction,
                args.block_ratio,
                args.seed,
            )?
        }
    };
    let (data_path, mask_path) = save_dataset(&out, &args.out, args.mask_out.as_deref())?;
    let flagged = out.outlier_mask().iter().filter(|&&m| m).count();
    eprintln!(
        "contaminated {flagged}/{} samples, wrote {}",
        out.n(),
        data_path.display()
    );
    if json {
        println!(
            "{}",
            serde_json::json!({
                "dataset": data_path,
                "mask": mask_path,
                "contaminated": flagged,
                "n": out.n(),
                "seed": args.seed,
            })
        );
    }
    Ok(())
}

/// The document written by `fit` and accepted back by `transform`.
#[derive(Serialize, Deserialize)]
struct FitDocument {
    method: String,
    seed: u64,
    config: SolverConfig,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    p: Option<f64>,
    model: SubspaceModel,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    weights: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    converged: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    iterations: Option<usize>,
    train_reconstruction_error: f64,
    centered: bool,
}

fn cmd_fit(args: &FitArgs, json: bool, strict: bool) -> CliResult<()> {
    preflight(&args.input)?;
    let ds = load_csv(&args.input, args.labels)?;

    let mut spec = MethodSpec::bare(args.method);
    spec.tau_a = args.tau_a;
    spec.tau_b = args.tau_b;
    spec.tau_c = args.tau_c;
    spec.freeze_tau = args.freeze_tau;
    spec.p = args.p;
    spec.max_iterations = Some(args.max_iter);
    spec.subspace_tolerance = Some(args.subspace_tol);
    spec.weight_tolerance = Some(args.weight_tol);
    spec.centered = args.centered;

    let fitted = experiments::fit_method(&spec, ds.data(), args.k, args.seed)?;
    if strict && fitted.converged == Some(false) {
        return Err(CliError::Runtime(format!(
            "{} did not converge within {} iterations",
            args.method.as_str(),
            args.max_iter
        )));
    }
    let centered = spec.centered();
    let train_err = recon_error(&fitted.model, ds.data(), centered)?;

    let doc = FitDocument {
        method: args.method.as_str().to_string(),
        seed: args.seed,
        config: spec.solver_config(args.k, args.seed),
        p: if args.method == MethodName::L2pPca {
            Some(args.p.unwrap_or(1.0))
        } else {
            None
        },
        model: fitted.model,
        weights: fitted.weights.map(|w| w.entries().to_vec()),
        converged: fitted.converged,
        iterations: fitted.iterations,
        train_reconstruction_error: train_err,
        centered,
    };
    let text = serde_json::to_string_pretty(&doc).expect("fit document serializes");
    write_text(&args.out, &format!("{text}\n"))?;

    if let Some(trace) = &fitted.trace {
        let trace_path = args
            .trace_out
            .clone()
            .unwrap_or_else(|| derived_path(&args.out, ".trace.json"));
        let trace_text = serde_json::to_string_pretty(trace).expect("trace serializes");
        write_text(&trace_path, &format!("{trace_text}\n"))?;
        eprintln!("wrote trace to {}", trace_path.display());
    }
    eprintln!(
        "fitted {} k={} ({} iterations, converged: {}), train error {:.6}",
        args.method.as_str(),
        args.k,
        doc.iterations.map_or("-".to_string(), |i| i.to_string()),
        doc.converged.map_or("-".to_string(), |c| c.to_string()),
        train_err
    );
    if json {
        println!("{text}");
    }
    Ok(())
}

fn cmd_transform(args: &TransformArgs, json: bool) -> CliResult<()> {
    preflight(&args.model)?;
    preflight(&args.input)?;
    let raw = fs::read_to_string(&args.model)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", args.model.display())))?;
    let value: serde_json::Value = serde_json::from_str(&raw)
        .map_err(|e| CliError::Validation(format!("bad model JSON: {e}")))?;
    let model_value = value.get("model").cloned().unwrap_or(value);
    let model: SubspaceModel = serde_json::from_value(model_value)
        .map_err(|e| CliError::Validation(format!("bad model JSON: {e}")))?;

    let ds = load_csv(&args.input, args.labels)?;
    let features = project(&model, ds.data())?;

    let mut text = String::new();
    for j in 0..ds.n() {
        let mut parts: Vec<String> = (0..model.k())
            .map(|i| format!("{}", features[[i, j]]))
            .collect();
        if let Some(labels) = ds.labels() {
            parts.push(labels[j].to_string());
        }
        text.push_str(&parts.join(","));
        text.push('\n');
    }
    write_text(&args.out, &text)?;
    eprintln!(
        "projected {} samples to {} dimensions -> {}",
        ds.n(),
        model.k(),
        args.out.display()
    );
    if json {
        println!(
            "{}",
            serde_json::json!({"features": args.out, "n": ds.n(), "k": model.k()})
        );
    }
    Ok(())
}

fn cmd_eval(args: &EvalArgs, json: bool) -> CliResult<()> {
    preflight(&args.config)?;
    let raw = fs::read_to_string(&args.config)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", args.config.display())))?;
    let value: serde_json::Value = serde_json::from_str(&raw)
        .map_err(|e| CliError::Validation(format!("bad config JSON: {e}")))?;
    let config_value = value.get("config").cloned().unwrap_or(value);
    let config: ExperimentConfig = serde_json::from_value(config_value)
        .map_err(|e| CliError::Validation(format!("bad config JSON: {e}")))?;

    let output = run_eval(&config)?;

    let text = serde_json::to_string_pretty(&output).expect("report serializes");
    write_text(&args.out, &format!("{text}\n"))?;
    eprintln!(
        "evaluated {} cells -> {}",
        output.results.len(),
        args.out.display()
    );

    if let Some(csv_path) = &args.csv {
        let mut bytes = Vec::new();
        write_reports_csv(&mut bytes, &output.results)
            .map_err(|e| CliError::Runtime(format!("serialize csv: {e}")))?;
        write_text(csv_path, &String::from_utf8(bytes).expect("csv is utf-8"))?;
        eprintln!("wrote long-format csv to {}", csv_path.display());
    }
    if json {
        println!("{text}");
    }
    Ok(())
}

fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Synth(args) => cmd_synth(args, cli.json),
        Command::Contaminate(args) => cmd_contaminate(args, cli.json),
        Command::Fit(args) => cmd_fit(args, cli.json, cli.strict),
        Command::Transform(args) => cmd_transform(args, cli.json),
        Command::Eval(args) => cmd_eval(args, cli.json),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
