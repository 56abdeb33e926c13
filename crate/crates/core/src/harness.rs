//! Synthetic data generation, outlier injection, and file ingestion.
//!
//! Everything here is a pure function of its inputs and the seed; the RNG
//! stack is pinned (see [`crate::rng`]) and the draw order is part of the
//! contract, so a (spec, seed) pair maps to one bit-exact dataset forever.
//! Golden seed→checksum fixtures live in the crate tests.

use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SeedRng;
use crate::types::DataMatrix;

/// A dataset with optional class labels and a per-sample outlier flag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledDataset {
    data: DataMatrix,
    labels: Option<Vec<i64>>,
    outlier_mask: Vec<bool>,
}

impl LabeledDataset {
    pub fn new(data: DataMatrix, labels: Option<Vec<i64>>, outlier_mask: Vec<bool>) -> Result<Self> {
        let n = data.n();
        if outlier_mask.len() != n {
            return Err(Error::LengthMismatch {
                left: outlier_mask.len(),
                right: n,
            });
        }
        if let Some(ref l) = labels {
            if l.len() != n {
                return Err(Error::LengthMismatch { left: l.len(), right: n });
            }
        }
        Ok(Self {
            data,
            labels,
            outlier_mask,
        })
    }

    /// Dataset with no labels and an all-clear mask.
    pub fn unlabeled(data: DataMatrix) -> Self {
        let n = data.n();
        Self {
            data,
            labels: None,
            outlier_mask: vec![false; n],
        }
    }

    pub fn data(&self) -> &DataMatrix {
        &self.data
    }

    pub fn labels(&self) -> Option<&[i64]> {
        self.labels.as_deref()
    }

    pub fn outlier_mask(&self) -> &[bool] {
        &self.outlier_mask
    }

    pub fn n(&self) -> usize {
        self.data.n()
    }

    pub fn d(&self) -> usize {
        self.data.d()
    }

    /// Column-wise concatenation. Labels survive only if every part has them.
    pub fn concat(parts: &[&LabeledDataset]) -> Result<LabeledDataset> {
        if parts.is_empty() {
            return Err(Error::EmptyMatrix);
        }
        let d = parts[0].d();
        let total: usize = parts.iter().map(|p| p.n()).sum();
        let mut values = Array2::zeros((d, total));
        let mut mask = Vec::with_capacity(total);
        let mut labels = Some(Vec::with_capacity(total));
        let mut col = 0;
        for part in parts {
            if part.d() != d {
                return Err(Error::InconsistentDimensions {
                    context: format!("cannot concat d={} with d={}", d, part.d()),
                });
            }
            for j in 0..part.n() {
                for i in 0..d {
                    values[[i, col]] = part.data.values()[[i, j]];
                }
                col += 1;
            }
            mask.extend_from_slice(&part.outlier_mask);
            match (&mut labels, part.labels()) {
                (Some(acc), Some(l)) => acc.extend_from_slice(l),
                _ => labels = None,
            }
        }
        LabeledDataset::new(DataMatrix::new(values)?, labels, mask)
    }
}

/// Which outlier construction to inject into toy data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutlierCategory {
    None,
    /// Far out along the population principal direction [1,1]/√2.
    Pcs,
    /// Far out along the orthogonal direction [1,−1]/√2.
    Ocs,
    /// 45° off both eigen-axes, alternating between [1,0] and [0,1].
    Both,
}

impl std::str::FromStr for OutlierCategory {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Self::None),
            "pcs" => Ok(Self::Pcs),
            "ocs" => Ok(Self::Ocs),
            "both" => Ok(Self::Both),
            other => Err(Error::config(format!(
                "unknown outlier category {other:?}; expected none|pcs|ocs|both"
            ))),
        }
    }
}

/// Recipe for the 2-D correlated-Gaussian toy dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToySpec {
    pub n_normal: usize,
    pub correlation: f64,
    pub outlier_category: OutlierCategory,
    pub n_outliers: usize,
    pub magnitude: f64,
    pub rng_seed: u64,
}

impl ToySpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_normal < 2 {
            return Err(Error::config("n_normal must be at least 2"));
        }
        if !(self.correlation > -1.0 && self.correlation < 1.0) {
            return Err(Error::InvalidCorrelation {
                value: self.correlation,
            });
        }
        if self.outlier_category == OutlierCategory::None && self.n_outliers > 0 {
            return Err(Error::config(
                "n_outliers must be 0 when outlier_category is none",
            ));
        }
        if self.n_outliers > 0 && !(self.magnitude > 0.0) {
            return Err(Error::config("magnitude must be positive"));
        }
        Ok(())
    }
}

/// Generates the toy dataset: `n_normal` bivariate normals with unit
/// marginals and the requested correlation, then `n_outliers` points placed
/// per category at distance `magnitude` from the origin. Draw order: per
/// normal sample two standard normals (x₁ = z₁, x₂ = ρ·z₁ + √(1−ρ²)·z₂);
/// outliers consume no randomness.
pub fn gen_toy(spec: &ToySpec) -> Result<LabeledDataset> {
    spec.validate()?;
    let mut rng = SeedRng::new(spec.rng_seed);
    let n = spec.n_normal + spec.n_outliers;
    let mut values = Array2::zeros((2, n));
    let rho = spec.correlation;
    let ortho = (1.0 - rho * rho).sqrt();
    for j in 0..spec.n_normal {
        let z1 = rng.next_normal();
        let z2 = rng.next_normal();
        values[[0, j]] = z1;
        values[[1, j]] = rho * z1 + ortho * z2;
    }
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    for idx in 0..spec.n_outliers {
        let j = spec.n_normal + idx;
        let (dx, dy) = match spec.outlier_category {
            OutlierCategory::None => unreachable!("validated above"),
            OutlierCategory::Pcs => (inv_sqrt2, inv_sqrt2),
            OutlierCategory::Ocs => (inv_sqrt2, -inv_sqrt2),
            OutlierCategory::Both => {
                if idx % 2 == 0 {
                    (1.0, 0.0)
                } else {
                    (0.0, 1.0)
                }
            }
        };
        values[[0, j]] = spec.magnitude * dx;
        values[[1, j]] = spec.magnitude * dy;
    }
    let mut mask = vec![false; n];
    for flag in mask.iter_mut().skip(spec.n_normal) {
        *flag = true;
    }
    LabeledDataset::new(DataMatrix::new(values)?, None, mask)
}

/// How amplification factors are drawn for contaminated samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorDrawMode {
    /// One factor per contaminated sample, applied to all its selected
    /// features.
    #[default]
    PerSample,
    /// An independent factor per selected feature.
    PerFeature,
}

/// Turns ⌊fraction·n⌋ randomly chosen samples into outliers by amplifying
/// ⌊d/2⌋ randomly chosen features. Draw order: sample selection, then per
/// selected sample (ascending index) its feature subset, then its factor(s).
pub fn contaminate_tabular(
    ds: &LabeledDataset,
    fraction: f64,
    factors: &[f64],
    mode: FactorDrawMode,
    seed: u64,
) -> Result<LabeledDataset> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::FractionOutOfRange { value: fraction });
    }
    if factors.is_empty() {
        return Err(Error::config("factor set must be nonempty"));
    }
    let (d, n) = (ds.d(), ds.n());
    let count = (fraction * n as f64).floor() as usize;
    let mut rng = SeedRng::new(seed);
    let selected = rng.choose_indices(n, count);

    let mut values = ds.data().values().clone();
    let mut mask = ds.outlier_mask().to_vec();
    for &j in &selected {
        let features = rng.choose_indices(d, d / 2);
        match mode {
            FactorDrawMode::PerSample => {
                let factor = factors[rng.next_index(factors.len())];
                for &i in &features {
                    values[[i, j]] *= factor;
                }
            }
            FactorDrawMode::PerFeature => {
                for &i in &features {
                    let factor = factors[rng.next_index(factors.len())];
                    values[[i, j]] *= factor;
                }
            }
        }
        mask[j] = true;
    }
    LabeledDataset::new(DataMatrix::new(values)?, ds.labels.clone(), mask)
}

/// Corrupts ⌊fraction·n⌋ randomly chosen images with a square block of
/// salt-and-pepper noise. The block side is ⌊√(ratio·h·w)⌋ clamped to
/// [1, min(h,w)], its position uniform among placements fully inside the
/// image, and every block pixel is independently set to the image's own
/// minimum or maximum intensity with equal probability. Images are stored
/// row-major (pixel (r, c) at index r·w + c). Draw order: sample selection,
/// then per selected sample (ascending index) top row, left column, then the
/// block pixels row-major.
pub fn contaminate_images(
    ds: &LabeledDataset,
    image_shape: (usize, usize),
    fraction: f64,
    block_area_ratio: f64,
    seed: u64,
) -> Result<LabeledDataset> {
    let (h, w) = image_shape;
    if h * w != ds.d() {
        return Err(Error::ShapeMismatch {
            height: h,
            width: w,
            d: ds.d(),
        });
    }
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::FractionOutOfRange { value: fraction });
    }
    if !(block_area_ratio > 0.0 && block_area_ratio <= 1.0) {
        return Err(Error::config(format!(
            "block_area_ratio must lie in (0, 1], got {block_area_ratio}"
        )));
    }
    let side = ((block_area_ratio * (h * w) as f64).sqrt().floor() as usize)
        .clamp(1, h.min(w));
    let n = ds.n();
    let count = (fraction * n as f64).floor() as usize;
    let mut rng = SeedRng::new(seed);
    let selected = rng.choose_indices(n, count);

    let mut values = ds.data().values().clone();
    let mut mask = ds.outlier_mask().to_vec();
    for &j in &selected {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..ds.d() {
            lo = lo.min(values[[i, j]]);
            hi = hi.max(values[[i, j]]);
        }
        let row0 = rng.next_index(h - side + 1);
        let col0 = rng.next_index(w - side + 1);
        for r in row0..row0 + side {
            for c in col0..col0 + side {
                let v = if rng.next_index(2) == 0 { lo } else { hi };
                values[[r * w + c, j]] = v;
            }
        }
        mask[j] = true;
    }
    LabeledDataset::new(DataMatrix::new(values)?, ds.labels.clone(), mask)
}

// ---------------------------------------------------------------------------
// File ingestion / export
// ---------------------------------------------------------------------------

fn io_err(path: &Path, source: io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Loads a numeric CSV with one sample per row (RFC-4180 subset: `.` decimal,
/// no quoting). With `has_labels`, the final column is an integer class
/// label.
pub fn load_csv(path: &Path, has_labels: bool) -> Result<LabeledDataset> {
    let file = fs::File::open(path).map_err(|e| io_err(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(file);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut labels: Vec<i64> = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let line = idx + 1;
        let record = record.map_err(|e| Error::ParseError {
            location: format!("{}:{}", path.display(), line),
            message: e.to_string(),
        })?;
        let mut fields: Vec<&str> = record.iter().collect();
        if has_labels {
            let raw = fields.pop().ok_or_else(|| Error::ParseError {
                location: format!("{}:{}", path.display(), line),
                message: "missing label column".into(),
            })?;
            let label: i64 = raw.parse().map_err(|_| Error::ParseError {
                location: format!("{}:{}", path.display(), line),
                message: format!("bad integer label {raw:?}"),
            })?;
            labels.push(label);
        }
        let mut row = Vec::with_capacity(fields.len());
        for (col, raw) in fields.iter().enumerate() {
            let v: f64 = raw.parse().map_err(|_| Error::ParseError {
                location: format!("{}:{} column {}", path.display(), line, col + 1),
                message: format!("bad number {raw:?}"),
            })?;
            row.push(v);
        }
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::ParseError {
                    location: format!("{}:{}", path.display(), line),
                    message: format!("row has {} values, expected {}", row.len(), first.len()),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::ParseError {
            location: path.display().to_string(),
            message: "file contains no samples".into(),
        });
    }
    let data = DataMatrix::from_sample_rows(&rows)?;
    let n = data.n();
    LabeledDataset::new(data, if has_labels { Some(labels) } else { None }, vec![false; n])
}

/// Loads a 0/1 outlier mask, one value per row.
pub fn load_mask_csv(path: &Path) -> Result<Vec<bool>> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut mask = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        match trimmed {
            "0" => mask.push(false),
            "1" => mask.push(true),
            other => {
                return Err(Error::ParseError {
                    location: format!("{}:{}", path.display(), idx + 1),
                    message: format!("bad mask value {other:?}, expected 0 or 1"),
                })
            }
        }
    }
    Ok(mask)
}

/// Writes samples as CSV rows (shortest round-trip float formatting); labels,
/// when present, become a final integer column.
pub fn write_matrix_csv<W: Write>(out: &mut W, ds: &LabeledDataset) -> io::Result<()> {
    let x = ds.data().values();
    for j in 0..ds.n() {
        let mut parts: Vec<String> = (0..ds.d()).map(|i| format!("{}", x[[i, j]])).collect();
        if let Some(labels) = ds.labels() {
            parts.push(labels[j].to_string());
        }
        writeln!(out, "{}", parts.join(","))?;
    }
    Ok(())
}

pub fn write_mask_csv<W: Write>(out: &mut W, mask: &[bool]) -> io::Result<()> {
    for &flag in mask {
        writeln!(out, "{}", if flag { 1 } else { 0 })?;
    }
    Ok(())
}

/// Loads every binary PGM (P5, 8-bit) under a directory as one sample per
/// image, scaled to [0,1] and bilinearly resized to `target_shape`.
///
/// If the directory contains subdirectories, each subdirectory is a class and
/// its name order (lexicographic) defines the label numbering; otherwise the
/// images are unlabeled. File order within a directory is lexicographic.
pub fn load_pgm_dir(path: &Path, target_shape: (usize, usize)) -> Result<LabeledDataset> {
    let (th, tw) = target_shape;
    if th == 0 || tw == 0 {
        return Err(Error::config("target shape must be nonzero"));
    }
    let mut class_dirs: Vec<std::path::PathBuf> = Vec::new();
    let mut loose_files: Vec<std::path::PathBuf> = Vec::new();
    for entry in fs::read_dir(path).map_err(|e| io_err(path, e))? {
        let entry = entry.map_err(|e| io_err(path, e))?;
        let p = entry.path();
        if p.is_dir() {
            class_dirs.push(p);
        } else if p.extension().map(|e| e == "pgm").unwrap_or(false) {
            loose_files.push(p);
        }
    }
    class_dirs.sort();
    loose_files.sort();

    let mut columns: Vec<Vec<f64>> = Vec::new();
    let mut labels: Vec<i64> = Vec::new();
    if !class_dirs.is_empty() {
        for (class, dir) in class_dirs.iter().enumerate() {
            let mut files: Vec<std::path::PathBuf> = fs::read_dir(dir)
                .map_err(|e| io_err(dir, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().map(|e| e == "pgm").unwrap_or(false))
                .collect();
            files.sort();
            for file in files {
                columns.push(load_pgm_image(&file, target_shape)?);
                labels.push(class as i64);
            }
        }
    } else {
        for file in &loose_files {
            columns.push(load_pgm_image(file, target_shape)?);
        }
    }
    if columns.is_empty() {
        return Err(Error::ParseError {
            location: path.display().to_string(),
            message: "no PGM files found".into(),
        });
    }
    let (d, n) = (th * tw, columns.len());
    let mut values = Array2::zeros((d, n));
    for (j, col) in columns.iter().enumerate() {
        for (i, &v) in col.iter().enumerate() {
            values[[i, j]] = v;
        }
    }
    let labels = if class_dirs.is_empty() { None } else { Some(labels) };
    LabeledDataset::new(DataMatrix::new(values)?, labels, vec![false; n])
}

fn load_pgm_image(path: &Path, target_shape: (usize, usize)) -> Result<Vec<f64>> {
    let mut bytes = Vec::new();
    fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| io_err(path, e))?;
    let parse_err = |message: String| Error::ParseError {
        location: path.display().to_string(),
        message,
    };

    // header: magic, width, height, maxval as whitespace-separated tokens
    // with '#' comments, then one whitespace byte before the raster
    fn next_token(bytes: &[u8], pos: usize) -> Option<(usize, usize)> {
        let mut i = pos;
        loop {
            while i < bytes.len() && bytes[i].is_ascii_whitespace() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'#' {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
                continue;
            }
            break;
        }
        let start = i;
        while i < bytes.len() && !bytes[i].is_ascii_whitespace() && bytes[i] != b'#' {
            i += 1;
        }
        if start == i {
            None
        } else {
            Some((start, i))
        }
    }

    let (s, e) =
        next_token(&bytes, 0).ok_or_else(|| parse_err("missing magic number".into()))?;
    if &bytes[s..e] != b"P5" {
        return Err(parse_err(format!(
            "expected binary PGM magic P5, got {:?}",
            String::from_utf8_lossy(&bytes[s..e])
        )));
    }
    let mut pos = e;
    let mut dims = [0usize; 3];
    for slot in dims.iter_mut() {
        let (s, e) =
            next_token(&bytes, pos).ok_or_else(|| parse_err("truncated header".into()))?;
        let text = std::str::from_utf8(&bytes[s..e]).map_err(|_| parse_err("bad header".into()))?;
        *slot = text
            .parse()
            .map_err(|_| parse_err(format!("bad header field {text:?}")))?;
        pos = e;
    }
    let (w, h, maxval) = (dims[0], dims[1], dims[2]);
    if w == 0 || h == 0 {
        return Err(parse_err("zero image dimensions".into()));
    }
    if maxval == 0 || maxval > 255 {
        return Err(parse_err(format!("only 8-bit PGM supported, maxval {maxval}")));
    }
    pos += 1; // the single whitespace separating header and raster
    if bytes.len() < pos + w * h {
        return Err(parse_err(format!(
            "raster truncated: need {} bytes, have {}",
            w * h,
            bytes.len().saturating_sub(pos)
        )));
    }
    let raster = &bytes[pos..pos + w * h];
    let scale = 1.0 / maxval as f64;
    let pixels: Vec<f64> = raster.iter().map(|&b| b as f64 * scale).collect();
    Ok(resize_bilinear(&pixels, (h, w), target_shape))
}

/// Bilinear resampling with half-pixel centers.
fn resize_bilinear(src: &[f64], src_shape: (usize, usize), dst_shape: (usize, usize)) -> Vec<f64> {
    let (sh, sw) = src_shape;
    let (dh, dw) = dst_shape;
    if (sh, sw) == (dh, dw) {
        return src.to_vec();
    }
    let mut dst = vec![0.0; dh * dw];
    for r in 0..dh {
        let sy = ((r as f64 + 0.5) * sh as f64 / dh as f64 - 0.5).clamp(0.0, (sh - 1) as f64);
        let y0 = sy.floor() as usize;
        let y1 = (y0 + 1).min(sh - 1);
        let fy = sy - y0 as f64;
        for c in 0..dw {
            let sx = ((c as f64 + 0.5) * sw as f64 / dw as f64 - 0.5).clamp(0.0, (sw - 1) as f64);
            let x0 = sx.floor() as usize;
            let x1 = (x0 + 1).min(sw - 1);
            let fx = sx - x0 as f64;
            let top = src[y0 * sw + x0] * (1.0 - fx) + src[y0 * sw + x1] * fx;
            let bottom = src[y1 * sw + x0] * (1.0 - fx) + src[y1 * sw + x1] * fx;
            dst[r * dw + c] = top * (1.0 - fy) + bottom * fy;
        }
    }
    dst
}
