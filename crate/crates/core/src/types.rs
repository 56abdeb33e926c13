//! Shared domain types with validated invariants.
//!
//! Data is stored column-major in the sample sense: a [`DataMatrix`] is d×n
//! with one sample per column. Every type validates its invariants on
//! construction and on deserialization; once built, values are immutable and
//! safe to share across threads.

use ndarray::{Array1, Array2, ArrayView1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest linear-domain weight kept representable before log-domain
/// inversion; guards the open-simplex invariant against underflow.
pub const WEIGHT_FLOOR: f64 = 1e-300;

// ---------------------------------------------------------------------------
// DataMatrix
// ---------------------------------------------------------------------------

/// A d×n matrix of n samples in d dimensions, one sample per column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DataMatrixRepr", into = "DataMatrixRepr")]
pub struct DataMatrix {
    values: Array2<f64>,
}

#[derive(Serialize, Deserialize)]
struct DataMatrixRepr {
    d: usize,
    n: usize,
    /// Row-major nested rows (each row has n entries).
    values: Vec<Vec<f64>>,
}

impl DataMatrix {
    /// Validates a raw d×n matrix: rejects empty shapes and non-finite entries.
    pub fn new(values: Array2<f64>) -> Result<Self> {
        let (d, n) = values.dim();
        if d == 0 || n == 0 {
            return Err(Error::EmptyMatrix);
        }
        for ((row, col), &v) in values.indexed_iter() {
            if !v.is_finite() {
                return Err(Error::NonFiniteEntry { row, col });
            }
        }
        Ok(Self { values })
    }

    /// Builds a matrix from n sample rows of equal length d (transposes into
    /// the column-per-sample layout).
    pub fn from_sample_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::EmptyMatrix);
        }
        let d = rows[0].len();
        let n = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(Error::InconsistentDimensions {
                    context: format!("sample {} has {} features, expected {}", i, row.len(), d),
                });
            }
        }
        let mut values = Array2::zeros((d, n));
        for (j, row) in rows.iter().enumerate() {
            for (i, &v) in row.iter().enumerate() {
                values[[i, j]] = v;
            }
        }
        Self::new(values)
    }

    pub fn d(&self) -> usize {
        self.values.nrows()
    }

    pub fn n(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn sample(&self, j: usize) -> ArrayView1<'_, f64> {
        self.values.column(j)
    }

    /// X − m·1ᵀ.
    pub fn centered(&self, mean: &Array1<f64>) -> Array2<f64> {
        let mut out = self.values.clone();
        for mut col in out.columns_mut() {
            col -= mean;
        }
        out
    }
}

impl TryFrom<DataMatrixRepr> for DataMatrix {
    type Error = Error;

    fn try_from(repr: DataMatrixRepr) -> Result<Self> {
        if repr.values.len() != repr.d {
            return Err(Error::InconsistentDimensions {
                context: format!("declared d={} but {} rows present", repr.d, repr.values.len()),
            });
        }
        let mut flat = Vec::with_capacity(repr.d * repr.n);
        for (i, row) in repr.values.iter().enumerate() {
            if row.len() != repr.n {
                return Err(Error::InconsistentDimensions {
                    context: format!("row {} has {} entries, expected n={}", i, row.len(), repr.n),
                });
            }
            flat.extend_from_slice(row);
        }
        let values = Array2::from_shape_vec((repr.d, repr.n), flat)
            .map_err(|e| Error::config(format!("bad matrix shape: {e}")))?;
        DataMatrix::new(values)
    }
}

impl From<DataMatrix> for DataMatrixRepr {
    fn from(m: DataMatrix) -> Self {
        let (d, n) = m.values.dim();
        let values = m.values.rows().into_iter().map(|r| r.to_vec()).collect();
        DataMatrixRepr { d, n, values }
    }
}

// ---------------------------------------------------------------------------
// WeightVector
// ---------------------------------------------------------------------------

/// n per-sample weights on the interior of the probability simplex.
///
/// Entries are stored in the linear domain; [`WeightVector::log_entries`]
/// exposes the log domain used by the weight-merging step. In exact
/// arithmetic every entry lies strictly inside (0, 1); in floating point the
/// upper bound is closed because extreme score spreads round the dominant
/// weight to exactly 1.0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct WeightVector {
    entries: Array1<f64>,
}

impl WeightVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyMatrix);
        }
        for (i, &w) in entries.iter().enumerate() {
            if !w.is_finite() || w <= 0.0 || w > 1.0 {
                return Err(Error::config(format!(
                    "weight {} out of the open simplex: {}",
                    i, w
                )));
            }
        }
        let sum: f64 = entries.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::config(format!("weights sum to {sum}, expected 1")));
        }
        Ok(Self {
            entries: Array1::from_vec(entries),
        })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyMatrix);
        }
        Ok(Self {
            entries: Array1::from_elem(n, 1.0 / n as f64),
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &Array1<f64> {
        &self.entries
    }

    /// Natural logs of the entries, floored at [`WEIGHT_FLOOR`] so the
    /// inverse-product merge stays finite.
    pub fn log_entries(&self) -> Array1<f64> {
        self.entries.mapv(|w| w.max(WEIGHT_FLOOR).ln())
    }

    /// ‖self − other‖₁, the convergence metric for weight iterates.
    pub fn l1_distance(&self, other: &WeightVector) -> f64 {
        self.entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| (a - b).abs())
            .sum()
    }
}

impl TryFrom<Vec<f64>> for WeightVector {
    type Error = Error;

    fn try_from(entries: Vec<f64>) -> Result<Self> {
        WeightVector::new(entries)
    }
}

impl From<WeightVector> for Vec<f64> {
    fn from(w: WeightVector) -> Self {
        w.entries.to_vec()
    }
}

// ---------------------------------------------------------------------------
// SubspaceModel
// ---------------------------------------------------------------------------

/// A fitted subspace: semi-orthogonal projection matrix P (d×k) and mean
/// vector m (length d).
///
/// Serializes with keys `projection` (row-major nested arrays), `mean`, `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SubspaceModelRepr", into = "SubspaceModelRepr")]
pub struct SubspaceModel {
    projection: Array2<f64>,
    mean: Array1<f64>,
}

#[derive(Serialize, Deserialize)]
struct SubspaceModelRepr {
    projection: Vec<Vec<f64>>,
    mean: Vec<f64>,
    k: usize,
}

impl SubspaceModel {
    /// Validates semi-orthogonality: ‖PᵀP − I‖_F must be at most 1e-8.
    pub fn new(projection: Array2<f64>, mean: Array1<f64>) -> Result<Self> {
        let (d, k) = projection.dim();
        if k < 1 || k > d {
            return Err(Error::RankRequestTooLarge { k, max: d });
        }
        if mean.len() != d {
            return Err(Error::dim(format!(
                "mean has length {}, projection has {} rows",
                mean.len(),
                d
            )));
        }
        for &v in projection.iter().chain(mean.iter()) {
            if !v.is_finite() {
                return Err(Error::config("non-finite entry in subspace model"));
            }
        }
        let gram = projection.t().dot(&projection);
        let mut err = 0.0;
        for i in 0..k {
            for j in 0..k {
                let target = if i == j { 1.0 } else { 0.0 };
                err += (gram[[i, j]] - target).powi(2);
            }
        }
        if err.sqrt() > 1e-8 {
            return Err(Error::config(format!(
                "projection is not semi-orthogonal: ||P'P - I||_F = {:e}",
                err.sqrt()
            )));
        }
        Ok(Self { projection, mean })
    }

    pub fn d(&self) -> usize {
        self.projection.nrows()
    }

    pub fn k(&self) -> usize {
        self.projection.ncols()
    }

    pub fn projection(&self) -> &Array2<f64> {
        &self.projection
    }

    pub fn mean(&self) -> &Array1<f64> {
        &self.mean
    }

    /// The projector PPᵀ; basis- and sign-independent representation of the
    /// subspace.
    pub fn projector(&self) -> Array2<f64> {
        self.projection.dot(&self.projection.t())
    }
}

impl TryFrom<SubspaceModelRepr> for SubspaceModel {
    type Error = Error;

    fn try_from(repr: SubspaceModelRepr) -> Result<Self> {
        let d = repr.projection.len();
        if d == 0 {
            return Err(Error::EmptyMatrix);
        }
        let mut flat = Vec::with_capacity(d * repr.k);
        for (i, row) in repr.projection.iter().enumerate() {
            if row.len() != repr.k {
                return Err(Error::InconsistentDimensions {
                    context: format!("projection row {} has {} entries, expected k={}", i, row.len(), repr.k),
                });
            }
            flat.extend_from_slice(row);
        }
        let projection = Array2::from_shape_vec((d, repr.k), flat)
            .map_err(|e| Error::config(format!("bad projection shape: {e}")))?;
        SubspaceModel::new(projection, Array1::from_vec(repr.mean))
    }
}

impl From<SubspaceModel> for SubspaceModelRepr {
    fn from(m: SubspaceModel) -> Self {
        let k = m.k();
        let projection = m.projection.rows().into_iter().map(|r| r.to_vec()).collect();
        SubspaceModelRepr {
            projection,
            mean: m.mean.to_vec(),
            k,
        }
    }
}

// ---------------------------------------------------------------------------
// SolverConfig
// ---------------------------------------------------------------------------

/// Temperature hyperparameter: a fixed positive value, or `auto` to rescale
/// by the mean score each time weights are computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TauSetting {
    Auto,
    Fixed(f64),
}

impl Serialize for TauSetting {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            TauSetting::Auto => s.serialize_str("auto"),
            TauSetting::Fixed(v) => s.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for TauSetting {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;

        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Number(f64),
        }

        match Raw::deserialize(d)? {
            Raw::Text(t) if t == "auto" => Ok(TauSetting::Auto),
            Raw::Text(t) => Err(D::Error::custom(format!(
                "expected \"auto\" or a positive number, got {t:?}"
            ))),
            Raw::Number(v) if v > 0.0 && v.is_finite() => Ok(TauSetting::Fixed(v)),
            Raw::Number(v) => Err(D::Error::custom(format!("tau must be positive, got {v}"))),
        }
    }
}

/// Hyperparameters for the iterative weighted solvers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub k: usize,
    pub tau_a: TauSetting,
    pub tau_b: TauSetting,
    pub tau_c: TauSetting,
    pub max_iterations: usize,
    pub subspace_tolerance: f64,
    pub weight_tolerance: f64,
    /// When true, the auto temperatures are resolved on the first iteration
    /// and reused; by default they are recomputed every iteration.
    pub freeze_tau: bool,
    pub rng_seed: u64,
}

impl SolverConfig {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 1 {
            return Err(Error::RankRequestTooLarge { k: self.k, max: 0 });
        }
        for (name, tau) in [("tau_a", self.tau_a), ("tau_b", self.tau_b), ("tau_c", self.tau_c)] {
            if let TauSetting::Fixed(v) = tau {
                if !(v > 0.0) || !v.is_finite() {
                    let _ = name;
                    return Err(Error::NonPositiveTau { value: v });
                }
            }
        }
        if self.max_iterations < 1 {
            return Err(Error::config("max_iterations must be at least 1"));
        }
        if !(self.subspace_tolerance > 0.0) || !(self.weight_tolerance > 0.0) {
            return Err(Error::config("tolerances must be strictly positive"));
        }
        Ok(())
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            k: 1,
            tau_a: TauSetting::Auto,
            tau_b: TauSetting::Auto,
            tau_c: TauSetting::Auto,
            max_iterations: 100,
            subspace_tolerance: 1e-6,
            weight_tolerance: 1e-8,
            freeze_tau: false,
            rng_seed: 0,
        }
    }
}

// ---------------------------------------------------------------------------
// SolverTrace
// ---------------------------------------------------------------------------

/// One solver iteration: the mean and spectrum it produced plus the distances
/// to the previous iterate. `subspace_change` is absent on the first
/// iteration (there is no previous subspace). `objective` carries the
/// per-iteration objective of the reweighting baselines; the main solver
/// records the weighted variance instead.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub mean: Vec<f64>,
    pub eigenvalues: Vec<f64>,
    pub subspace_change: Option<f64>,
    pub weight_change: f64,
    pub weighted_variance: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub objective: Option<f64>,
    pub weights: Vec<f64>,
}

/// Per-iteration history of a fit. Iteration indices are strictly increasing
/// from 1.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<IterationRecord>", into = "Vec<IterationRecord>")]
pub struct SolverTrace {
    records: Vec<IterationRecord>,
}

impl SolverTrace {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a record, enforcing the strictly-increasing-from-1 indexing.
    pub fn push(&mut self, record: IterationRecord) -> Result<()> {
        let expected = self.records.len() + 1;
        if record.iteration != expected {
            return Err(Error::config(format!(
                "trace iteration {} out of order, expected {}",
                record.iteration, expected
            )));
        }
        self.records.push(record);
        Ok(())
    }

    pub fn records(&self) -> &[IterationRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

impl TryFrom<Vec<IterationRecord>> for SolverTrace {
    type Error = Error;

    fn try_from(records: Vec<IterationRecord>) -> Result<Self> {
        let mut trace = SolverTrace::new();
        for r in records {
            trace.push(r)?;
        }
        Ok(trace)
    }
}

impl From<SolverTrace> for Vec<IterationRecord> {
    fn from(t: SolverTrace) -> Self {
        t.records
    }
}
