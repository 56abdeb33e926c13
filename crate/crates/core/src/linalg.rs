//! Dense linear-algebra kernels: weighted mean, weighted scatter, symmetric
//! top-k eigendecomposition, projection and reconstruction.
//!
//! All operations are pure functions of their inputs. The eigendecomposition
//! always runs on the d×d scatter, never on the n×n Gram matrix, to keep the
//! O(nd²) cost profile of the solvers; when d > n this is suboptimal and
//! deliberately left that way.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::par::map_indexed;
use crate::types::{DataMatrix, SubspaceModel, WeightVector};

/// Top-k eigenpairs of a symmetric matrix: `values` descending, `vectors`
/// with orthonormal columns.
///
/// Sign convention: in each column the entry of largest magnitude is
/// nonnegative (ties broken by lowest row index), which pins an otherwise
/// arbitrary per-vector sign and makes traces reproducible.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    values: Vec<f64>,
    vectors: Array2<f64>,
}

impl EigenResult {
    fn new(values: Vec<f64>, vectors: Array2<f64>) -> Result<Self> {
        let (d, k) = vectors.dim();
        if values.len() != k || k == 0 || d < k {
            return Err(Error::dim(format!(
                "eigen result shape mismatch: {} values, vectors {}x{}",
                values.len(),
                d,
                k
            )));
        }
        for pair in values.windows(2) {
            if pair[0] < pair[1] {
                return Err(Error::config("eigenvalues not in descending order"));
            }
        }
        let gram = vectors.t().dot(&vectors);
        let mut err = 0.0f64;
        for i in 0..k {
            for j in 0..k {
                let target = if i == j { 1.0 } else { 0.0 };
                err += (gram[[i, j]] - target).powi(2);
            }
        }
        if err.sqrt() > 1e-8 {
            return Err(Error::config(format!(
                "eigenvectors not orthonormal: deviation {:e}",
                err.sqrt()
            )));
        }
        for col in vectors.columns() {
            let mut lead = 0;
            for (i, &x) in col.iter().enumerate() {
                if x.abs() > col[lead].abs() {
                    lead = i;
                }
            }
            if col[lead] < 0.0 {
                return Err(Error::config("eigenvector sign convention violated"));
            }
        }
        Ok(Self { values, vectors })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn vectors(&self) -> &Array2<f64> {
        &self.vectors
    }
}

/// Index of the entry with largest magnitude, lowest index on ties.
fn dominant_entry(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    best
}

/// Weighted sample mean Σᵢ wᵢ xᵢ = X·w.
pub fn weighted_mean(x: &DataMatrix, w: &WeightVector) -> Result<Array1<f64>> {
    if w.len() != x.n() {
        return Err(Error::dim(format!(
            "weight length {} vs sample count {}",
            w.len(),
            x.n()
        )));
    }
    Ok(x.values().dot(w.entries()))
}

/// Weighted scatter S = X·H·Xᵀ with H = diag(w) − w·wᵀ, computed in the
/// equivalent centered form Σᵢ wᵢ (xᵢ−m)(xᵢ−m)ᵀ with m = X·w so the result
/// is positive semidefinite by construction. The output is symmetrized by
/// averaging with its transpose to remove accumulation asymmetry.
pub fn weighted_scatter(x: &DataMatrix, w: &WeightVector) -> Result<Array2<f64>> {
    let m = weighted_mean(x, w)?;
    let mut y = x.centered(&m);
    for (mut col, &wi) in y.columns_mut().into_iter().zip(w.entries().iter()) {
        col *= wi.sqrt();
    }
    let s = y.dot(&y.t());
    let mut sym = s.clone();
    for i in 0..sym.nrows() {
        for j in 0..sym.ncols() {
            sym[[i, j]] = 0.5 * (s[[i, j]] + s[[j, i]]);
        }
    }
    Ok(sym)
}

/// The k largest eigenpairs of a symmetric d×d matrix.
///
/// The matrix must be symmetric within 1e-8 (relative to its largest entry);
/// it is averaged with its transpose before decomposition. Each returned pair
/// satisfies ‖S·v − λ·v‖₂ ≤ 1e-8·max(1, ‖S‖_F).
pub fn top_k_eigh(s: &Array2<f64>, k: usize) -> Result<EigenResult> {
    let (d, cols) = s.dim();
    if d != cols {
        return Err(Error::dim(format!("matrix is {d}x{cols}, expected square")));
    }
    if d == 0 {
        return Err(Error::EmptyMatrix);
    }
    if k < 1 || k > d {
        return Err(Error::RankRequestTooLarge { k, max: d });
    }
    let mut max_abs = 0.0f64;
    for ((row, col), &v) in s.indexed_iter() {
        if !v.is_finite() {
            return Err(Error::NonFiniteEntry { row, col });
        }
        max_abs = max_abs.max(v.abs());
    }
    let mut asym = 0.0f64;
    for i in 0..d {
        for j in (i + 1)..d {
            asym = asym.max((s[[i, j]] - s[[j, i]]).abs());
        }
    }
    if asym > 1e-8 * max_abs.max(1.0) {
        return Err(Error::NotSymmetric { max_asymmetry: asym });
    }

    let sym = Array2::from_shape_fn((d, d), |(i, j)| 0.5 * (s[[i, j]] + s[[j, i]]));
    let a = faer::Mat::from_fn(d, d, |i, j| sym[[i, j]]);
    let evd = a
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|_| Error::ConvergenceFailure { iterations: 0 })?;
    let lambda = evd.S();
    let u = evd.U();

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| lambda[j].partial_cmp(&lambda[i]).expect("finite eigenvalues"));

    let mut values = Vec::with_capacity(k);
    let mut vectors = Array2::zeros((d, k));
    for (out_col, &src) in order[..k].iter().enumerate() {
        values.push(lambda[src]);
        let mut col: Vec<f64> = (0..d).map(|i| u[(i, src)]).collect();
        let lead = dominant_entry(&col);
        if col[lead] < 0.0 {
            for v in &mut col {
                *v = -*v;
            }
        }
        for (i, &v) in col.iter().enumerate() {
            vectors[[i, out_col]] = v;
        }
    }

    let frob = s.iter().map(|v| v * v).sum::<f64>().sqrt();
    let budget = 1e-8 * frob.max(1.0);
    let mut residual = sym.dot(&vectors);
    for (j, &lam) in values.iter().enumerate() {
        let mut norm2 = 0.0;
        for i in 0..d {
            let r = residual[[i, j]] - lam * vectors[[i, j]];
            residual[[i, j]] = r;
            norm2 += r * r;
        }
        if norm2.sqrt() > budget {
            return Err(Error::ConvergenceFailure { iterations: 0 });
        }
    }

    EigenResult::new(values, vectors)
}

/// Pᵀ(X − m·1ᵀ): the k×n matrix of projected, centered samples.
pub fn project(model: &SubspaceModel, x: &DataMatrix) -> Result<Array2<f64>> {
    if model.d() != x.d() {
        return Err(Error::dim(format!(
            "model dimension {} vs data dimension {}",
            model.d(),
            x.d()
        )));
    }
    let (k, n) = (model.k(), x.n());
    let p = model.projection();
    let m = model.mean();
    let cols = map_indexed(n, |j| {
        let xj = x.sample(j);
        let mut out = vec![0.0; k];
        for (kk, slot) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for i in 0..model.d() {
                acc += p[[i, kk]] * (xj[i] - m[i]);
            }
            *slot = acc;
        }
        out
    });
    let mut z = Array2::zeros((k, n));
    for (j, col) in cols.iter().enumerate() {
        for (kk, &v) in col.iter().enumerate() {
            z[[kk, j]] = v;
        }
    }
    Ok(z)
}

/// P·Pᵀ(X − m·1ᵀ) + m·1ᵀ: samples reconstructed from their projections.
pub fn reconstruct(model: &SubspaceModel, x: &DataMatrix) -> Result<DataMatrix> {
    let z = project(model, x)?;
    let (d, n) = (model.d(), x.n());
    let p = model.projection();
    let m = model.mean();
    let cols = map_indexed(n, |j| {
        let mut out = vec![0.0; d];
        for (i, slot) in out.iter_mut().enumerate() {
            let mut acc = m[i];
            for kk in 0..model.k() {
                acc += p[[i, kk]] * z[[kk, j]];
            }
            *slot = acc;
        }
        out
    });
    let mut xr = Array2::zeros((d, n));
    for (j, col) in cols.iter().enumerate() {
        for (i, &v) in col.iter().enumerate() {
            xr[[i, j]] = v;
        }
    }
    DataMatrix::new(xr)
}

/// ‖P₁P₁ᵀ − P₂P₂ᵀ‖_F computed without forming the projectors. For
/// semi-orthogonal bases this equals
/// √(‖P₁ − P₂(P₂ᵀP₁)‖²_F + ‖P₂ − P₁(P₁ᵀP₂)‖²_F), a residual form that stays
/// accurate near zero where the trace identity k₁+k₂−2‖P₁ᵀP₂‖²_F cancels
/// catastrophically.
pub fn projector_distance(p1: &Array2<f64>, p2: &Array2<f64>) -> Result<f64> {
    if p1.nrows() != p2.nrows() {
        return Err(Error::dim(format!(
            "projector bases live in different spaces: {} vs {} rows",
            p1.nrows(),
            p2.nrows()
        )));
    }
    let cross = p2.t().dot(p1); // k2 x k1
    let r1 = p1 - &p2.dot(&cross);
    let r2 = p2 - &p1.dot(&cross.t());
    let sum: f64 = r1.iter().map(|v| v * v).sum::<f64>() + r2.iter().map(|v| v * v).sum::<f64>();
    Ok(sum.sqrt())
}

/// Largest principal angle (radians) between the column spans of two
/// semi-orthogonal bases of equal rank. Zero when the spans coincide.
pub fn largest_principal_angle(p1: &Array2<f64>, p2: &Array2<f64>) -> Result<f64> {
    if p1.dim() != p2.dim() {
        return Err(Error::dim(format!(
            "bases have shapes {:?} and {:?}",
            p1.dim(),
            p2.dim()
        )));
    }
    let cross = p1.t().dot(p2);
    let gram = cross.t().dot(&cross);
    let eig = top_k_eigh(&gram, gram.nrows())?;
    let smallest = eig.values().last().copied().unwrap_or(0.0);
    Ok(smallest.clamp(0.0, 1.0).sqrt().acos())
}

/// Orthonormalizes the columns of a matrix in place by modified Gram–Schmidt.
/// Columns that cancel to numerical zero are rejected.
pub fn orthonormalize_columns(m: &mut Array2<f64>) -> Result<()> {
    let (d, k) = m.dim();
    for j in 0..k {
        for prev in 0..j {
            let mut dot = 0.0;
            for i in 0..d {
                dot += m[[i, prev]] * m[[i, j]];
            }
            for i in 0..d {
                m[[i, j]] -= dot * m[[i, prev]];
            }
        }
        let norm = m.column(j).iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm <= 1e-12 {
            return Err(Error::DegenerateData);
        }
        for i in 0..d {
            m[[i, j]] /= norm;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedRng;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    fn matrix(values: Array2<f64>) -> DataMatrix {
        DataMatrix::new(values).unwrap()
    }

    fn random_data(d: usize, n: usize, seed: u64) -> DataMatrix {
        let mut rng = SeedRng::new(seed);
        matrix(Array2::from_shape_fn((d, n), |_| rng.next_normal()))
    }

    fn random_weights(n: usize, seed: u64) -> WeightVector {
        let mut rng = SeedRng::new(seed);
        let raw: Vec<f64> = (0..n).map(|_| rng.next_f64() + 0.1).collect();
        let sum: f64 = raw.iter().sum();
        WeightVector::new(raw.into_iter().map(|v| v / sum).collect()).unwrap()
    }

    #[test]
    fn weighted_mean_uniform_is_arithmetic_mean() {
        let x = matrix(array![[1.0, 3.0], [2.0, 4.0]]);
        let w = WeightVector::new(vec![0.5, 0.5]).unwrap();
        let m = weighted_mean(&x, &w).unwrap();
        assert_abs_diff_eq!(m[0], 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m[1], 3.0, epsilon = 1e-15);
    }

    #[test]
    fn weighted_mean_skewed_weights() {
        let x = matrix(array![[1.0, 3.0], [2.0, 4.0]]);
        let w = WeightVector::new(vec![0.999, 0.001]).unwrap();
        let m = weighted_mean(&x, &w).unwrap();
        assert_abs_diff_eq!(m[0], 1.002, epsilon = 1e-12);
        assert_abs_diff_eq!(m[1], 2.002, epsilon = 1e-12);
    }

    #[test]
    fn weighted_mean_matches_two_pass_oracle() {
        let x = random_data(5, 37, 11);
        let w = WeightVector::uniform(37).unwrap();
        let m = weighted_mean(&x, &w).unwrap();
        // independent oracle: naive two-pass summation per feature
        for i in 0..5 {
            let mut acc = 0.0;
            for j in 0..37 {
                acc += x.values()[[i, j]];
            }
            assert_abs_diff_eq!(m[i], acc / 37.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn weighted_mean_rejects_mismatch() {
        let x = matrix(array![[1.0, 3.0]]);
        let w = WeightVector::uniform(3).unwrap();
        assert!(matches!(weighted_mean(&x, &w), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn scatter_of_constant_data_is_zero() {
        let x = matrix(array![[2.0, 2.0, 2.0], [-1.0, -1.0, -1.0]]);
        let w = WeightVector::uniform(3).unwrap();
        let s = weighted_scatter(&x, &w).unwrap();
        for &v in s.iter() {
            assert!(v.abs() < 1e-28, "expected zero scatter, got {v}");
        }
    }

    #[test]
    fn scatter_hand_computed_1d() {
        let x = matrix(array![[1.0, -1.0]]);
        let w = WeightVector::new(vec![0.5, 0.5]).unwrap();
        let s = weighted_scatter(&x, &w).unwrap();
        assert_abs_diff_eq!(s[[0, 0]], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn scatter_matches_both_definitions() {
        let x = random_data(4, 6, 5);
        let w = random_weights(6, 6);
        let s = weighted_scatter(&x, &w).unwrap();
        let scale = s.iter().map(|v| v * v).sum::<f64>().sqrt();

        // oracle 1: explicit centered loop sum_i w_i (x_i - m)(x_i - m)'
        let m = weighted_mean(&x, &w).unwrap();
        let mut s1 = Array2::<f64>::zeros((4, 4));
        for j in 0..6 {
            let wj = w.entries()[j];
            for r in 0..4 {
                for c in 0..4 {
                    s1[[r, c]] += wj * (x.values()[[r, j]] - m[r]) * (x.values()[[c, j]] - m[c]);
                }
            }
        }
        // oracle 2: X (diag(w) - ww') X'
        let mut h = Array2::<f64>::zeros((6, 6));
        for i in 0..6 {
            for j in 0..6 {
                h[[i, j]] = if i == j { w.entries()[i] } else { 0.0 };
                h[[i, j]] -= w.entries()[i] * w.entries()[j];
            }
        }
        let s2 = x.values().dot(&h).dot(&x.values().t());

        for r in 0..4 {
            for c in 0..4 {
                assert!((s[[r, c]] - s1[[r, c]]).abs() <= 1e-10 * scale.max(1.0));
                assert!((s[[r, c]] - s2[[r, c]]).abs() <= 1e-10 * scale.max(1.0));
                assert!((s[[r, c]] - s[[c, r]]).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn scatter_is_shift_invariant() {
        let x = random_data(3, 10, 21);
        let w = random_weights(10, 22);
        let s0 = weighted_scatter(&x, &w).unwrap();
        let mut shifted = x.values().clone();
        for mut col in shifted.columns_mut() {
            col[0] += 100.0;
            col[1] -= 42.5;
            col[2] += 7.0;
        }
        let s1 = weighted_scatter(&matrix(shifted), &w).unwrap();
        let scale = s0.iter().map(|v| v * v).sum::<f64>().sqrt();
        for (a, b) in s0.iter().zip(s1.iter()) {
            assert!((a - b).abs() <= 1e-10 * scale.max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn scatter_is_positive_semidefinite() {
        for seed in 0..5 {
            let x = random_data(4, 9, 100 + seed);
            let w = random_weights(9, 200 + seed);
            let s = weighted_scatter(&x, &w).unwrap();
            let frob = s.iter().map(|v| v * v).sum::<f64>().sqrt();
            let eig = top_k_eigh(&s, 4).unwrap();
            let smallest = *eig.values().last().unwrap();
            assert!(smallest >= -1e-10 * frob, "smallest eigenvalue {smallest}");
        }
    }

    #[test]
    fn eigh_identity() {
        let s = Array2::eye(3);
        let r = top_k_eigh(&s, 1).unwrap();
        assert_abs_diff_eq!(r.values()[0], 1.0, epsilon = 1e-12);
        let v = r.vectors().column(0);
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-10);
        assert!(v[dominant_entry(&v.to_vec())] >= 0.0);
    }

    #[test]
    fn eigh_diagonal() {
        let s = Array2::from_diag(&array![3.0, 2.0, 1.0]);
        let r = top_k_eigh(&s, 2).unwrap();
        assert_abs_diff_eq!(r.values()[0], 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.values()[1], 2.0, epsilon = 1e-12);
        let v = r.vectors();
        assert_abs_diff_eq!(v[[0, 0]], 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(v[[1, 1]], 1.0, epsilon = 1e-10);
    }

    #[test]
    fn eigh_rejects_bad_inputs() {
        let s = array![[1.0, 2.0], [0.0, 1.0]];
        assert!(matches!(top_k_eigh(&s, 1), Err(Error::NotSymmetric { .. })));
        let ok = Array2::eye(2);
        assert!(matches!(
            top_k_eigh(&ok, 3),
            Err(Error::RankRequestTooLarge { .. })
        ));
        assert!(matches!(
            top_k_eigh(&ok, 0),
            Err(Error::RankRequestTooLarge { .. })
        ));
    }

    #[test]
    fn eigh_maximizes_projected_trace() {
        let x = random_data(5, 12, 77);
        let w = random_weights(12, 78);
        let s = weighted_scatter(&x, &w).unwrap();
        let r = top_k_eigh(&s, 2).unwrap();
        let best = r.vectors().t().dot(&s).dot(r.vectors());
        let best_trace = best[[0, 0]] + best[[1, 1]];
        let mut rng = SeedRng::new(79);
        for _ in 0..100 {
            let mut q = Array2::from_shape_fn((5, 2), |_| rng.next_normal());
            orthonormalize_columns(&mut q).unwrap();
            let t = q.t().dot(&s).dot(&q);
            let trace = t[[0, 0]] + t[[1, 1]];
            assert!(best_trace >= trace - 1e-8, "{best_trace} < {trace}");
        }
    }

    #[test]
    fn project_axis_extracts_first_row() {
        let model = SubspaceModel::new(array![[1.0], [0.0]], Array1::zeros(2)).unwrap();
        let x = matrix(array![[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]]);
        let z = project(&model, &x).unwrap();
        for j in 0..3 {
            assert_abs_diff_eq!(z[[0, j]], x.values()[[0, j]], epsilon = 1e-15);
        }
    }

    #[test]
    fn project_centered_out_data_is_zero() {
        let mean = array![1.5, -2.0];
        let model = SubspaceModel::new(array![[1.0], [0.0]], mean.clone()).unwrap();
        let x = matrix(Array2::from_shape_fn((2, 4), |(i, _)| mean[i]));
        let z = project(&model, &x).unwrap();
        assert!(z.iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn project_matches_loop_oracle() {
        let x = random_data(6, 9, 31);
        let mut basis = Array2::from_shape_fn((6, 3), |_| SeedRng::new(32).next_f64());
        let mut rng = SeedRng::new(33);
        basis.mapv_inplace(|_| rng.next_normal());
        orthonormalize_columns(&mut basis).unwrap();
        let mean = Array1::from_shape_fn(6, |i| i as f64 * 0.1);
        let model = SubspaceModel::new(basis.clone(), mean.clone()).unwrap();
        let z = project(&model, &x).unwrap();
        for j in 0..9 {
            for kk in 0..3 {
                let mut acc = 0.0;
                for i in 0..6 {
                    acc += basis[[i, kk]] * (x.values()[[i, j]] - mean[i]);
                }
                assert_abs_diff_eq!(z[[kk, j]], acc, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn reconstruct_with_full_basis_is_identity() {
        let x = random_data(4, 7, 41);
        let w = WeightVector::uniform(7).unwrap();
        let s = weighted_scatter(&x, &w).unwrap();
        let eig = top_k_eigh(&s, 4).unwrap();
        let model = SubspaceModel::new(eig.vectors().clone(), weighted_mean(&x, &w).unwrap()).unwrap();
        let xr = reconstruct(&model, &x).unwrap();
        for (a, b) in x.values().iter().zip(xr.values().iter()) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn reconstruction_residual_is_orthogonal_to_span() {
        let x = random_data(5, 8, 51);
        let mut basis = Array2::from_shape_fn((5, 2), |_| 0.0);
        let mut rng = SeedRng::new(52);
        basis.mapv_inplace(|_| rng.next_normal());
        orthonormalize_columns(&mut basis).unwrap();
        let model = SubspaceModel::new(basis.clone(), Array1::zeros(5)).unwrap();
        let xr = reconstruct(&model, &x).unwrap();
        for j in 0..8 {
            for kk in 0..2 {
                let mut dot = 0.0;
                for i in 0..5 {
                    dot += (x.values()[[i, j]] - xr.values()[[i, j]]) * basis[[i, kk]];
                }
                assert!(dot.abs() < 1e-10, "residual not orthogonal: {dot}");
            }
        }
    }

    #[test]
    fn complementarity_of_projection_and_residual() {
        let mut rng = SeedRng::new(61);
        for _ in 0..20 {
            let mut basis = Array2::from_shape_fn((6, 2), |_| rng.next_normal());
            orthonormalize_columns(&mut basis).unwrap();
            let x: Vec<f64> = (0..6).map(|_| rng.next_normal() * 3.0).collect();
            let mut proj_sq = 0.0;
            let mut px = vec![0.0; 6];
            for kk in 0..2 {
                let mut z = 0.0;
                for i in 0..6 {
                    z += basis[[i, kk]] * x[i];
                }
                proj_sq += z * z;
                for i in 0..6 {
                    px[i] += basis[[i, kk]] * z;
                }
            }
            let resid_sq: f64 = x.iter().zip(px.iter()).map(|(a, b)| (a - b).powi(2)).sum();
            let total: f64 = x.iter().map(|v| v * v).sum();
            assert!((proj_sq + resid_sq - total).abs() <= 1e-10 * total.max(1.0));
        }
    }

    #[test]
    fn projector_distance_examples() {
        let p1 = array![[1.0], [0.0]];
        let p2 = array![[0.0], [1.0]];
        assert_abs_diff_eq!(projector_distance(&p1, &p1).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            projector_distance(&p1, &p2).unwrap(),
            2.0f64.sqrt(),
            epsilon = 1e-12
        );
        // sign flip is invisible to the projector
        let neg = array![[-1.0], [0.0]];
        assert_abs_diff_eq!(projector_distance(&p1, &neg).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn principal_angle_between_axes_is_right_angle() {
        let p1 = array![[1.0], [0.0]];
        let p2 = array![[0.0], [1.0]];
        let angle = largest_principal_angle(&p1, &p2).unwrap();
        assert_abs_diff_eq!(angle, std::f64::consts::FRAC_PI_2, epsilon = 1e-10);
        assert_abs_diff_eq!(largest_principal_angle(&p1, &p1).unwrap(), 0.0, epsilon = 1e-7);
    }
}
