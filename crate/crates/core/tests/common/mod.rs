//! Independent oracle implementations used by the integration and acceptance
//! tests. Nothing here calls into the crate's linear-algebra or weight
//! code paths: the eigensolver is a classical cyclic Jacobi sweep, the
//! simplex maximizers are projected gradient ascent and brute-force grid
//! enumeration.

#![allow(dead_code)]

use ndarray::Array2;

/// Full eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns (eigenvalues descending, eigenvectors as matching columns).
pub fn jacobi_eigh(a: &Array2<f64>) -> (Vec<f64>, Array2<f64>) {
    let d = a.nrows();
    assert_eq!(d, a.ncols(), "jacobi oracle needs a square matrix");
    let mut m = a.clone();
    let mut v: Array2<f64> = Array2::eye(d);
    let scale: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt().max(1.0);

    for _sweep in 0..200 {
        let mut off = 0.0;
        for p in 0..d {
            for q in (p + 1)..d {
                off += m[[p, q]] * m[[p, q]];
            }
        }
        if off.sqrt() <= 1e-14 * scale {
            break;
        }
        for p in 0..d.saturating_sub(1) {
            for q in (p + 1)..d {
                if m[[p, q]].abs() <= 1e-300 {
                    continue;
                }
                let theta = (m[[q, q]] - m[[p, p]]) / (2.0 * m[[p, q]]);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (theta * theta + 1.0).sqrt())
                } else {
                    -1.0 / (-theta + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // M <- J' M J with J the (p,q)-plane rotation
                for i in 0..d {
                    let (mip, miq) = (m[[i, p]], m[[i, q]]);
                    m[[i, p]] = c * mip - s * miq;
                    m[[i, q]] = s * mip + c * miq;
                }
                for i in 0..d {
                    let (mpi, mqi) = (m[[p, i]], m[[q, i]]);
                    m[[p, i]] = c * mpi - s * mqi;
                    m[[q, i]] = s * mpi + c * mqi;
                }
                for i in 0..d {
                    let (vip, viq) = (v[[i, p]], v[[i, q]]);
                    v[[i, p]] = c * vip - s * viq;
                    v[[i, q]] = s * vip + c * viq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| m[[j, j]].partial_cmp(&m[[i, i]]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| m[[i, i]]).collect();
    let mut vectors = Array2::zeros((d, d));
    for (col, &src) in order.iter().enumerate() {
        for i in 0..d {
            vectors[[i, col]] = v[[i, src]];
        }
    }
    (values, vectors)
}

/// The projector onto the span of the first k columns.
pub fn projector_of(vectors: &Array2<f64>, k: usize) -> Array2<f64> {
    let p = vectors.slice(ndarray::s![.., ..k]).to_owned();
    p.dot(&p.t())
}

/// Euclidean projection onto the probability simplex (sort-based).
pub fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (i, &ui) in u.iter().enumerate() {
        cumsum += ui;
        let candidate = (cumsum - 1.0) / (i + 1) as f64;
        if ui - candidate > 0.0 {
            theta = candidate;
        }
    }
    let _ = n;
    v.iter().map(|&vi| (vi - theta).max(0.0)).collect()
}

/// Maximizes (1/n)·Σ aᵢsᵢ − τ·Σ aᵢ ln aᵢ over the simplex by projected
/// gradient ascent from the uniform start.
pub fn pga_simplex_max(scores: &[f64], tau: f64, steps: usize, lr: f64) -> Vec<f64> {
    let n = scores.len();
    let mut a = vec![1.0 / n as f64; n];
    for _ in 0..steps {
        let stepped: Vec<f64> = (0..n)
            .map(|i| {
                let ai = a[i].max(1e-18);
                let grad = scores[i] / n as f64 - tau * (ai.ln() + 1.0);
                a[i] + lr * grad
            })
            .collect();
        a = project_to_simplex(&stepped);
    }
    a
}

/// Evaluates the entropy-regularized objective at a simplex point.
pub fn entropy_objective(a: &[f64], scores: &[f64], tau: f64) -> f64 {
    let n = a.len() as f64;
    a.iter()
        .zip(scores.iter())
        .map(|(&ai, &si)| {
            let ent = if ai > 0.0 { ai * ai.ln() } else { 0.0 };
            ai * si / n - tau * ent
        })
        .sum()
}

/// Brute-force maximization over the simplex grid {m/resolution}: returns the
/// best grid point. Cost grows as C(resolution+n-1, n-1); keep n small.
pub fn grid_simplex_max(scores: &[f64], tau: f64, resolution: usize) -> Vec<f64> {
    let n = scores.len();
    let mut best = vec![0.0; n];
    let mut best_val = f64::NEG_INFINITY;
    let mut current = vec![0usize; n];
    enumerate_compositions(resolution, n, 0, &mut current, &mut |parts| {
        let a: Vec<f64> = parts.iter().map(|&m| m as f64 / resolution as f64).collect();
        let val = entropy_objective(&a, scores, tau);
        if val > best_val {
            best_val = val;
            best = a;
        }
    });
    best
}

fn enumerate_compositions(
    remaining: usize,
    slots: usize,
    idx: usize,
    current: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]),
) {
    if idx == slots - 1 {
        current[idx] = remaining;
        visit(current);
        return;
    }
    for m in 0..=remaining {
        current[idx] = m;
        enumerate_compositions(remaining - m, slots, idx + 1, current, visit);
    }
}

/// Deterministic random symmetric matrix from a simple 64-bit mix, kept
/// independent of the crate's RNG stack.
pub fn random_symmetric(d: usize, seed: u64) -> Array2<f64> {
    let mut state = seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(1);
    let mut next = move || {
        // splitmix64
        state = state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^= z >> 31;
        (z >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    };
    let mut a = Array2::zeros((d, d));
    for i in 0..d {
        for j in 0..=i {
            let v = next();
            a[[i, j]] = v;
            a[[j, i]] = v;
        }
    }
    a
}

/// Uniform scores in [0, 1] from the same independent mixer.
pub fn random_scores(n: usize, seed: u64) -> Vec<f64> {
    let mut state = seed.wrapping_mul(0xD1B54A32D192ED03).wrapping_add(7);
    (0..n)
        .map(|_| {
            state = state.wrapping_add(0x9E3779B97F4A7C15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
            z ^= z >> 31;
            (z >> 11) as f64 / (1u64 << 53) as f64
        })
        .collect()
}
