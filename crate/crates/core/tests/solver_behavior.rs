//! End-to-end solver behavior on the correlated-Gaussian toy protocol.

mod common;

use rpca::baselines::{fit_pca, fit_rpca_om};
use rpca::harness::{gen_toy, OutlierCategory, ToySpec};
use rpca::linalg::largest_principal_angle;
use rpca::weights::{score_dist, score_ocs, score_pcs};
use rpca::{fit_rpca_dswl, DataMatrix, SolverConfig, WeightVector};

fn toy(category: OutlierCategory, n_outliers: usize, magnitude: f64, seed: u64) -> ToySpec {
    ToySpec {
        n_normal: 200,
        correlation: 0.95,
        outlier_category: category,
        n_outliers,
        magnitude,
        rng_seed: seed,
    }
}

#[test]
fn clean_data_matches_standard_pca_within_one_degree() {
    // n large enough that the entropy weighting's own sampling noise stays
    // inside the one-degree budget
    for seed in [1u64, 2, 3] {
        let mut spec = toy(OutlierCategory::None, 0, 1.0, seed);
        spec.n_normal = 2000;
        let ds = gen_toy(&spec).unwrap();
        let pca = fit_pca(ds.data(), 1).unwrap();
        let dswl = fit_rpca_dswl(ds.data(), &SolverConfig::new(1)).unwrap();
        let angle = largest_principal_angle(dswl.model.projection(), pca.projection())
            .unwrap()
            .to_degrees();
        assert!(angle < 1.0, "seed {seed}: angle {angle} degrees");
    }
}

#[test]
fn robust_mean_beats_unweighted_mean_under_category3_outliers() {
    // the generator's population mean is the origin
    for seed in [5u64, 6, 7] {
        let ds = gen_toy(&toy(OutlierCategory::Both, 20, 8.0, seed)).unwrap();
        let fit = fit_rpca_dswl(ds.data(), &SolverConfig::new(1)).unwrap();
        let robust: f64 = fit.model.mean().iter().map(|v| v * v).sum::<f64>().sqrt();
        let x = ds.data().values();
        let n = ds.n() as f64;
        let naive: f64 = (0..2)
            .map(|i| {
                let m: f64 = (0..ds.n()).map(|j| x[[i, j]]).sum::<f64>() / n;
                m * m
            })
            .sum::<f64>()
            .sqrt();
        assert!(
            robust < naive,
            "seed {seed}: robust mean {robust} not closer than naive {naive}"
        );
    }
}

#[test]
fn weighted_complementarity_holds_at_every_iterate() {
    use rpca::linalg::{top_k_eigh, weighted_mean, weighted_scatter};
    use rpca::SubspaceModel;

    for seed in [11u64, 12, 13, 14, 15] {
        let mut rng = rpca::rng::SeedRng::new(seed);
        let x = DataMatrix::new(ndarray::Array2::from_shape_fn((4, 30), |_| {
            rng.next_normal()
        }))
        .unwrap();
        let mut cfg = SolverConfig::new(2);
        cfg.max_iterations = 10;
        let fit = fit_rpca_dswl(&x, &cfg).unwrap();

        let mut w = WeightVector::uniform(x.n()).unwrap();
        for rec in fit.trace.records() {
            let m = weighted_mean(&x, &w).unwrap();
            let s = weighted_scatter(&x, &w).unwrap();
            let eig = top_k_eigh(&s, cfg.k).unwrap();
            let model = SubspaceModel::new(eig.vectors().clone(), m.clone()).unwrap();

            let pcs = score_pcs(&x, &model).unwrap();
            let ocs = score_ocs(&x, &model).unwrap();
            let dist = score_dist(&x, &m).unwrap();
            let we = w.entries();
            let variance: f64 = we.iter().zip(pcs.values()).map(|(a, b)| a * b).sum();
            let residual: f64 = we.iter().zip(ocs.values()).map(|(a, b)| a * b).sum();
            let total: f64 = we.iter().zip(dist.values()).map(|(a, b)| a * b).sum();
            assert!(
                (variance + residual - total).abs() <= 1e-10 * total.max(1.0),
                "seed {seed} iter {}: {} + {} != {}",
                rec.iteration,
                variance,
                residual,
                total
            );
            w = WeightVector::new(rec.weights.clone()).unwrap();
        }
    }
}

#[test]
fn om_mean_drifts_more_than_dswl_under_pcs_outliers() {
    // inverse-residual weighting rewards outliers that sit inside the
    // subspace, so the optimal-mean baseline gets pulled toward them
    let ds = gen_toy(&toy(OutlierCategory::Pcs, 20, 8.0, 21)).unwrap();
    let cfg = SolverConfig::new(1);
    let dswl = fit_rpca_dswl(ds.data(), &cfg).unwrap();
    let om = fit_rpca_om(ds.data(), 1, &cfg).unwrap();
    let norm = |m: &ndarray::Array1<f64>| m.iter().map(|v| v * v).sum::<f64>().sqrt();
    let dswl_drift = norm(dswl.model.mean());
    let om_drift = norm(om.model.mean());
    assert!(
        dswl_drift < om_drift,
        "dswl drift {dswl_drift} vs om drift {om_drift}"
    );
}

#[test]
fn pca_recovers_population_direction_at_scale() {
    // at n = 1e5 the sample principal direction of the 0.95-correlated
    // generator sits within a degree of the population direction [1,1]/sqrt 2
    let ds = gen_toy(&ToySpec {
        n_normal: 100_000,
        correlation: 0.95,
        outlier_category: OutlierCategory::None,
        n_outliers: 0,
        magnitude: 1.0,
        rng_seed: 99,
    })
    .unwrap();
    let pca = fit_pca(ds.data(), 1).unwrap();
    let p = pca.projection();
    let target = std::f64::consts::FRAC_1_SQRT_2;
    let cos = (p[[0, 0]] * target + p[[1, 0]] * target).abs().min(1.0);
    let angle = cos.acos().to_degrees();
    assert!(angle < 1.0, "angle to population direction: {angle} degrees");
}

#[test]
fn dswl_recovers_clean_direction_under_ocs_outliers() {
    let clean = gen_toy(&toy(OutlierCategory::None, 0, 1.0, 31)).unwrap();
    let reference = fit_pca(clean.data(), 1).unwrap();

    let contaminated = gen_toy(&toy(OutlierCategory::Ocs, 20, 8.0, 31)).unwrap();
    let pca = fit_pca(contaminated.data(), 1).unwrap();
    let dswl = fit_rpca_dswl(contaminated.data(), &SolverConfig::new(1)).unwrap();

    let angle_pca = largest_principal_angle(pca.projection(), reference.projection())
        .unwrap()
        .to_degrees();
    let angle_dswl = largest_principal_angle(dswl.model.projection(), reference.projection())
        .unwrap()
        .to_degrees();
    assert!(
        angle_dswl < angle_pca,
        "dswl angle {angle_dswl} vs pca angle {angle_pca}"
    );
}
