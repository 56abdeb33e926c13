//! Frozen seed→checksum fixtures for the data generators. The RNG stack is
//! documented and pinned, so these hashes must never change; a failure here
//! means dataset reproducibility across versions (or reimplementations) has
//! been broken.

use sha2::{Digest, Sha256};

use rpca::harness::{
    contaminate_images, contaminate_tabular, gen_toy, write_mask_csv, write_matrix_csv,
    FactorDrawMode, LabeledDataset, OutlierCategory, ToySpec,
};

fn checksum(ds: &LabeledDataset) -> String {
    let mut bytes = Vec::new();
    write_matrix_csv(&mut bytes, ds).unwrap();
    write_mask_csv(&mut bytes, ds.outlier_mask()).unwrap();
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    format!("{:x}", hasher.finalize())
}

fn spec(category: OutlierCategory, n_outliers: usize, seed: u64) -> ToySpec {
    ToySpec {
        n_normal: 200,
        correlation: 0.95,
        outlier_category: category,
        n_outliers,
        magnitude: 8.0,
        rng_seed: seed,
    }
}

#[test]
fn toy_generator_checksums() {
    let cases = [
        (spec(OutlierCategory::None, 0, 7), "c562e630c6167fe6c5085c0226c44d5948b4c9a03592f05b40a59b77156834e6"),
        (spec(OutlierCategory::Pcs, 20, 7), "dbdac4a036e202d60e9bd61beaa544bcd86092ed79db20518fc2f3c8e4668fdc"),
        (spec(OutlierCategory::Ocs, 20, 7), "76d9dd68d4cf84b86a8e392d2b580dc7fb554e5d527e61819dc89d6d9ee29262"),
        (spec(OutlierCategory::Both, 20, 7), "14727e5dff17e13bf9420a469d5793ea542e50d3b7f33414c0385bfb22f4719f"),
    ];
    for (s, expected) in cases {
        let ds = gen_toy(&s).unwrap();
        assert_eq!(checksum(&ds), expected, "category {:?}", s.outlier_category);
    }
}

#[test]
fn contamination_checksums() {
    let base = gen_toy(&ToySpec {
        n_normal: 60,
        correlation: 0.5,
        outlier_category: OutlierCategory::None,
        n_outliers: 0,
        magnitude: 1.0,
        rng_seed: 3,
    })
    .unwrap();
    let tab = contaminate_tabular(&base, 0.25, &[5.0, 10.0, 20.0], FactorDrawMode::PerSample, 13).unwrap();
    assert_eq!(checksum(&tab), "8030c4057aa06341b9055741704bba36ab7a93769c109ac9b4bb7c891d5e8533");

    // 2x1 "images" keep the fixture tiny; the path is the same as real ones
    let img = contaminate_images(&base, (2, 1), 0.25, 1.0, 17).unwrap();
    assert_eq!(checksum(&img), "487a15386c5a536ec0b17fa34e4b7d8a462a8e644144002a4b12a0e0e6e27374");
}

#[test]
fn print_checksums_for_refresh() {
    // convenience: run with --nocapture to see current generator output
    // hashes when the fixtures above need a deliberate refresh
    for (s, name) in [
        (spec(OutlierCategory::None, 0, 7), "toy_none"),
        (spec(OutlierCategory::Pcs, 20, 7), "toy_pcs"),
        (spec(OutlierCategory::Ocs, 20, 7), "toy_ocs"),
        (spec(OutlierCategory::Both, 20, 7), "toy_both"),
    ] {
        println!("{name}: {}", checksum(&gen_toy(&s).unwrap()));
    }
    let base = gen_toy(&ToySpec {
        n_normal: 60,
        correlation: 0.5,
        outlier_category: OutlierCategory::None,
        n_outliers: 0,
        magnitude: 1.0,
        rng_seed: 3,
    })
    .unwrap();
    let tab = contaminate_tabular(&base, 0.25, &[5.0, 10.0, 20.0], FactorDrawMode::PerSample, 13).unwrap();
    println!("tabular: {}", checksum(&tab));
    let img = contaminate_images(&base, (2, 1), 0.25, 1.0, 17).unwrap();
    println!("image: {}", checksum(&img));
}
