//! End-to-end checks through the public API: projection moments, OPORP
//! unbiasedness, the sign pipeline, mechanism-level estimator behavior, and
//! file round-trips of privatized outputs.

use dprp::analytic::EstimatorKind;
use dprp::core::{read_matrix, write_matrix_f64, DataVector, PrivacyBudget, RngStream};
use dprp::dp_rp::{privatize_dataset, DpRpConfig, DpRpVariant};
use dprp::estimators::{angle_from_signs, cosine_normalized, inner_product};
use dprp::evalbench::oracle;
use dprp::projections::{materialize, oporp_project, project, take_signs, ProjectionSpec};
use std::f64::consts::PI;

fn unit(values: Vec<f64>) -> DataVector {
    let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
    DataVector::new(values.iter().map(|v| v / norm).collect(), 1.0).unwrap()
}

fn random_unit(p: usize, seed: u64) -> DataVector {
    use rand::Rng;
    let mut rng = RngStream::from_seed(seed).rng();
    unit((0..p).map(|_| rng.random_range(-1.0f64..1.0)).collect())
}

#[test]
fn dense_projection_coordinate_variance() {
    // Var(x_j) = ||u||^2 / k for every dense kind, measured over 1e5
    // projected coordinates.
    let p = 32;
    let k = 4;
    let u = random_unit(p, 7);
    for kind_seed in 0..2u64 {
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        let mut count = 0u64;
        for s in 0..25_000u64 {
            let spec = if kind_seed == 0 {
                ProjectionSpec::gaussian(p, k, 90_000 + s)
            } else {
                ProjectionSpec::rademacher(p, k, 90_000 + s)
            };
            let sk = project(&materialize(&spec).unwrap(), &u).unwrap();
            for &x in sk.payload.real().unwrap() {
                sum += x;
                sum_sq += x * x;
                count += 1;
            }
        }
        let mean = sum / count as f64;
        let var = sum_sq / count as f64 - mean * mean;
        let expect = 1.0 / k as f64; // unit norm
        assert!(
            (var - expect).abs() < 0.05 * expect,
            "coordinate variance {var} vs {expect}"
        );
    }
}

#[test]
fn oporp_inner_product_is_unbiased() {
    let p = 64;
    let k = 16;
    let u = random_unit(p, 11);
    let v = random_unit(p, 12);
    let dot: f64 = u.values().iter().zip(v.values()).map(|(a, b)| a * b).sum();
    let reps = 100_000u64;
    let m = oracle::estimator_moments(
        EstimatorKind::Oporp,
        u.values(),
        v.values(),
        k,
        0.0,
        reps,
        &RngStream::from_seed(0xbeef),
    )
    .unwrap();
    assert!(
        (m.mean - dot).abs() < 3.0 * m.std_error_mean,
        "oporp mean {} vs {dot}",
        m.mean
    );
}

#[test]
fn noiseless_oporp_cosine_tracks_the_true_cosine() {
    // rho = 0.5 pair at p = 256, k = 64: the mean normalized cosine over
    // 1e4 operator seeds lands within 0.02 of 0.5.
    let (uv, vv) = dprp::evalbench::unit_pair_with_cosine(256, 0.5, &RngStream::from_seed(3));
    let u = DataVector::new(uv, 1.0).unwrap();
    let v = DataVector::new(vv, 1.0).unwrap();
    let mut mean = 0.0;
    let n = 10_000u64;
    for seed in 0..n {
        let op = materialize(&ProjectionSpec::oporp(256, 64, seed)).unwrap();
        let a = oporp_project(&op, &u).unwrap();
        let b = oporp_project(&op, &v).unwrap();
        mean += cosine_normalized(&a, &b).unwrap().estimate;
    }
    mean /= n as f64;
    assert!((mean - 0.5).abs() < 0.02, "mean oporp cosine {mean}");
}

#[test]
fn orthogonal_pair_estimates_center_on_zero() {
    let (uv, vv) = dprp::evalbench::unit_pair_with_cosine(64, 0.0, &RngStream::from_seed(8));
    let m = oracle::estimator_moments(
        EstimatorKind::Rp,
        &uv,
        &vv,
        16,
        0.0,
        50_000,
        &RngStream::from_seed(0x0e),
    )
    .unwrap();
    assert!(m.mean.abs() < 3.0 * m.std_error_mean, "mean {}", m.mean);
}

#[test]
fn retrieval_quality_grows_with_epsilon() {
    use dprp::evalbench::{run_retrieval, sphere_dataset, BenchCell, BenchMechanism, RetrievalTask};
    let stream = RngStream::from_seed(0xe9);
    let db = sphere_dataset(64, 300, &[1.0, 5.0], &stream.derive(1)).unwrap();
    let queries = sphere_dataset(64, 30, &[1.0, 5.0], &stream.derive(2)).unwrap();
    let task = RetrievalTask::new(db, queries, 10, vec![10]).unwrap();
    let seeds: Vec<u64> = (0..10).collect();
    for mechanism in [
        BenchMechanism::RpGOptB { k: 32 },
        BenchMechanism::SignOporpRrSmooth { k: 32, t: 2 },
    ] {
        let mut by_eps = Vec::new();
        for &eps in &[1.0, 20.0] {
            let delta = match mechanism {
                BenchMechanism::RpGOptB { .. } => 1e-6,
                _ => 0.0,
            };
            let cells = vec![BenchCell {
                mechanism: mechanism.clone(),
                epsilon: eps,
                delta,
                beta: 1.0,
            }];
            let rows = run_retrieval(&task, &cells, &seeds).unwrap();
            by_eps.push(rows[0].precision);
        }
        assert!(
            by_eps[1] > by_eps[0],
            "precision did not grow with epsilon: {by_eps:?}"
        );
    }
}

#[test]
fn sign_pipeline_recovers_the_angle() {
    // Through materialize -> project -> take_signs -> angle_from_signs.
    let theta: f64 = PI / 3.0;
    let u = DataVector::new(vec![1.0, 0.0], 1.0).unwrap();
    let v = DataVector::new(vec![theta.cos(), theta.sin()], 1.0).unwrap();
    let spec = ProjectionSpec::gaussian(2, 20_000, 31);
    let op = materialize(&spec).unwrap();
    let a = take_signs(&project(&op, &u).unwrap()).unwrap();
    let b = take_signs(&project(&op, &v).unwrap()).unwrap();
    let r = angle_from_signs(&a, &b).unwrap();
    let se = r.theoretical_variance.unwrap().sqrt();
    assert!(
        (r.estimate - theta).abs() < 4.0 * se,
        "angle {} vs {theta}",
        r.estimate
    );
}

#[test]
fn mechanism_estimates_track_similarity_at_moderate_eps() {
    // DP-RP-G-OPT-B at eps = 20 on unit vectors: estimated inner products
    // correlate with the true ones across pairs.
    let p = 128;
    let k = 64;
    let budget = PrivacyBudget::new(20.0, 1e-6).unwrap();
    let spec = ProjectionSpec::rademacher(p, k, 77);
    let cfg = DpRpConfig::new(DpRpVariant::RpGOptB, Some(spec), budget);
    let rows: Vec<DataVector> = (0..20).map(|i| random_unit(p, 400 + i)).collect();
    let sketches = privatize_dataset(&cfg, &rows, &RngStream::from_seed(5)).unwrap();
    let mut errs = Vec::new();
    for i in 0..rows.len() {
        for j in (i + 1)..rows.len() {
            let truth: f64 = rows[i]
                .values()
                .iter()
                .zip(rows[j].values())
                .map(|(a, b)| a * b)
                .sum();
            let est = inner_product(&sketches[i], &sketches[j]).unwrap();
            errs.push(est.estimate - truth);
        }
    }
    let mse = errs.iter().map(|e| e * e).sum::<f64>() / errs.len() as f64;
    // Theoretical variance at this calibration is ~2 sigma^2 + k sigma^4 + 1/k.
    let sigma = sketches[0].provenance.noise_scale.unwrap();
    let predicted = 2.0 * sigma * sigma + k as f64 * sigma.powi(4) + 1.0 / k as f64;
    assert!(
        mse < 3.0 * predicted,
        "mse {mse} far above predicted variance {predicted}"
    );
    // Cosine path works on the same sketches.
    let c = cosine_normalized(&sketches[0], &sketches[1]).unwrap();
    assert!(c.estimate.abs() <= 1.0 + 1e-12);
}

#[test]
fn privatized_sketches_roundtrip_through_matrix_files() {
    let p = 24;
    let budget = PrivacyBudget::new(2.0, 1e-6).unwrap();
    let spec = ProjectionSpec::oporp(p, 8, 3);
    let cfg = DpRpConfig::new(DpRpVariant::Oporp, Some(spec), budget);
    let rows: Vec<DataVector> = (0..5).map(|i| random_unit(p, 600 + i)).collect();
    let base = RngStream::from_seed(9);
    let sketches = privatize_dataset(&cfg, &rows, &base).unwrap();
    let payload: Vec<Vec<f64>> = sketches
        .iter()
        .map(|s| s.payload.real().unwrap().to_vec())
        .collect();
    let mut path = std::env::temp_dir();
    path.push(format!("dprp-pipe-{}.mat", std::process::id()));
    write_matrix_f64(&path, &payload).unwrap();
    let back = read_matrix(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(payload, back);
    // Re-running the privatization reproduces the same bytes.
    let again = privatize_dataset(&cfg, &rows, &base).unwrap();
    for (a, b) in sketches.iter().zip(&again) {
        assert_eq!(a.payload, b.payload);
    }
}

#[test]
fn oporp_sketch_of_concatenated_runs_matches_run_lengths() {
    use dprp::dp_sign::{signoporp, SignOporpVariant};
    let u = random_unit(64, 21);
    let budget = PrivacyBudget::pure(4.0)
        .unwrap()
        .with_repetitions(4)
        .unwrap();
    let spec = ProjectionSpec::oporp(64, 32, 5);
    let sk = signoporp(&spec, &u, &budget, SignOporpVariant::RrSmooth, &RngStream::from_seed(2))
        .unwrap();
    assert_eq!(sk.len(), 32);
    assert_eq!(sk.provenance.budget.unwrap().repetitions, 4);
    assert!(sk.provenance.l_histogram.is_some());
}
