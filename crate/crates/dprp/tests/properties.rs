//! Property tests for structural invariants.

use proptest::prelude::*;

use dprp::core::{max_normalize, read_signs, validate_dataset, write_signs, DataVector, Dataset};
use dprp::dp_sign::{flip_probability, keep_probability};
use dprp::estimators::{rr_collision_map, rr_collision_unmap};
use dprp::mechanisms::compose;
use dprp::projections::{
    materialize, oporp_bin_of, oporp_project, project, take_signs, ProjectionOp, ProjectionSpec,
};

fn matrix_strategy() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1usize..6, 1usize..8).prop_flat_map(|(rows, cols)| {
        proptest::collection::vec(
            proptest::collection::vec(-100.0f64..100.0, cols),
            rows,
        )
    })
}

proptest! {
    #[test]
    fn max_normalize_is_idempotent_and_bounded(rows in matrix_strategy()) {
        let d = Dataset::new(rows, 100.0).unwrap();
        let once = max_normalize(&d).unwrap();
        for i in 0..once.n_rows() {
            for &v in once.row(i) {
                prop_assert!(v.abs() <= 1.0 + 1e-12);
            }
        }
        let twice = max_normalize(&once).unwrap();
        for i in 0..once.n_rows() {
            prop_assert_eq!(once.row(i), twice.row(i));
        }
    }

    #[test]
    fn validation_accepts_exactly_the_invariants(
        rows in matrix_strategy(),
        bound in 1.0f64..200.0,
    ) {
        let d = Dataset::new(rows.clone(), bound).unwrap();
        let report = validate_dataset(&d);
        let expect_valid = rows.iter().all(|r| {
            r.len() == rows[0].len()
                && r.iter().any(|&v| v != 0.0)
                && r.iter().all(|&v| v.abs() <= bound)
        });
        prop_assert_eq!(report.is_valid(), expect_valid);
    }

    #[test]
    fn sign_file_roundtrip(signs in proptest::collection::vec(
        proptest::collection::vec(prop_oneof![Just(1i8), Just(-1i8)], 1..40), 1..5)
    ) {
        let cols = signs[0].len();
        prop_assume!(signs.iter().all(|r| r.len() == cols));
        let mut path = std::env::temp_dir();
        path.push(format!("dprp-prop-{}-{}.sgn", std::process::id(), cols));
        write_signs(&path, &signs).unwrap();
        let back = read_signs(&path).unwrap();
        std::fs::remove_file(&path).ok();
        prop_assert_eq!(signs, back);
    }

    #[test]
    fn rr_collision_roundtrip(p in 0.0f64..=1.0, eps in 0.05f64..8.0) {
        let observed = rr_collision_map(p, eps);
        prop_assert!((0.0..=1.0).contains(&observed));
        let back = rr_collision_unmap(observed, eps);
        prop_assert!((back - p).abs() < 1e-9);
    }

    #[test]
    fn keep_probability_is_informative(eps in 1e-6f64..50.0) {
        let q = keep_probability(eps);
        prop_assert!(q > 0.5 && q <= 1.0);
        prop_assert!((q + flip_probability(eps) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn composition_is_additive(parts in proptest::collection::vec(
        (0.0f64..5.0, 0.0f64..1e-3), 1..10)
    ) {
        let (e, d) = compose(&parts);
        let se: f64 = parts.iter().map(|p| p.0).sum();
        let sd: f64 = parts.iter().map(|p| p.1).sum();
        prop_assert!((e - se).abs() < 1e-12 && (d - sd).abs() < 1e-15);
    }

    #[test]
    fn oporp_bins_partition_every_coordinate(
        p in 1usize..40,
        k_div in 1usize..8,
        seed in 0u64..1000,
    ) {
        let k = (p / k_div).max(1);
        let spec = ProjectionSpec::oporp(p, k, seed);
        let op = materialize(&spec).unwrap();
        if let ProjectionOp::Oporp { permutation, .. } = &op {
            let mut seen = vec![false; p];
            for &pos in permutation {
                prop_assert!(!seen[pos as usize]);
                seen[pos as usize] = true;
                prop_assert!(oporp_bin_of(pos, p, k) < k);
            }
        }
    }

    #[test]
    fn sketches_are_pure_functions_of_spec_and_data(
        seed in 0u64..500,
        values in proptest::collection::vec(-1.0f64..1.0, 8),
    ) {
        prop_assume!(values.iter().any(|&v| v != 0.0));
        let u = DataVector::new(values, 1.0).unwrap();
        let dense = ProjectionSpec::gaussian(8, 4, seed);
        let a = project(&materialize(&dense).unwrap(), &u).unwrap();
        let b = project(&materialize(&dense).unwrap(), &u).unwrap();
        prop_assert_eq!(&a.payload, &b.payload);
        let sparse = ProjectionSpec::oporp(8, 4, seed);
        let a = oporp_project(&materialize(&sparse).unwrap(), &u).unwrap();
        let b = oporp_project(&materialize(&sparse).unwrap(), &u).unwrap();
        prop_assert_eq!(&a.payload, &b.payload);
        let signs = take_signs(&a).unwrap();
        for &s in signs.payload.signs().unwrap() {
            prop_assert!(s == 1 || s == -1);
        }
    }
}
