mod common;

use autoassoc::model::{from_json, to_json, FitConfig};
use autoassoc::prelude::*;
use autoassoc::Step;
use common::*;
use ndarray::{array, Array2, Axis};

fn all_specs() -> Vec<RegressorSpec> {
    vec![RegressorSpec::linear(), RegressorSpec::kernel_silverman(), RegressorSpec::spline(4)]
}

fn s_shape3(seed: u64) -> DataMatrix {
    generate(&GeneratorSpec::s_shape(100, 0.05, seed).with_ambient(3)).unwrap()
}

#[test]
fn transform_of_training_data_matches_principal_values() {
    let data = s_shape3(1);
    for spec in all_specs() {
        for index in [IndexKind::ProjectedVariance, IndexKind::Contiguity] {
            let (model, report) = fit(&data, 2, index, &spec).unwrap();
            let y = model.transform(data.values()).unwrap();
            let diff = &y - &report.principal_values;
            assert!(max_abs(&diff) < 1e-10, "{} {}", spec.name(), index.name());
        }
    }
}

#[test]
fn reconstructed_points_lie_on_the_manifold() {
    let data = s_shape3(2);
    for spec in all_specs() {
        let (model, report) = fit(&data, 2, IndexKind::Contiguity, &spec).unwrap();
        let xhat = model.reconstruct(report.principal_values.view()).unwrap();
        for row in xhat.rows() {
            let f = model.evaluate_f(row).unwrap();
            assert!(f.dot(&f).sqrt() < 1e-8, "{}", spec.name());
        }
        // x = mean + Σ s^k(Y^k) + ε
        let sum = &xhat + &report.residuals;
        assert!(max_abs(&(&sum - &data.values())) < 1e-10);
    }
}

#[test]
fn residual_variances_reproduce_q_curve() {
    let data = s_shape3(3);
    for spec in all_specs() {
        let (model, report) = fit(&data, 3, IndexKind::Contiguity, &spec).unwrap();
        let v = model.residual_variances(data.values()).unwrap();
        assert_eq!(v.len(), 4);
        for k in 0..=3 {
            let q = 1.0 - v[k] / v[0];
            assert!((q - report.q_curve[k]).abs() < 1e-10);
        }
    }
}

#[test]
fn pca_model_is_additive() {
    let data = generate(&GeneratorSpec::linear_subspace(120, 4, 5, 0.0, 8)).unwrap();
    let (model, _) = fit(&data, 3, IndexKind::ProjectedVariance, &RegressorSpec::linear()).unwrap();
    let probes: Vec<Vec<f64>> = (0..3).map(|_| (-10..=10).map(|i| i as f64 * 0.3).collect()).collect();
    let rep = model.check_additive(&probes);
    assert!(rep.additive);
    assert!(rep.max_structural <= 1e-10 && rep.max_cross <= 1e-10);
}

#[test]
fn spline_model_structural_part_exact() {
    let data = s_shape3(4);
    let (model, _) = fit(&data, 2, IndexKind::Contiguity, &RegressorSpec::spline(4)).unwrap();
    let probes: Vec<Vec<f64>> = model
        .y_ranges()
        .iter()
        .map(|[lo, hi]| (0..=20).map(|i| lo + (hi - lo) * i as f64 / 20.0).collect())
        .collect();
    let rep = model.check_additive(&probes);
    assert!(rep.max_structural <= 1e-8);
}

#[test]
fn json_round_trip_preserves_model() {
    let data = s_shape3(5);
    for spec in all_specs() {
        let (model, _) = fit(&data, 2, IndexKind::Contiguity, &spec).unwrap();
        let back = from_json(&to_json(&model)).unwrap();
        assert_eq!(back, model, "{}", spec.name());
        assert_eq!(to_json(&back), to_json(&model));
    }
}

#[test]
fn q_threshold_stops_the_loop() {
    let data = generate(&GeneratorSpec::linear_subspace(100, 4, 6, 0.0, 2)).unwrap();
    let mut cfg = FitConfig::new(4, IndexKind::ProjectedVariance, RegressorSpec::linear());
    cfg.q_threshold = Some(0.7);
    let (model, report) = fit_with(&data, &cfg).unwrap();
    let FitStatus::ReachedThreshold { completed } = report.status else {
        panic!("expected threshold stop, got {:?}", report.status);
    };
    assert_eq!(model.d(), completed);
    assert!(report.q_curve[completed] >= 0.7);
    assert!(report.q_curve[completed - 1] < 0.7);
}

#[test]
fn failing_step_is_named() {
    // duplicated points: every nearest-neighbour difference is zero
    let x = array![[1.0, 2.0], [1.0, 2.0], [-1.0, -2.0], [-1.0, -2.0], [0.5, 0.0], [0.5, 0.0]];
    let data = DataMatrix::new(x).unwrap();
    let err = fit(&data, 1, IndexKind::Contiguity, &RegressorSpec::linear()).unwrap_err();
    match &err {
        Error::Fit { step, iteration, .. } => {
            assert_eq!(*step, Step::Axis);
            assert_eq!(*iteration, 1);
        }
        other => panic!("unexpected {other:?}"),
    }
    assert!(err.to_string().contains("[A]"));

    // principal values take two distinct values: the spline design is singular
    let x = Array2::from_shape_fn((20, 2), |(i, j)| if j == 0 { if i % 2 == 0 { 5.0 } else { -5.0 } } else { 0.01 * i as f64 });
    let data = DataMatrix::new(x).unwrap();
    let err = fit(&data, 1, IndexKind::ProjectedVariance, &RegressorSpec::spline(4)).unwrap_err();
    match &err {
        Error::Fit { step, .. } => assert_eq!(*step, Step::Regression),
        other => panic!("unexpected {other:?}"),
    }
    assert!(err.to_string().contains("[R]"));
}

#[test]
fn rank_deficient_data_stops_early() {
    let x = Array2::from_shape_fn((20, 2), |(i, j)| if j == 0 { i as f64 } else { 0.0 });
    let data = DataMatrix::new(x).unwrap();
    let (model, report) = fit(&data, 2, IndexKind::ProjectedVariance, &RegressorSpec::spline(4)).unwrap();
    assert_eq!(report.status, FitStatus::StoppedEarly { completed: 1 });
    assert_eq!(model.d(), 1);
    assert_eq!(report.q_curve.len(), 3);
    assert_eq!(report.q_curve[2], 1.0);
}

#[test]
fn principal_values_are_centred_for_structural_fits() {
    let data = s_shape3(6);
    for spec in [RegressorSpec::linear(), RegressorSpec::spline(4)] {
        let (_, report) = fit(&data, 3, IndexKind::Contiguity, &spec).unwrap();
        for col in report.principal_values.axis_iter(Axis(1)) {
            assert!(col.mean().unwrap().abs() < 1e-12);
        }
    }
}

#[test]
fn fits_are_repeatable() {
    let data = s_shape3(7);
    for spec in all_specs() {
        let (a, ra) = fit(&data, 2, IndexKind::Contiguity, &spec).unwrap();
        let (b, rb) = fit(&data, 2, IndexKind::Contiguity, &spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(ra.residuals, rb.residuals);
    }
}
