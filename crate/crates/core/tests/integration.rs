//! End-to-end checks across modules on closed-form functions.

use std::f64::consts::PI;

use sampling_core::bench::{run_experiment, ExperimentConfig, Measure};
use sampling_core::kfunc::realization;
use sampling_core::nodes::lagrange_nodes;
use sampling_core::operators::{approx_error, SamplingOperator};
use sampling_core::quadrature::lp_norm;
use sampling_core::smoothness::{combined_modulus, steklov_deviation, steklov_node_deviation, SmoothnessParams};
use sampling_core::torus::{make_corpus, parse_corpus_id};
use sampling_core::{Error, QuadratureSpec};

#[test]
fn power_singularity_norm() {
    // int_0^1 x^{-2a} dx = 1 / (1 - 2a)
    let f = make_corpus("power_singularity", &[0.25]).unwrap();
    let n = lp_norm(&f, 2.0, &QuadratureSpec::default()).unwrap();
    assert!((n.value - 2f64.sqrt()).abs() < 1e-9, "{}", n.value);
}

#[test]
fn step_errors_of_piecewise_constant_splines() {
    // the samples at 0 and 1/2 are 0, so two cells of width 1/(2m) are off by 1
    let f = make_corpus("step", &[]).unwrap();
    for m in [4usize, 8, 16] {
        let e = approx_error(&f, &SamplingOperator::Spline(1), 2 * m, 1.0, &QuadratureSpec::default()).unwrap();
        assert!((e.value - 1.0 / m as f64).abs() < 1e-12, "{}", e.value);
    }
}

#[test]
fn steklov_of_step() {
    // the average of width d replaces each jump of height 2 by a ramp of
    // width d, costing d/2 per jump in L_1
    let f = make_corpus("step", &[]).unwrap();
    for d in [0.1, 0.02] {
        let e = steklov_deviation(&f, d, 1, 1.0, &QuadratureSpec::default()).unwrap();
        assert!((e.value - d).abs() < 1e-10, "{}", e.value);
    }
    // at the Lagrange nodes of an even count the step is never within d/2 of a jump
    let x = lagrange_nodes(8).unwrap();
    let dev = steklov_node_deviation(&f, &x, 1.0 / 17.0, 1, 2.0, &QuadratureSpec::default()).unwrap();
    assert!(dev.value > 0.0);
}

#[test]
fn combined_measure_of_sine_dominates_error() {
    let spec = QuadratureSpec::default();
    let f = parse_corpus_id("sin_k:k=5").unwrap().build().unwrap();
    for n in [2usize, 3, 4] {
        let x = lagrange_nodes(n).unwrap();
        let params = SmoothnessParams::new(1, 1, 2.0, 1.0 / x.len() as f64).unwrap();
        let omega = combined_modulus(&f, &x, &params).unwrap();
        let err = approx_error(&f, &SamplingOperator::Lagrange, n, 2.0, &spec).unwrap();
        assert!(err.value > 0.0 && omega.total > 0.0);
        assert!(err.value / omega.total < 20.0 && omega.total / err.value < 20.0);
        let real = realization(&f, &SamplingOperator::Lagrange, n, 1, 2.0, &spec).unwrap();
        assert!(real.value >= err.value);
    }
    // sin(10 pi x) is reproduced once n >= 5
    let err = approx_error(&f, &SamplingOperator::Lagrange, 5, 2.0, &spec).unwrap();
    assert!(err.value < 1e-12);
    assert!((lp_norm(&f, 1.0, &spec).unwrap().value - 2.0 / PI).abs() < 1e-12);
}

#[test]
fn experiment_reports_the_failing_cell() {
    let cfg = ExperimentConfig {
        function: "power_singularity:alpha=0.5".into(),
        measures: vec![Measure::Tau],
        ns: vec![4, 8],
        ..ExperimentConfig::default()
    };
    match run_experiment(&cfg) {
        Err(Error::Experiment { function, n, .. }) => {
            assert_eq!(function, "power_singularity:alpha=0.5");
            assert_eq!(n, 4);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn config_text_round_trip() {
    let cfg: ExperimentConfig = "fn = step\nop = quasi:raised-cosine\np = 1.5\nj = 2..5\nmeasures = error, best_approx\nmodels = power_log".parse().unwrap();
    let again: ExperimentConfig = cfg.to_string().parse().unwrap();
    assert_eq!(cfg, again);
    assert_eq!(cfg.index(4), 16);
    let report = run_experiment(&cfg).unwrap();
    assert_eq!(report.rows.len(), 8);
    assert_eq!(report.fits.len(), 2);
}
