use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sampling_core::bench::{check_equivalence, fit_rate, run_experiment, ExperimentConfig, RateModel};
use sampling_core::kfunc::{best_approx_error, CandidateFamily};
use sampling_core::nodes::{dyadic_nodes, lagrange_nodes, mesh_gap, perturb_nodes};
use sampling_core::operators::{kantorovich, lagrange, SamplingOperator};
use sampling_core::quadrature::{lp_norm, lp_seminorm_discrete};
use sampling_core::smoothness::{h_grid, omega_on_grid, omega_trig, steklov};
use sampling_core::torus::{dirichlet_kernel, make_corpus};
use sampling_core::{PeriodicFunction, QuadratureSpec, Rational, TrigPoly};

fn poly(degree: usize, seed: u64) -> TrigPoly {
    TrigPoly::random_real(degree, 0.5, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn cases(n: u32) -> ProptestConfig {
    ProptestConfig::with_cases(n)
}

proptest! {
    #![proptest_config(cases(48))]

    #[test]
    fn exact_and_ae_views_agree_off_exceptions(num in 1i64..1000, k in 0usize..4) {
        // odd prime denominators avoid every breakpoint of these functions
        let q = Rational::new(num, 1009);
        let f = [
            make_corpus("step", &[]),
            make_corpus("power_singularity", &[0.3]),
            make_corpus("spike_at_binary", &[0.5]),
            make_corpus("sin_k", &[3.0]),
        ][k].clone().unwrap();
        let x = num as f64 / 1009.0;
        prop_assert!((f.eval_exact(&q) - f.eval_ae(x)).abs() <= 1e-12 * (1.0 + f.eval_ae(x).abs()));
    }

    #[test]
    fn dirichlet_kernel_vanishes_at_interpolation_nodes(n in 1usize..200, k in 1usize..400) {
        let k = 1 + k % (2 * n);
        let x = k as f64 / (2 * n + 1) as f64;
        prop_assert!(dirichlet_kernel(n, x).abs() < 1e-9 * n as f64);
    }

    #[test]
    fn derivative_is_linear(seed in any::<u64>(), a in -3.0f64..3.0, s in 1u32..4) {
        let t = poly(6, seed);
        let u = poly(4, seed.wrapping_add(1));
        let lhs = t.scale(a).add(&u).derivative(s);
        let rhs = t.derivative(s).scale(a).add(&u.derivative(s));
        prop_assert!(lhs.sub(&rhs).max_coeff() <= 1e-9 * (1.0 + lhs.max_coeff()));
    }

    #[test]
    fn lagrange_nodes_have_unit_mesh(n in 1usize..2048) {
        prop_assert_eq!(mesh_gap(lagrange_nodes(n).unwrap().points()).unwrap(), 1.0);
    }

    #[test]
    fn perturbation_is_deterministic(n in 1usize..64, e in 0i64..4, seed in any::<u64>()) {
        let x = lagrange_nodes(n).unwrap();
        let eps = Rational::new(e, 8);
        prop_assert_eq!(perturb_nodes(&x, eps, seed).unwrap(), perturb_nodes(&x, eps, seed).unwrap());
    }

    #[test]
    fn discrete_seminorm_increases_with_p(v in prop::collection::vec(-10.0f64..10.0, 1..40), p1 in 1.0f64..6.0, dp in 0.0f64..4.0) {
        let a = lp_seminorm_discrete(&v, p1).unwrap();
        let b = lp_seminorm_discrete(&v, p1 + dp).unwrap();
        prop_assert!(a <= b * (1.0 + 1e-12) + 1e-300);
    }

    #[test]
    fn parseval(degree in 0usize..64, seed in any::<u64>()) {
        let t = poly(degree, seed);
        let direct: f64 = {
            // the uniform rule is exact for |T|^2 with more than 2 deg points
            let m = 2 * degree + 3;
            ((0..m).map(|k| t.eval(k as f64 / m as f64).norm_sqr()).sum::<f64>() / m as f64).sqrt()
        };
        prop_assert!((lp_norm(&t, 2.0, &QuadratureSpec::default()).unwrap().value - direct).abs() < 1e-9 * (1.0 + direct));
    }
}

proptest! {
    #![proptest_config(cases(16))]

    #[test]
    fn triangle_inequality(seed in any::<u64>(), p in prop::sample::select(vec![1.0, 1.5, 3.0, 4.0])) {
        let spec = QuadratureSpec::default();
        let t = poly(8, seed);
        let u = poly(5, seed ^ 0x55);
        let sum = lp_norm(&t.add(&u), p, &spec).unwrap().value;
        let parts = lp_norm(&t, p, &spec).unwrap().value + lp_norm(&u, p, &spec).unwrap().value;
        prop_assert!(sum <= parts + 1e-12 * parts);
        let v: Vec<f64> = (0..17).map(|k| t.eval(k as f64 / 17.0).re).collect();
        let w: Vec<f64> = (0..17).map(|k| u.eval(k as f64 / 17.0).re).collect();
        let vw: Vec<f64> = v.iter().zip(&w).map(|(a, b)| a + b).collect();
        prop_assert!(lp_seminorm_discrete(&vw, p).unwrap() <= lp_seminorm_discrete(&v, p).unwrap() + lp_seminorm_discrete(&w, p).unwrap() + 1e-12);
    }

    #[test]
    fn bernstein_bound_on_modulus(seed in any::<u64>(), degree in 1usize..12, s in 1usize..4, m in 2usize..8) {
        let spec = QuadratureSpec::default();
        let t = poly(degree, seed);
        let delta = 1.0 / (m * degree) as f64;
        let w = omega_trig(&t, &h_grid(delta, 10), s, 2.0, &spec).unwrap();
        let d = lp_norm(&t.derivative(s as u32), 2.0, &spec).unwrap();
        prop_assert!(w.value <= delta.powi(s as i32) * d.value * (1.0 + 1e-10) + 1e-14);
    }

    #[test]
    fn modulus_scaling(seed in any::<u64>(), lambda in 2usize..4) {
        let spec = QuadratureSpec::default();
        let f = PeriodicFunction::from_trig("T", &poly(6, seed)).with_bandwidth(6);
        let g = h_grid(1.0 / 40.0, 8);
        let scaled: Vec<f64> = g.iter().map(|h| h * lambda as f64).collect();
        let a = omega_on_grid(&f, &scaled, 1, 2.0, &spec).unwrap();
        let b = omega_on_grid(&f, &g, 1, 2.0, &spec).unwrap();
        prop_assert!(a.value <= (1.0 + lambda as f64) * b.value + a.error + b.error + 1e-12);
    }

    #[test]
    fn interpolatory_operators_interpolate(
        op in prop::sample::select(vec!["lagrange", "lagrange-z:eps=1/4,seed=3", "mod-lagrange", "spline:1", "spline:2", "spline:3", "spline:4"]),
        k in 0usize..3,
        n in 3usize..6,
    ) {
        let spec = QuadratureSpec::default();
        let f = [make_corpus("step", &[]), make_corpus("spike_at_binary", &[0.25]), make_corpus("sin_k", &[2.0])][k].clone().unwrap();
        let op: SamplingOperator = op.parse().unwrap();
        let index = 1usize << n;
        let g = op.apply(&f, index, &spec).unwrap();
        let x = op.nodes(index).unwrap();
        for (q, xf) in x.points().iter().zip(x.to_f64()) {
            prop_assert!((g.eval(xf).re - f.eval_exact(q)).abs() < 1e-9);
        }
    }

    #[test]
    fn projection_property(seed in any::<u64>(), n in 1usize..24, j in 2u32..7) {
        let spec = QuadratureSpec::default();
        let t = poly(n, seed);
        let back = lagrange(&PeriodicFunction::from_trig("T", &t), n).unwrap();
        prop_assert!(back.sub(&t).max_coeff() < 1e-10);
        // the modified range is T_{m/2 - 1} plus the real part of e^{pi i m x}
        let m = 1usize << j;
        let t = poly(m / 2 - 1, seed);
        let g = SamplingOperator::ModifiedLagrange.apply(&PeriodicFunction::from_trig("T", &t), m, &spec).unwrap();
        prop_assert!(g.as_trig().unwrap().sub(&t).max_coeff() < 1e-10);
    }

    #[test]
    fn kantorovich_is_interpolated_average(n in 2usize..10, k in 0usize..2) {
        let spec = QuadratureSpec::default();
        let f = [make_corpus("step", &[]), make_corpus("spike_at_binary", &[0.5])][k].clone().unwrap();
        let a = kantorovich(&f, n, &spec).unwrap();
        let b = lagrange(&steklov(&f, 1.0 / (2 * n + 1) as f64, 1, &spec).unwrap(), n).unwrap();
        prop_assert!(a.sub(&b).max_coeff() < 1e-9);
    }

    #[test]
    fn k_functional_below_norm_and_monotone(k in 0usize..3, s in 1usize..3) {
        let spec = QuadratureSpec::default();
        let f = [make_corpus("step", &[]), make_corpus("spike_at_binary", &[0.25]), make_corpus("sin_k", &[5.0])][k].clone().unwrap();
        let norm = lp_norm(&f, 2.0, &spec).unwrap().value;
        let mut fam = CandidateFamily::new(&f, 2.0, 64.0, &spec).unwrap();
        let mut prev = 0.0;
        for delta in [1.0 / 64.0, 1.0 / 32.0, 1.0 / 16.0, 1.0 / 8.0] {
            let v = fam.k_functional(s, delta, 2.0, &spec).unwrap().value;
            prop_assert!(v <= norm + 1e-9);
            prop_assert!(v >= prev - 1e-12);
            prev = v;
        }
    }

    #[test]
    fn best_approximation_decreases(k in 0usize..2) {
        let spec = QuadratureSpec::default();
        let f = [make_corpus("step", &[]), make_corpus("power_singularity", &[0.25])][k].clone().unwrap();
        let mut prev = f64::INFINITY;
        for n in [1usize, 2, 4, 8, 16, 32] {
            let e = best_approx_error(&f, n, 2.0, &spec).unwrap();
            prop_assert!(e.exact);
            prop_assert!(e.value <= prev + 1e-12);
            prev = e.value;
        }
    }

    #[test]
    fn fit_recovers_exact_models(c in 0.1f64..10.0, a in -2.0f64..2.0, b in -1.0f64..1.0, p in 1.0f64..4.0) {
        let pure: Vec<(f64, f64)> = [8.0, 16.0, 32.0, 64.0, 128.0].iter().map(|&n: &f64| (n, c * n.powf(a))).collect();
        let fit = fit_rate(&pure, RateModel::PurePower, 2.0).unwrap();
        prop_assert!((fit.exponent - a).abs() < 1e-12);
        let logs: Vec<(f64, f64)> = (6..=12).map(|j| {
            let j = j as f64;
            (j, c * 2f64.powf(-j / p) * j.powf(b))
        }).collect();
        let fit = fit_rate(&logs, RateModel::PowerLog, p).unwrap();
        prop_assert!((fit.exponent - b).abs() < 1e-12);
    }

    #[test]
    fn equivalence_is_symmetric(v in prop::collection::vec(0.01f64..100.0, 4..10), w in prop::collection::vec(0.01f64..100.0, 10), m in 1.0f64..50.0) {
        let a: Vec<(f64, f64)> = v.iter().enumerate().map(|(i, x)| (i as f64, *x)).collect();
        let b: Vec<(f64, f64)> = v.iter().enumerate().map(|(i, _)| (i as f64, w[i])).collect();
        let ab = check_equivalence(&a, &b, m).unwrap();
        let ba = check_equivalence(&b, &a, m).unwrap();
        prop_assert_eq!(ab.passed, ba.passed);
        prop_assert!((ab.spread - ba.spread).abs() <= 1e-12 * ab.spread);
    }
}

#[test]
fn dirichlet_kernel_integrates_to_one() {
    let spec = QuadratureSpec::default();
    for n in [1usize, 5, 17, 64] {
        let coeffs = vec![Complex64::new(1.0, 0.0); 2 * n + 1];
        let kernel = PeriodicFunction::continuous("D", move |x| dirichlet_kernel(n, x)).with_bandwidth(n);
        let integral = sampling_core::quadrature::integrate(&|x: f64| kernel.eval_ae(x), 0.0, 1.0, &[], 2 * n, &spec).unwrap();
        assert!((integral.value - 1.0).abs() < 1e-10, "n = {n}");
        let t = TrigPoly::symmetric(coeffs);
        assert!((t.eval(0.3).re - dirichlet_kernel(n, 0.3)).abs() < 1e-9);
    }
}

#[test]
fn spike_supports_are_disjoint() {
    for l in 3..=40 {
        let (l, p) = (l as i32, 0.5f64);
        assert!(p.powi(l) + 0.25f64.powi(l) < p.powi(l - 1) - 0.25f64.powi(l - 1));
    }
}

#[test]
fn dyadic_nesting() {
    for j in 1..=14 {
        assert!(dyadic_nodes(j).unwrap().is_subset_of(&dyadic_nodes(j + 1).unwrap()));
    }
}

#[test]
fn omega_of_sine_is_monotone_in_delta() {
    let spec = QuadratureSpec::default();
    let f = make_corpus("sin_k", &[2.0]).unwrap();
    let grid = h_grid(0.2, 24);
    let mut prev = 0.0;
    for k in 2..=grid.len() {
        let w = omega_on_grid(&f, &grid[..k], 1, 1.0, &spec).unwrap().value;
        assert!(w >= prev);
        prev = w;
    }
    // ||Delta_h sin(4 pi x)||_1 = 2 |sin(2 pi h)| * 2/pi
    assert!((prev - 2.0 * (2.0 * PI * 0.2).sin() * 2.0 / PI).abs() < 1e-9);
}

#[test]
fn experiment_csv_is_byte_identical() {
    let text = "function = spike_at_binary:beta=0.5\nop = kantorovich\nn = 4,8,16\nmeasures = error,omega,node_deviation\nseed = 5";
    let cfg: ExperimentConfig = text.parse().unwrap();
    let a = run_experiment(&cfg).unwrap().to_csv().unwrap();
    let b = run_experiment(&cfg).unwrap().to_csv().unwrap();
    assert_eq!(a, b);
}
