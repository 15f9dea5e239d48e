//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::{E, PI};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sampling_core::bench::{check_equivalence, verify_suite, Example, Report};
use sampling_core::kfunc::{realization, CandidateFamily};
use sampling_core::nodes::{lagrange_nodes, perturb_nodes, uniform_nodes};
use sampling_core::operators::{lagrange, SamplingOperator};
use sampling_core::smoothness::{
    binomial, combined_modulus, h_grid, omega_on_grid, steklov_deviation, steklov_node_deviation, steklov_weights, tau,
};
use sampling_core::torus::parse_corpus_id;
use sampling_core::{NodeSet, PeriodicFunction, QuadratureSpec, Rational, SmoothnessParams, TrigPoly};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn corpus(id: &str) -> PeriodicFunction {
    parse_corpus_id(id).unwrap().build().unwrap()
}

/// Parseval on coefficients, independent of the quadrature module.
fn l2_coeffs(t: &TrigPoly) -> f64 {
    t.coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// `int |T|^p` by the uniform rule with `m` points; exact for even integer
/// `p` once `m > p deg T`.
fn trapezoid_power(t: &TrigPoly, p: f64, m: usize) -> f64 {
    (0..m).map(|k| t.eval(k as f64 / m as f64).norm().powf(p)).sum::<f64>() / m as f64
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for &n in &[8usize, 16, 32, 64] {
        for _ in 0..100 {
            let t = TrigPoly::random_real(n, 0.0, &mut rng);
            let l = lagrange(&PeriodicFunction::from_trig("T", &t), n).unwrap();
            worst = worst.max(l2_coeffs(&t.sub(&l)));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(worst < 1e-10 && secs < 10.0, format!("max ||T - L_n T||_2 = {worst:.2e}, {secs:.2} s"))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut violations = 0;
    let mut worst = 0.0f64;
    let mut cases = 0;
    for &p in &[1.0, 2.0, 4.0] {
        for trial in 0..200 {
            let n = rng.gen_range(1..=16);
            let t = TrigPoly::random_real(n, rng.gen_range(0.0..2.0), &mut rng);
            let deg = t.degree() as f64;
            for perturbed in [false, true] {
                let x: NodeSet = if perturbed {
                    let eps = Rational::new(rng.gen_range(1..=3), 8);
                    perturb_nodes(&lagrange_nodes(n).unwrap(), eps, trial as u64).unwrap()
                } else {
                    uniform_nodes(rng.gen_range(1..=3 * n + 1)).unwrap()
                };
                let lhs: f64 = x.to_f64().iter().map(|&xk| t.eval(xk).norm().powf(p)).sum();
                let integral = trapezoid_power(&t, p, 8192);
                let rhs = (p + 1.0) * E / 2.0 * (2.0 * deg + 1.0 / x.min_gap()) * integral;
                // the p = 1 integral is a quadrature approximation
                let slack = if p == 1.0 { 1e-6 * rhs } else { 1e-12 * rhs };
                worst = worst.max(lhs / rhs);
                cases += 1;
                if lhs > rhs + slack {
                    violations += 1;
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        violations == 0 && secs < 30.0,
        format!("{violations} violations in {cases} cases, max ratio {worst:.4}, {secs:.2} s"),
    )
}

fn kappa1(r: usize) -> f64 {
    1.0 / binomial(2 * r, r)
}

fn criterion_3() -> Outcome {
    let spec = QuadratureSpec::default();
    let mut failures = Vec::new();
    let mut oracle_gap = 0.0f64;
    let mut cases = 0;
    for id in ["sin_k:k=3", "step", "spike_at_binary:beta=0.5"] {
        let f = corpus(id);
        for &delta in &[1.0 / 8.0, 1.0 / 32.0, 1.0 / 128.0] {
            for r in 1..=2 {
                for &p in &[1.0, 2.0] {
                    let dev = steklov_deviation(&f, delta, r, p, &spec).unwrap();
                    let w = omega_on_grid(&f, &h_grid(delta, 48), 2 * r, p, &spec).unwrap();
                    if id.starts_with("sin_k") {
                        // multiplier of the average on e^{2 pi i 3 x}, and
                        // |Delta_h^{2r} sin| = (2 sin(3 pi h))^{2r} |sin|, maximal at h = delta
                        let a = PI * 3.0 * delta;
                        let m: f64 = steklov_weights(r).iter().map(|&(wt, c)| wt * (a * c).sin() / (a * c)).sum();
                        let sin_norm = if p == 1.0 { 2.0 / PI } else { 0.5f64.sqrt() };
                        oracle_gap = oracle_gap.max((dev.value - (1.0 - m).abs() * sin_norm).abs());
                        oracle_gap = oracle_gap.max((w.value - (2.0 * a.sin()).powi(2 * r as i32) * sin_norm).abs());
                    }
                    cases += 1;
                    let bound = kappa1(r) * w.value;
                    if dev.value > bound + 2.0 * (dev.error + w.error) + 1e-14 {
                        failures.push(format!("{id} delta={delta} r={r} p={p}: {} > {bound}", dev.value));
                    }
                }
            }
        }
    }
    outcome(
        failures.is_empty() && oracle_gap < 1e-9,
        format!("{} of {cases} cases violate; sine closed-form gap {oracle_gap:.1e} {}", failures.len(), failures.join("; ")),
    )
}

fn criterion_4() -> Outcome {
    let spec = QuadratureSpec::default();
    let mut failures = Vec::new();
    let mut cases = 0;
    let mut tightest = 0.0f64;
    for id in ["dirichlet", "sin_k:k=3", "step", "spike_at_binary:beta=0.25", "spike_shifted:beta=0.25"] {
        let f = corpus(id);
        assert!(f.is_bounded());
        for &n in &[8usize, 16, 32, 64, 128] {
            let x = lagrange_nodes(n).unwrap();
            let big_n = x.len() as f64;
            let delta = x.gamma() / big_n;
            for r in 1..=2 {
                for &p in &[1.0, 2.0] {
                    let node = steklov_node_deviation(&f, &x, delta, r, p, &spec).unwrap();
                    let params = SmoothnessParams::new(2 * r, 1, p, delta).unwrap();
                    let t = tau(&f, &params).unwrap();
                    let factor = kappa1(r) * (delta * big_n).powf(-1.0 / p);
                    let rhs = factor * t.value;
                    let tol = 2.0 * (node.error + factor * t.error) + 1e-12;
                    cases += 1;
                    if rhs > 0.0 {
                        tightest = tightest.max(node.value / rhs);
                    }
                    if node.value > rhs + tol {
                        failures.push(format!("{id} n={n} r={r} p={p}: {} > {rhs}", node.value));
                    }
                }
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!("{} of {cases} cases violate, max lhs/rhs {tightest:.4} {}", failures.len(), failures.join("; ")),
    )
}

fn report_checks(report: &Report) -> (bool, String) {
    let bad: Vec<String> = report.checks.iter().filter(|c| !c.passed).map(|c| c.to_string()).collect();
    (bad.is_empty() && !report.checks.is_empty(), bad.join("; "))
}

fn rows_all(report: &Report, measure: &str, want: f64, atol: f64) -> bool {
    let rows: Vec<_> = report.rows.iter().filter(|r| r.measure == measure).collect();
    !rows.is_empty() && rows.iter().all(|r| (r.value - want).abs() <= atol)
}

fn criterion_5() -> Outcome {
    let ex1 = Example::Ex1.reproduce().unwrap();
    let ex1p = Example::Ex1Plus.reproduce().unwrap();
    let step = Example::Step.reproduce().unwrap();
    let exact = rows_all(&ex1, "error", 1.0, 1e-10)
        && rows_all(&ex1, "combined", 1.0, 1e-10)
        && rows_all(&ex1, "tau", 1.0, 1e-10)
        && rows_all(&ex1, "omega", 0.0, 1e-10)
        && rows_all(&ex1p, "error", 0.0, 1e-10)
        && rows_all(&ex1p, "combined", 0.0, 1e-10)
        && rows_all(&ex1p, "tau", 1.0, 1e-10)
        && rows_all(&step, "node_deviation", 0.0, 1e-12);
    let mut detail = Vec::new();
    let mut fits_ok = true;
    for p in [1.0, 2.0] {
        let b = step.fit("step", "tau", p).map_or(f64::NAN, |f| f.exponent);
        fits_ok &= (b + 1.0 / p).abs() <= 0.05;
        detail.push(format!("tau exponent p={p}: {b:.4}"));
    }
    let mut all = ex1;
    all.extend(ex1p);
    all.extend(step);
    let (checks_ok, bad) = report_checks(&all);
    outcome(exact && fits_ok && checks_ok, format!("exact tables {exact}; {} {bad}", detail.join(", ")))
}

fn exponent(report: &Report, f: &str, m: &str) -> f64 {
    report.fit(f, m, 2.0).map_or(f64::NAN, |x| x.exponent)
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let r = Example::Ex2.reproduce().unwrap();
    let secs = start.elapsed().as_secs_f64();
    let f = "power_singularity:alpha=0.25";
    let ms = ["error", "combined", "omega", "best_approx"];
    let bs: Vec<f64> = ms.iter().map(|m| exponent(&r, f, m)).collect();
    let mut ok = bs.iter().all(|b| (b + 0.25).abs() <= 0.05) && secs < 300.0;
    let mut spread = 0.0f64;
    for i in 0..ms.len() {
        for j in i + 1..ms.len() {
            let eq = check_equivalence(&r.series(f, ms[i], 2.0), &r.series(f, ms[j], 2.0), 20.0).unwrap();
            spread = spread.max(eq.spread);
            ok &= eq.spread <= 20.0;
        }
    }
    let (checks_ok, bad) = report_checks(&r);
    let desc: Vec<String> = ms.iter().zip(&bs).map(|(m, b)| format!("{m} {b:.4}")).collect();
    outcome(ok && checks_ok, format!("{}; max spread {spread:.3}; {secs:.1} s {bad}", desc.join(", ")))
}

fn criterion_7() -> Outcome {
    let r = Example::Pr4.reproduce().unwrap();
    let f = "spike_at_binary:beta=0.25";
    let up = ["node_deviation", "tau", "error"].map(|m| exponent(&r, f, m));
    let down = ["omega", "best_approx"].map(|m| exponent(&r, f, m));
    let gap = up.iter().sum::<f64>() / 3.0 - down.iter().sum::<f64>() / 2.0;
    let ok = up.iter().all(|b| (b - 0.25).abs() <= 0.1) && down.iter().all(|b| (b + 0.25).abs() <= 0.1) && (gap - 0.5).abs() <= 0.15;
    let (checks_ok, bad) = report_checks(&r);
    outcome(
        ok && checks_ok,
        format!(
            "b(node, tau, L*) = {:.3}, {:.3}, {:.3}; b(omega, E) = {:.3}, {:.3}; gap {gap:.3} {bad}",
            up[0], up[1], up[2], down[0], down[1]
        ),
    )
}

fn criterion_8() -> Outcome {
    let r = Example::Pr5.reproduce().unwrap();
    let f = "spike_shifted:beta=0.25";
    let omega_group = ["node_deviation", "omega", "combined", "error"].map(|m| exponent(&r, f, m));
    let t = exponent(&r, f, "tau");
    let ok = omega_group.iter().all(|b| (b + 0.25).abs() <= 0.1) && (t - 0.25).abs() <= 0.1;
    let (checks_ok, bad) = report_checks(&r);
    outcome(
        ok && checks_ok,
        format!(
            "b(node, omega, Omega, L*) = {:.3}, {:.3}, {:.3}, {:.3}; b(tau) = {t:.3} {bad}",
            omega_group[0], omega_group[1], omega_group[2], omega_group[3]
        ),
    )
}

fn spread(ratios: &[f64]) -> f64 {
    let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
    let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
    max / min
}

fn criterion_9() -> Outcome {
    let spec = QuadratureSpec::default();
    let op = SamplingOperator::Lagrange;
    let mut detail = Vec::new();
    let mut ok = true;
    for s in 1..=2usize {
        let (mut k_w, mut semi_o, mut real_o) = (Vec::new(), Vec::new(), Vec::new());
        for id in ["sin_k:k=1", "sin_k:k=3", "spike_at_binary:beta=0.25", "spike_shifted:beta=0.25"] {
            let f = corpus(id);
            for &n in &[8usize, 16, 32, 64, 128] {
                let x = lagrange_nodes(n).unwrap();
                let delta = 1.0 / x.len() as f64;
                let mut fam = CandidateFamily::for_delta(&f, delta, &spec).unwrap();
                let k = fam.k_functional(s, delta, 2.0, &spec).unwrap().value;
                let semi = fam.semi_discrete_k(&x, s, 2.0, &spec).unwrap().value;
                let w = omega_on_grid(&f, &h_grid(delta, 48), s, 2.0, &spec).unwrap().value;
                let params = SmoothnessParams::new(1, s, 2.0, delta).unwrap();
                let big_omega = combined_modulus(&f, &x, &params).unwrap().total;
                let real = realization(&f, &op, n, s, 2.0, &spec).unwrap().value;
                k_w.push(k / w);
                semi_o.push(semi / big_omega);
                real_o.push(real / big_omega);
            }
        }
        for (name, ratios) in [("K/omega", &k_w), ("semi-K/Omega", &semi_o), ("realization/Omega", &real_o)] {
            let sp = spread(ratios);
            ok &= sp <= 20.0 && ratios.iter().all(|r| r.is_finite() && *r > 0.0);
            detail.push(format!("s={s} {name} {sp:.2}"));
        }
    }
    outcome(ok, format!("spreads (pooled over functions and n): {}", detail.join(", ")))
}

fn criterion_10() -> Outcome {
    let mut bad = Vec::new();
    let mut runs = 0;
    for suite in ["moduli-properties", "ns", "steklov", "operator-conditions", "inverse-theorem"] {
        for seed in [7u64, 11, 23] {
            let a = verify_suite(suite, seed).unwrap();
            let b = verify_suite(suite, seed).unwrap();
            runs += 1;
            if !a.passed() || a != b {
                bad.push(format!("{suite}/{seed}: {a}"));
            }
        }
    }
    outcome(bad.is_empty(), format!("{runs} suite runs, twice each; {}", bad.join("; ")))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("1 interpolation exactness", criterion_1),
        ("2 Marcinkiewicz-Zygmund bound", criterion_2),
        ("3 Steklov upper bound", criterion_3),
        ("4 node deviation vs tau", criterion_4),
        ("5 exact example tables", criterion_5),
        ("6 power singularity rates", criterion_6),
        ("7 spikes at binary points", criterion_7),
        ("8 shifted spikes", criterion_8),
        ("9 K-functional equivalences", criterion_9),
        ("10 property suites", criterion_10),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let o = run();
        println!(
            "{} criterion {name}: {} [{:.1} s]",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail.trim(),
            start.elapsed().as_secs_f64()
        );
        if !o.passed {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
