use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::experiment::Check;
use super::fit::check_equivalence;
use crate::kfunc::CandidateFamily;
use crate::nodes::{lagrange_nodes, perturb_nodes, uniform_nodes};
use crate::operators::{
    estimate_operator_constants, kantorovich, lagrange, lagrange_from_values, mz_check, ns_check, ProfileConfig,
    SamplingOperator,
};
use crate::quadrature::{lp_distance, lp_norm, QuadratureSpec};
use crate::smoothness::{
    binomial, combined_modulus, diff_norm, h_grid, omega_on_grid, omega_trig, steklov, steklov_deviation,
    steklov_node_deviation, tau_with_grid,
};
use crate::torus::{parse_corpus_id, PeriodicFunction, Rational, TrigPoly};
use crate::{Error, Result, SmoothnessParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Suite {
    ModuliProperties,
    Steklov,
    Mz,
    Ns,
    OperatorConditions,
    KfuncEquivalence,
    InverseTheorem,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::ModuliProperties,
        Suite::Steklov,
        Suite::Mz,
        Suite::Ns,
        Suite::OperatorConditions,
        Suite::KfuncEquivalence,
        Suite::InverseTheorem,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::ModuliProperties => "moduli-properties",
            Suite::Steklov => "steklov",
            Suite::Mz => "mz",
            Suite::Ns => "ns",
            Suite::OperatorConditions => "operator-conditions",
            Suite::KfuncEquivalence => "kfunc-equivalence",
            Suite::InverseTheorem => "inverse-theorem",
        }
    }

    pub fn run(&self, seed: u64) -> Result<SuiteReport> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (*self as u64) << 32);
        let spec = QuadratureSpec::default();
        let checks = match self {
            Suite::ModuliProperties => moduli_properties(&mut rng, &spec)?,
            Suite::Steklov => steklov_suite(&mut rng, &spec)?,
            Suite::Mz => mz_suite(&mut rng, &spec)?,
            Suite::Ns => ns_suite(&mut rng, &spec)?,
            Suite::OperatorConditions => operator_conditions(&mut rng, seed, &spec)?,
            Suite::KfuncEquivalence => kfunc_equivalence(&mut rng, &spec)?,
            Suite::InverseTheorem => inverse_theorem(&mut rng, &spec)?,
        };
        Ok(SuiteReport {
            suite: self.name().to_string(),
            seed,
            checks,
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .iter()
            .copied()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::UnknownSuite(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bad = self.failures().count();
        write!(
            f,
            "{} (seed {}): {} checks, {} failed",
            self.suite,
            self.seed,
            self.checks.len(),
            bad
        )
    }
}

/// Runs the named property battery.
pub fn verify_suite(name: &str, seed: u64) -> Result<SuiteReport> {
    name.parse::<Suite>()?.run(seed)
}

fn corpus(id: &str) -> Result<PeriodicFunction> {
    parse_corpus_id(id)?.build()
}

fn pick<T: Copy>(rng: &mut ChaCha8Rng, xs: &[T]) -> T {
    *xs.choose(rng).expect("non-empty choice")
}

fn sample_functions(rng: &mut ChaCha8Rng) -> Vec<String> {
    vec![
        format!("sin_k:k={}", rng.gen_range(1..=4)),
        "step".to_string(),
        format!("spike_at_binary:beta={}", pick(rng, &[0.25, 0.5, 0.75])),
    ]
}

fn leq(name: String, lhs: f64, rhs: f64, tol: f64) -> Check {
    Check::new(name, lhs <= rhs + tol, format!("{lhs:.6e} <= {rhs:.6e} (+{tol:.1e})"))
}

fn moduli_properties(rng: &mut ChaCha8Rng, spec: &QuadratureSpec) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for id in sample_functions(rng) {
        let f = corpus(&id)?;
        let p = pick(rng, &[1.0, 2.0]);
        let delta = pick(rng, &[1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0]);
        let grid = h_grid(delta, 10);
        let norms: Vec<Vec<f64>> = (1..=3)
            .map(|r| grid.iter().map(|&h| diff_norm(&f, h, r, p, spec).map(|e| e.value)).collect())
            .collect::<Result<_>>()?;
        let tol = 1e-8;
        // monotone in delta on the shared grid
        let prefix: Vec<f64> = norms[0]
            .iter()
            .scan(0.0f64, |m, v| {
                *m = m.max(*v);
                Some(*m)
            })
            .collect();
        let w_half = omega_on_grid(&f, &grid[..grid.len() / 2], 1, p, spec)?.value;
        out.push(leq(format!("{id} p={p}: omega monotone"), w_half, prefix[prefix.len() - 1], tol));
        for r in 1..=2 {
            let w_r = norms[r - 1].iter().cloned().fold(0.0, f64::max);
            let w_r1 = norms[r].iter().cloned().fold(0.0, f64::max);
            out.push(leq(format!("{id} p={p}: omega_{} <= 2 omega_{r}", r + 1), w_r1, 2.0 * w_r, tol));
        }
        for lambda in [2usize, 3] {
            let scaled: Vec<f64> = grid.iter().map(|h| h * lambda as f64).collect();
            let w = omega_on_grid(&f, &scaled, 1, p, spec)?.value;
            let base = norms[0].iter().cloned().fold(0.0, f64::max);
            out.push(leq(
                format!("{id} p={p}: omega(f, {lambda} delta) <= {}^r omega(f, delta)", lambda + 1),
                w,
                (lambda as f64 + 1.0) * base,
                tol,
            ));
        }
        let params = SmoothnessParams::new(1, 1, p, delta)?;
        let small = h_grid(delta, 8);
        let t = tau_with_grid(&f, &params, &small)?;
        let w = omega_on_grid(&f, &small, 1, p, spec)?;
        out.push(leq(format!("{id} p={p}: omega <= tau"), w.value, t.value, tol + w.error + t.error));
    }
    // subadditivity on a random pair
    let ids = sample_functions(rng);
    let f = corpus(&ids[0])?;
    let g = corpus(&ids[1])?;
    let grid = h_grid(1.0 / 16.0, 8);
    let sum = f.add(&g);
    let a = omega_on_grid(&sum, &grid, 1, 2.0, spec)?;
    let b = omega_on_grid(&f, &grid, 1, 2.0, spec)?;
    let c = omega_on_grid(&g, &grid, 1, 2.0, spec)?;
    out.push(leq(
        format!("omega({} + {}) subadditive", ids[0], ids[1]),
        a.value,
        b.value + c.value,
        2.0 * (a.error + b.error + c.error) + 1e-10,
    ));
    // Bernstein-type bound for polynomials
    for _ in 0..5 {
        let n = rng.gen_range(2..=10);
        let t = TrigPoly::random_real(n, 1.0, rng);
        let s = rng.gen_range(1..=3);
        let delta = 1.0 / (rng.gen_range(2..=8) * n) as f64;
        let w = omega_trig(&t, &h_grid(delta, 12), s, 2.0, spec)?;
        let d = lp_norm(&t.derivative(s as u32), 2.0, spec)?;
        out.push(leq(
            format!("deg {n}: omega_{s}(T, delta) <= delta^{s} ||T^({s})||"),
            w.value,
            delta.powi(s as i32) * d.value,
            1e-10 * (1.0 + d.value) + w.error,
        ));
    }
    Ok(out)
}

fn kappa1(r: usize) -> f64 {
    1.0 / binomial(2 * r, r)
}

fn steklov_suite(rng: &mut ChaCha8Rng, spec: &QuadratureSpec) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for id in sample_functions(rng) {
        let f = corpus(&id)?;
        let p = pick(rng, &[1.0, 2.0]);
        let delta = pick(rng, &[1.0 / 8.0, 1.0 / 32.0, 1.0 / 128.0]);
        for r in 1..=2 {
            let dev = steklov_deviation(&f, delta, r, p, spec)?;
            let w = omega_on_grid(&f, &h_grid(delta, 12), 2 * r, p, spec)?;
            out.push(leq(
                format!("{id} p={p} r={r} delta={delta}: steklov deviation"),
                dev.value,
                kappa1(r) * w.value,
                2.0 * (dev.error + w.error) + 1e-12,
            ));
        }
        if f.is_bounded() {
            let n = pick(rng, &[8usize, 16, 32]);
            let x = lagrange_nodes(n)?;
            let d = x.gamma() / x.len() as f64;
            let r = pick(rng, &[1usize, 2]);
            let node = steklov_node_deviation(&f, &x, d, r, p, spec)?;
            let params = SmoothnessParams::new(2 * r, 1, p, d)?.with_grids(12, 16);
            let t = crate::smoothness::tau(&f, &params)?;
            let factor = kappa1(r) * (d * x.len() as f64).powf(-1.0 / p);
            out.push(leq(
                format!("{id} p={p} r={r} n={n}: node deviation <= kappa tau"),
                node.value,
                factor * t.value,
                2.0 * (node.error + factor * t.error) + 1e-12,
            ));
        }
    }
    // averaging a trigonometric polynomial multiplies each coefficient
    let t = TrigPoly::random_real(5, 1.0, rng);
    let f = PeriodicFunction::from_trig("T", &t);
    let avg = steklov(&f, 0.05, 1, spec)?;
    let x = rng.gen::<f64>();
    let expected: f64 = (0..t.coeffs().len())
        .map(|i| {
            let l = t.lo() + i as i64;
            let a = std::f64::consts::PI * l as f64 * 0.05;
            let m = if l == 0 { 1.0 } else { a.sin() / a };
            (t.coeffs()[i] * m * num_complex::Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * l as f64 * x)).re
        })
        .sum();
    let got = avg.eval_ae(x);
    out.push(Check::new(
        "steklov multiplier on polynomials",
        (got - expected).abs() < 1e-9,
        format!("{got} vs {expected}"),
    ));
    Ok(out)
}

fn mz_suite(rng: &mut ChaCha8Rng, spec: &QuadratureSpec) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for p in [1.0, 2.0, 4.0] {
        let mut violations = 0;
        let mut worst = 0.0f64;
        for trial in 0..200 {
            let n = rng.gen_range(1..=12);
            let t = TrigPoly::random_real(n, pick(rng, &[0.0, 1.0, 2.0]), rng);
            let x = if trial % 2 == 0 {
                uniform_nodes(rng.gen_range(1..=3 * n + 1))?
            } else {
                let eps = Rational::new(rng.gen_range(1..=3), 8);
                perturb_nodes(&lagrange_nodes(n)?, eps, rng.gen())?
            };
            let c = mz_check(&t, &x, p, spec)?;
            worst = worst.max(c.lhs / c.rhs);
            if !c.holds {
                violations += 1;
            }
        }
        out.push(Check::new(
            format!("MZ bound p={p}"),
            violations == 0,
            format!("{violations} violations in 200 trials, max ratio {worst:.4}"),
        ));
    }
    Ok(out)
}

fn ns_suite(rng: &mut ChaCha8Rng, spec: &QuadratureSpec) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for p in [1.0, 2.0, 4.0] {
        let mut violations = 0;
        let mut worst = 0.0f64;
        for _ in 0..60 {
            let n = rng.gen_range(1..=12);
            let t = TrigPoly::random_real(n, 1.0, rng);
            let r = rng.gen_range(1..=3);
            let h = rng.gen_range(0.05..=1.0) / (2 * t.degree().max(1)) as f64;
            let c = ns_check(&t, r, h, p, spec)?;
            worst = worst.max(c.lhs / c.rhs);
            if !c.holds {
                violations += 1;
            }
        }
        out.push(Check::new(
            format!("NS bound p={p}"),
            violations == 0,
            format!("{violations} violations in 60 trials, max ratio {worst:.4}"),
        ));
    }
    // the exponential is extremal
    let n = rng.gen_range(2..=16);
    let mut coeffs = vec![num_complex::Complex64::new(0.0, 0.0); 2 * n + 1];
    coeffs[2 * n] = num_complex::Complex64::new(1.0, 0.0);
    let e = TrigPoly::new(-(n as i64), coeffs);
    let c = ns_check(&e, 2, 0.3 / n as f64, 2.0, spec)?;
    out.push(Check::new(
        format!("NS equality for e^(2 pi i {n} x)"),
        (c.lhs - c.rhs).abs() <= 1e-9 * c.rhs,
        format!("{} vs {}", c.lhs, c.rhs),
    ));
    Ok(out)
}

fn operator_conditions(rng: &mut ChaCha8Rng, seed: u64, spec: &QuadratureSpec) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let f = corpus(&sample_functions(rng)[2])?;
    let ops = ["lagrange", "lagrange-z", "mod-lagrange", "kantorovich", "spline:2", "spline:3", "spline:4"];
    for name in ops {
        let op: SamplingOperator = name.parse()?;
        if !op.is_interpolatory() {
            continue;
        }
        let n = if name == "mod-lagrange" { 16 } else { rng.gen_range(op.min_index().max(8)..=24) };
        let g = op.apply(&f, n, spec)?;
        let x = op.nodes(n)?;
        let worst = x
            .points()
            .iter()
            .zip(x.to_f64())
            .map(|(q, xf)| (g.eval(xf).re - f.eval_exact(q)).abs())
            .fold(0.0, f64::max);
        out.push(Check::new(format!("{name} n={n}: interpolates"), worst < 1e-9, format!("max residual {worst:.2e}")));
    }
    // projection property
    let n = rng.gen_range(4..=20);
    let t = TrigPoly::random_real(n, 0.0, rng);
    let tf = PeriodicFunction::from_trig("T", &t);
    let back = lagrange(&tf, n)?;
    let diff = back.sub(&t).max_coeff();
    out.push(Check::new(format!("lagrange reproduces degree {n}"), diff < 1e-10, format!("{diff:.2e}")));
    let j = rng.gen_range(3..=6u32);
    let m = 1usize << j;
    let t = TrigPoly::random_real(m / 2 - 1, 0.0, rng);
    let back = SamplingOperator::ModifiedLagrange.apply(&PeriodicFunction::from_trig("T", &t), m, spec)?;
    let diff = back.as_trig().map_or(f64::INFINITY, |b| b.sub(&t).max_coeff());
    out.push(Check::new(format!("mod-lagrange reproduces 2^{j}"), diff < 1e-10, format!("{diff:.2e}")));
    // Kantorovich is interpolation of the Steklov average
    let n = rng.gen_range(4..=12);
    let k = kantorovich(&f, n, spec)?;
    let avg = steklov(&f, 1.0 / (2 * n + 1) as f64, 1, spec)?;
    let l = lagrange(&avg, n)?;
    let diff = k.sub(&l).max_coeff();
    out.push(Check::new(format!("kantorovich = L_{n}(steklov)"), diff < 1e-9, format!("{diff:.2e}")));
    // observed constants of the Lagrange operator
    let cfg = ProfileConfig {
        indices: vec![4, 8],
        trials: 50,
        h_grid_size: 8,
        quadrature: *spec,
    };
    let prof = estimate_operator_constants(&SamplingOperator::Lagrange, 2.0, 1, seed, &cfg)?;
    let finite = [prof.k1, prof.k2, prof.k3, prof.k5].iter().all(|v| v.is_finite()) && prof.k4.is_some_and(f64::is_finite);
    out.push(Check::new(
        "lagrange constants finite",
        finite && prof.mz_violations == 0,
        format!(
            "K1={:.3} K2={:.3} K3={:.3} K4={:?} K5={:.3}, MZ violations {}",
            prof.k1, prof.k2, prof.k3, prof.k4, prof.k5, prof.mz_violations
        ),
    ));
    Ok(out)
}

/// Largest/smallest ratio of two positive series, for equivalence checks.
fn spread_check(name: String, a: &[(f64, f64)], b: &[(f64, f64)], limit: f64) -> Result<Check> {
    let eq = check_equivalence(a, b, f64::INFINITY)?;
    Ok(Check::new(
        name,
        eq.spread <= limit,
        format!("ratios in [{:.3}, {:.3}], spread {:.3}", eq.min_ratio, eq.max_ratio, eq.spread),
    ))
}

fn kfunc_equivalence(rng: &mut ChaCha8Rng, spec: &QuadratureSpec) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let ids = sample_functions(rng);
    for id in [&ids[0], &ids[2]] {
        let f = corpus(id)?;
        let s = pick(rng, &[1usize, 2]);
        let mut k = Vec::new();
        let mut w = Vec::new();
        let mut norm_ok = true;
        let fnorm = lp_norm(&f, 2.0, spec)?.value;
        for n in [8usize, 16, 32] {
            let delta = 1.0 / n as f64;
            let kv = CandidateFamily::for_delta(&f, delta, spec)?.k_functional(s, delta, 2.0, spec)?;
            norm_ok &= kv.value <= fnorm + 1e-9;
            k.push((n as f64, kv.value));
            w.push((n as f64, omega_on_grid(&f, &h_grid(delta, 12), s, 2.0, spec)?.value));
        }
        out.push(Check::new(format!("{id}: K <= ||f||"), norm_ok, format!("||f|| = {fnorm:.4}")));
        out.push(spread_check(format!("{id} s={s}: K / omega"), &k, &w, 20.0)?);
    }
    Ok(out)
}

/// `||f - G_nu f||_p` for `nu = 0..=n`, with `G_0` the constant interpolant at 0.
fn lagrange_errors(f: &PeriodicFunction, n: usize, p: f64, spec: &QuadratureSpec) -> Result<Vec<f64>> {
    let g0 = lagrange_from_values(&[f.eval_exact(&Rational::from_integer(0))]);
    let mut errs = vec![lp_distance(f, &g0.into(), p, spec)?.value];
    for nu in 1..=n {
        errs.push(lp_distance(f, &lagrange(f, nu)?.into(), p, spec)?.value);
    }
    Ok(errs)
}

fn inverse_theorem(rng: &mut ChaCha8Rng, spec: &QuadratureSpec) -> Result<Vec<Check>> {
    const THRESHOLD: f64 = 50.0;
    let mut out = Vec::new();
    let p = 2.0;
    let s = pick(rng, &[1usize, 2]);
    let ids = sample_functions(rng);
    for id in &ids {
        let f = corpus(id)?;
        let params = SmoothnessParams::new(1, s, p, 1.0)?.with_grids(12, 16);
        // trigonometric range: sum over all degrees up to n
        let errs = lagrange_errors(&f, 32, p, spec)?;
        let mut worst = 0.0f64;
        for n in [4usize, 8, 16, 32] {
            let omega = combined_modulus(&f, &lagrange_nodes(n)?, &params)?.total;
            let tail: f64 = (0..=n).map(|nu| (nu as f64 + 1.0).powi(s as i32 - 1) * errs[nu]).sum();
            let rhs = errs[n] + tail / (n as f64).powi(s as i32);
            worst = worst.max(omega / rhs);
        }
        out.push(Check::new(
            format!("{id} lagrange s={s}: inverse inequality"),
            worst <= THRESHOLD,
            format!("observed constant {worst:.3} (threshold {THRESHOLD})"),
        ));
        // dyadic form for the modified operator
        let op = SamplingOperator::ModifiedLagrange;
        let fnorm = lp_norm(&f, p, spec)?.value;
        let dy: Vec<f64> = (0..=6u32)
            .map(|k| {
                let m = 1usize << k;
                if m < op.min_index() {
                    Ok(fnorm)
                } else {
                    Ok(lp_distance(&f, &op.apply(&f, m, spec)?, p, spec)?.value)
                }
            })
            .collect::<Result<_>>()?;
        let mut worst = 0.0f64;
        for j in 2..=6u32 {
            let n = 1usize << j;
            let omega = combined_modulus(&f, &op.nodes(n)?, &params)?.total;
            let sum: f64 = (0..=j as usize)
                .map(|k| {
                    let prev = if k == 0 { fnorm } else { dy[k - 1] };
                    2f64.powi((s * k) as i32) * (dy[k] + prev)
                })
                .sum();
            let rhs = dy[j as usize] + sum / (n as f64).powi(s as i32);
            worst = worst.max(omega / rhs);
        }
        out.push(Check::new(
            format!("{id} mod-lagrange s={s}: inverse inequality"),
            worst <= THRESHOLD,
            format!("observed constant {worst:.3} (threshold {THRESHOLD})"),
        ));
    }
    Ok(out)
}
