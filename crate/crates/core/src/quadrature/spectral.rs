//! FFT-accelerated panel quadrature for integrands that involve a
//! trigonometric polynomial of high degree, and for Fourier coefficients.
//!
//! The torus is cut into `P` uniform panels carrying the 16-point
//! Gauss-Legendre rule. Node `q` of panel `i` sits at `(i + xi_q) / P`, so a
//! polynomial evaluated at node `q` of every panel is a length-`P` inverse
//! DFT of its (aliased, phase-shifted) coefficients.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::adaptive::{adapt, integrate_with_rule, run, Acc, Estimate, QuadratureSpec, SPLIT_BUDGET};
use super::gauss::gl16;
use crate::torus::{Breakpoint, PeriodicFunction, TrigPoly};
use crate::{Error, Result};

const Q: usize = 16;

/// Values of `t` at all uniform Gauss nodes, laid out as `[panel][node]`.
pub fn trig_on_uniform_gl(t: &TrigPoly, panels: usize) -> Vec<Complex64> {
    let rule = gl16();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_inverse(panels);
    let mut out = vec![Complex64::new(0.0, 0.0); panels * Q];
    let mut buf = vec![Complex64::new(0.0, 0.0); panels];
    for q in 0..Q {
        buf.iter_mut().for_each(|b| *b = Complex64::new(0.0, 0.0));
        let xi = rule.nodes[q];
        for (idx, c) in t.coeffs().iter().enumerate() {
            let l = t.lo() + idx as i64;
            let phase = Complex64::from_polar(1.0, 2.0 * PI * l as f64 * xi / panels as f64);
            buf[l.rem_euclid(panels as i64) as usize] += c * phase;
        }
        fft.process(&mut buf);
        for i in 0..panels {
            out[i * Q + q] = buf[i];
        }
    }
    out
}

/// Flags panels of a `P`-panel mesh that touch a breakpoint.
fn special_panels(breaks: &[Breakpoint], panels: usize) -> Vec<bool> {
    let mut special = vec![false; panels];
    for bp in breaks {
        let y = crate::torus::wrap(bp.x) * panels as f64;
        let i = (y.floor() as usize).min(panels - 1);
        special[i] = true;
        if y == y.floor() {
            special[(i + panels - 1) % panels] = true;
        }
    }
    special
}

/// Maximal runs of consecutive special panels as intervals of `[0, 1]`.
fn special_runs(special: &[bool]) -> Vec<(f64, f64)> {
    let p = special.len();
    let mut runs = Vec::new();
    let mut i = 0;
    while i < p {
        if special[i] {
            let start = i;
            while i < p && special[i] {
                i += 1;
            }
            runs.push((start as f64 / p as f64, i as f64 / p as f64));
        } else {
            i += 1;
        }
    }
    runs
}

fn breaks_in(breaks: &[Breakpoint], a: f64, b: f64) -> Vec<Breakpoint> {
    breaks.iter().filter(|bp| bp.x >= a && bp.x <= b).copied().collect()
}

/// Smallest power of two that is at least `n`.
pub fn pow2_at_least(n: usize) -> usize {
    n.max(1).next_power_of_two()
}

/// Integrates `h(x, t(x))` over the torus, where `t` is a trigonometric
/// polynomial and `h` is cheap to evaluate.
///
/// `breaks` must list every point in `[0, 1]` where `h(., z)` is not smooth;
/// `bandwidth` is the frequency scale of the `x`-dependence of `h`.
pub fn integrate_with_trig<H>(
    h: &H,
    t: &TrigPoly,
    breaks: &[Breakpoint],
    bandwidth: usize,
    spec: &QuadratureSpec,
) -> Result<Estimate>
where
    H: Fn(f64, Complex64) -> f64 + ?Sized,
{
    let rule = gl16();
    let degree = t.degree().max(bandwidth);
    let panels = pow2_at_least((4 * degree).max(16));
    let coarse = trig_on_uniform_gl(t, panels);
    let fine = trig_on_uniform_gl(t, 2 * panels);
    let special = special_panels(breaks, panels);
    let pointwise = |x: f64| h(x, t.eval(x));

    let node = |level: usize, i: usize, q: usize| (i as f64 + rule.nodes[q]) / level as f64;
    let mut wholes = vec![0.0; panels];
    let mut halves = vec![(0.0, 0.0); panels];
    let mut crude = 0.0;
    for i in 0..panels {
        if special[i] {
            let a = i as f64 / panels as f64;
            crude += rule.integrate(&pointwise, a, a + 1.0 / panels as f64).abs();
            continue;
        }
        let mut w = 0.0;
        let mut l = 0.0;
        let mut r = 0.0;
        for q in 0..Q {
            w += rule.weights[q] * h(node(panels, i, q), coarse[i * Q + q]);
            l += rule.weights[q] * h(node(2 * panels, 2 * i, q), fine[2 * i * Q + q]);
            r += rule.weights[q] * h(node(2 * panels, 2 * i + 1, q), fine[(2 * i + 1) * Q + q]);
        }
        wholes[i] = w / panels as f64;
        halves[i] = (l / (2 * panels) as f64, r / (2 * panels) as f64);
        crude += wholes[i].abs();
    }
    let density = spec.target(crude);

    let mut acc = Acc {
        value: 0.0,
        error: 0.0,
        unconverged: false,
        rule: None,
        budget: SPLIT_BUDGET,
    };
    let width = 1.0 / panels as f64;
    for i in 0..panels {
        if special[i] {
            continue;
        }
        let (l, r) = halves[i];
        let err = (wholes[i] - l - r).abs();
        if err <= density * width {
            acc.value += l + r;
            acc.error += err;
        } else {
            let a = i as f64 * width;
            let m = a + 0.5 * width;
            adapt(&pointwise, a, m, l, 1, density, spec, &mut acc);
            adapt(&pointwise, m, a + width, r, 1, density, spec, &mut acc);
        }
    }
    let mut ok = true;
    for (a, b) in special_runs(&special) {
        let local = QuadratureSpec {
            abs_tol: density * (b - a),
            ..*spec
        };
        let (est, good) = run(&pointwise, a, b, &breaks_in(breaks, a, b), 1, &local, None);
        acc.value += est.value;
        acc.error += est.error;
        ok &= good;
    }
    let converged = acc.value.is_finite()
        && acc.error.is_finite()
        && ((ok && !acc.unconverged) || acc.error <= spec.target(acc.value));
    if converged {
        Ok(Estimate::new(acc.value, acc.error))
    } else {
        Err(Error::QuadratureNonConvergence {
            estimate: acc.value,
            error_bound: acc.error,
        })
    }
}

/// Fourier coefficients `c_l = int f(x) e^{-2 pi i l x} dx` of the a.e. view
/// for `l = -n..=n`, with a bound on the coefficient error.
pub fn fourier_coefficients(
    f: &PeriodicFunction,
    n: usize,
    spec: &QuadratureSpec,
) -> Result<(Vec<Complex64>, f64)> {
    let panels = pow2_at_least((4 * n.max(f.bandwidth())).max(64));
    let (c1, e1) = coefficients_on_mesh(f, n, panels, spec)?;
    let (c2, e2) = coefficients_on_mesh(f, n, 2 * panels, spec)?;
    let diff = c1
        .iter()
        .zip(&c2)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    Ok((c2, diff + e1.max(e2)))
}

fn coefficients_on_mesh(
    f: &PeriodicFunction,
    n: usize,
    panels: usize,
    spec: &QuadratureSpec,
) -> Result<(Vec<Complex64>, f64)> {
    let rule = gl16();
    let breaks = f.breakpoints_in(0.0, 1.0);
    let special = special_panels(&breaks, panels);
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(panels);
    let len = 2 * n + 1;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); len];
    let mut buf = vec![Complex64::new(0.0, 0.0); panels];
    for q in 0..Q {
        let xi = rule.nodes[q];
        for (i, b) in buf.iter_mut().enumerate() {
            *b = if special[i] {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(f.eval_ae((i as f64 + xi) / panels as f64), 0.0)
            };
        }
        fft.process(&mut buf);
        let w = rule.weights[q] / panels as f64;
        for (k, c) in coeffs.iter_mut().enumerate() {
            let l = k as i64 - n as i64;
            let phase = Complex64::from_polar(w, -2.0 * PI * l as f64 * xi / panels as f64);
            *c += phase * buf[l.rem_euclid(panels as i64) as usize];
        }
    }
    let mut err = 0.0;
    for (a, b) in special_runs(&special) {
        let abs = |x: f64| f.eval_ae(x).abs();
        let (est, local) = integrate_with_rule(&abs, a, b, &breaks_in(&breaks, a, b), 1, spec)?;
        err += est.error;
        for (x, w) in local.nodes.iter().zip(&local.weights) {
            let v = f.eval_ae(*x) * w;
            if v == 0.0 {
                continue;
            }
            let step = Complex64::from_polar(1.0, -2.0 * PI * x);
            let mut z = Complex64::from_polar(v, 2.0 * PI * n as f64 * x);
            for (k, c) in coeffs.iter_mut().enumerate() {
                *c += z;
                if k % 64 == 63 {
                    let l = k as i64 + 1 - n as i64;
                    z = Complex64::from_polar(v, -2.0 * PI * l as f64 * x);
                } else {
                    z *= step;
                }
            }
        }
    }
    Ok((coeffs, err))
}
