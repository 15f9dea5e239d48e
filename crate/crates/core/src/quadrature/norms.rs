use num_complex::Complex64;

use super::adaptive::{integrate, Estimate, QuadratureSpec};
use super::spectral::integrate_with_trig;
use crate::nodes::NodeSet;
use crate::torus::{Approximant, Breakpoint, PeriodicFunction, SplineFn, TrigPoly};
use crate::{Error, Result};

pub fn validate_p(p: f64) -> Result<()> {
    if p >= 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange(format!("p must satisfy 1 <= p < inf, got {p}")))
    }
}

/// Breakpoints of `f` over one period, including the copy at 1 of a
/// breakpoint at 0.
pub fn torus_breaks(f: &PeriodicFunction) -> Vec<Breakpoint> {
    f.breakpoints_in(0.0, 1.0)
}

/// Anything with an `L_p(T)` norm.
pub trait LpNorm {
    fn lp_norm(&self, p: f64, spec: &QuadratureSpec) -> Result<Estimate>;
}

/// `||g||_p` with an error estimate.
pub fn lp_norm<G: LpNorm + ?Sized>(g: &G, p: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    g.lp_norm(p, spec)
}

impl LpNorm for PeriodicFunction {
    fn lp_norm(&self, p: f64, spec: &QuadratureSpec) -> Result<Estimate> {
        validate_p(p)?;
        let g = |x: f64| self.eval_ae(x).abs().powf(p);
        let panels = (2 * self.bandwidth()).max(1);
        Ok(integrate(&g, 0.0, 1.0, &torus_breaks(self), panels, spec)?.root(p))
    }
}

impl LpNorm for TrigPoly {
    fn lp_norm(&self, p: f64, spec: &QuadratureSpec) -> Result<Estimate> {
        validate_p(p)?;
        if p == 2.0 {
            let v = self.parseval_norm();
            return Ok(Estimate::new(v, v * 4.0 * f64::EPSILON));
        }
        let h = |_: f64, z: Complex64| z.norm().powf(p);
        let smooth_power = p.fract() == 0.0 && (p as u64) % 2 == 0;
        let kinks = if smooth_power { Vec::new() } else { sign_changes(self) };
        Ok(integrate_with_trig(&h, self, &kinks, 0, spec)?.root(p))
    }
}

/// Simple zeros of a real trigonometric polynomial, where `|T|^p` has a kink.
fn sign_changes(t: &TrigPoly) -> Vec<Breakpoint> {
    const MAX_DEGREE: usize = 512;
    let scale = t.max_coeff();
    if t.degree() > MAX_DEGREE || scale == 0.0 || !t.is_real(1e-12 * scale) {
        return Vec::new();
    }
    let m = 16 * (t.degree() + 1);
    let f = |x: f64| t.eval(x).re;
    let grid: Vec<(f64, f64)> = (0..=m).map(|k| k as f64 / m as f64).map(|x| (x, f(x))).collect();
    let mut out = Vec::new();
    for w in grid.windows(2) {
        let ((mut a, mut fa), (mut b, mut fb)) = (w[0], w[1]);
        if fa == 0.0 {
            out.push(Breakpoint::smooth(a));
            continue;
        }
        if fa * fb >= 0.0 {
            continue;
        }
        // Illinois variant of regula falsi
        let mut last = 0;
        for _ in 0..100 {
            if b - a <= 4.0 * f64::EPSILON {
                break;
            }
            let c = ((a * fb - b * fa) / (fb - fa)).clamp(a, b);
            let fc = f(c);
            if fc == 0.0 {
                a = c;
                b = c;
                break;
            }
            if fc * fa > 0.0 {
                a = c;
                fa = fc;
                if last == -1 {
                    fb *= 0.5;
                }
                last = -1;
            } else {
                b = c;
                fb = fc;
                if last == 1 {
                    fa *= 0.5;
                }
                last = 1;
            }
        }
        out.push(Breakpoint::smooth(0.5 * (a + b)));
    }
    out
}

impl LpNorm for SplineFn {
    fn lp_norm(&self, p: f64, spec: &QuadratureSpec) -> Result<Estimate> {
        validate_p(p)?;
        let a = Approximant::Spline(self.clone());
        let g = |x: f64| self.eval(x).abs().powf(p);
        Ok(integrate(&g, 0.0, 1.0, &a.breakpoints(), 1, spec)?.root(p))
    }
}

impl LpNorm for Approximant {
    fn lp_norm(&self, p: f64, spec: &QuadratureSpec) -> Result<Estimate> {
        match self {
            Approximant::Trig(t) => t.lp_norm(p, spec),
            Approximant::Spline(s) => s.lp_norm(p, spec),
        }
    }
}

/// `||f - g||_p` where `f` enters through its a.e. view.
pub fn lp_distance(
    f: &PeriodicFunction,
    g: &Approximant,
    p: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    validate_p(p)?;
    let breaks = torus_breaks(f);
    let est = match g {
        Approximant::Trig(t) => {
            let h = |x: f64, z: Complex64| (Complex64::new(f.eval_ae(x), 0.0) - z).norm().powf(p);
            integrate_with_trig(&h, t, &breaks, f.bandwidth(), spec)?
        }
        Approximant::Spline(s) => {
            let mut all = breaks;
            all.extend(g.breakpoints());
            let h = |x: f64| (f.eval_ae(x) - s.eval(x)).abs().powf(p);
            let panels = (2 * f.bandwidth()).max(s.n());
            integrate(&h, 0.0, 1.0, &all, panels, spec)?
        }
    };
    Ok(est.root(p))
}

/// `(int_0^1 |g|^p)^{1/p}` for a closure with declared breakpoints in `[0, 1]`.
pub fn lp_norm_closure<G: Fn(f64) -> f64 + ?Sized>(
    g: &G,
    breaks: &[Breakpoint],
    min_panels: usize,
    p: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    validate_p(p)?;
    let h = |x: f64| g(x).abs().powf(p);
    Ok(integrate(&h, 0.0, 1.0, breaks, min_panels, spec)?.root(p))
}

/// `((1/n) sum |v_k|^p)^{1/p}`.
pub fn lp_seminorm_discrete(values: &[f64], p: f64) -> Result<f64> {
    validate_p(p)?;
    if values.is_empty() {
        return Err(Error::Empty("discrete seminorm of an empty list".into()));
    }
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return Ok(0.0);
    }
    let s: f64 = values.iter().map(|v| (v.abs() / scale).powf(p)).sum();
    Ok(scale * (s / values.len() as f64).powf(1.0 / p))
}

/// Exact pointwise values of `f` at the nodes, in node order.
pub fn sample_on_nodes(f: &PeriodicFunction, nodes: &NodeSet) -> Vec<f64> {
    nodes.points().iter().map(|q| f.eval_exact(q)).collect()
}
