use std::sync::Arc;

use super::difference::{binomial, sign};
use crate::nodes::NodeSet;
use crate::quadrature::{
    integrate_centered, integrate_centered_lenient, integrate_lenient, lp_norm_closure, lp_seminorm_discrete, Estimate, QuadratureSpec,
};
use crate::torus::{rational_to_f64, wrap, Breakpoint, PeriodicFunction};
use crate::{Error, Result};

/// Mean of the a.e. view of `f` over `[x - width/2, x + width/2]`.
pub fn window_average(f: &PeriodicFunction, x: f64, width: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    if !(width > 0.0) {
        return Err(Error::ParameterOutOfRange(format!("window width must be positive, got {width}")));
    }
    let (a, b) = (x - 0.5 * width, x + 0.5 * width);
    let g = |c: f64, u: f64| f.eval_ae(wrap(c) + u);
    let est = integrate_centered(&g, a, b, &f.breakpoints_in(a, b), window_panels(f, width), spec)?;
    Ok(est.scale(1.0 / width))
}

fn window_panels(f: &PeriodicFunction, width: f64) -> usize {
    ((2.0 * f.bandwidth() as f64 * width).ceil() as usize).max(1)
}

/// Pairs `(w_nu, c_nu)`, `nu = 0..r`, with
/// `f_{delta,r}(x) = sum_nu w_nu * mean of f over [x - c_nu delta/2, x + c_nu delta/2]`.
pub fn steklov_weights(r: usize) -> Vec<(f64, f64)> {
    assert!(r >= 1, "Steklov order must be at least 1");
    let middle = binomial(2 * r, r);
    (0..r)
        .map(|nu| {
            let w = 2.0 * sign(r + 1 + nu) * binomial(2 * r, nu) / middle;
            (w, (r - nu) as f64 / r as f64)
        })
        .collect()
}

fn check(delta: f64, r: usize) -> Result<()> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::ParameterOutOfRange(format!("delta must be positive, got {delta}")));
    }
    if r == 0 {
        return Err(Error::ParameterOutOfRange("Steklov order r must be at least 1".into()));
    }
    Ok(())
}

/// `f_{delta,r}(x)` from window integrals of the a.e. view.
pub fn steklov_value(f: &PeriodicFunction, x: f64, delta: f64, r: usize, spec: &QuadratureSpec) -> Result<Estimate> {
    check(delta, r)?;
    let mut acc = Estimate::exact(0.0);
    for (w, c) in steklov_weights(r) {
        acc = acc.add(window_average(f, x, c * delta, spec)?.scale(w));
    }
    Ok(acc)
}

fn steklov_breakpoints(f: &PeriodicFunction, delta: f64, r: usize) -> Vec<Breakpoint> {
    let mut out = Vec::new();
    for (_, c) in steklov_weights(r) {
        for b in f.breakpoints() {
            out.push(Breakpoint::smooth(b.x - 0.5 * c * delta));
            out.push(Breakpoint::smooth(b.x + 0.5 * c * delta));
        }
    }
    out
}

/// Running integral `F(x) = int_0^x f` of a bounded piecewise smooth
/// function, tabulated at its breakpoints.
struct Primitive {
    f: PeriodicFunction,
    knots: Vec<f64>,
    cumulative: Vec<f64>,
    spec: QuadratureSpec,
}

impl Primitive {
    fn new(f: &PeriodicFunction, spec: &QuadratureSpec) -> Self {
        let mut knots = vec![0.0];
        knots.extend(f.breakpoints().iter().map(|b| b.x).filter(|&x| x > 0.0 && x < 1.0));
        knots.push(1.0);
        let mut cumulative = vec![0.0];
        for w in knots.windows(2) {
            let piece = Self::piece(f, w[0], w[1], spec);
            cumulative.push(cumulative.last().unwrap() + piece);
        }
        Primitive {
            f: f.clone(),
            knots,
            cumulative,
            spec: *spec,
        }
    }

    fn piece(f: &PeriodicFunction, a: f64, b: f64, spec: &QuadratureSpec) -> f64 {
        if a == b {
            return 0.0;
        }
        let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
        let g = |x: f64| f.eval_ae(x);
        let panels = ((2.0 * f.bandwidth() as f64 * (hi - lo)).ceil() as usize).max(1);
        sign * integrate_lenient(&g, lo, hi, &[], panels, spec).value
    }

    fn eval(&self, x: f64) -> f64 {
        let k = x.floor();
        let t = x - k;
        let i = self.knots.partition_point(|&y| y <= t).clamp(1, self.knots.len() - 1) - 1;
        let (left, right) = (self.knots[i], self.knots[i + 1]);
        let within = if t - left <= right - t {
            self.cumulative[i] + Self::piece(&self.f, left, t, &self.spec)
        } else {
            self.cumulative[i + 1] - Self::piece(&self.f, t, right, &self.spec)
        };
        within + k * self.cumulative[self.cumulative.len() - 1]
    }

    fn mean(&self, a: f64, b: f64) -> f64 {
        (self.eval(b) - self.eval(a)) / (b - a)
    }
}

/// The Steklov average `f_{delta,r}` as a periodic function.
///
/// Values that fail to converge fall back to the best available estimate.
pub fn steklov(f: &PeriodicFunction, delta: f64, r: usize, spec: &QuadratureSpec) -> Result<PeriodicFunction> {
    check(delta, r)?;
    let weights = Arc::new(steklov_weights(r));
    let g = f.clone();
    let spec = *spec;
    let primitive = (f.is_bounded() && !f.breakpoints().is_empty()).then(|| Primitive::new(f, &spec));
    let value = move |x: f64| {
        weights
            .iter()
            .map(|&(w, c)| {
                let width = c * delta;
                let (a, b) = (x - 0.5 * width, x + 0.5 * width);
                if let Some(prim) = &primitive {
                    return w * prim.mean(a, b);
                }
                let h = |c: f64, u: f64| g.eval_ae(wrap(c) + u);
                let est = integrate_centered_lenient(&h, a, b, &g.breakpoints_in(a, b), window_panels(&g, width), &spec);
                w * est.value / width
            })
            .sum::<f64>()
    };
    let value = Arc::new(value);
    let v2 = Arc::clone(&value);
    Ok(PeriodicFunction::new(
        format!("steklov({},delta={delta},r={r})", f.name()),
        move |q| v2(rational_to_f64(q)),
        move |x| value(x),
    )
    .with_breakpoints(steklov_breakpoints(f, delta, r))
    .with_bandwidth(f.bandwidth()))
}

/// `||f_{delta,r} - f||_p` in the integral sense.
pub fn steklov_deviation(f: &PeriodicFunction, delta: f64, r: usize, p: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    let fd = steklov(f, delta, r, spec)?;
    let mut breaks = f.breakpoints_in(0.0, 1.0);
    breaks.extend(fd.breakpoints_in(0.0, 1.0));
    breaks.sort_by(|a, b| a.x.total_cmp(&b.x));
    let g = |x: f64| fd.eval_ae(x) - f.eval_ae(x);
    let panels = (2 * f.bandwidth()).max((1.0 / delta).ceil().min(4096.0) as usize);
    lp_norm_closure(&g, &breaks, panels, p, spec)
}

/// `||f_{delta,r} - f||_{l_p(X)}`: the average comes from integrals, the
/// node values from the exact view.
pub fn steklov_node_deviation(
    f: &PeriodicFunction,
    nodes: &NodeSet,
    delta: f64,
    r: usize,
    p: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    check(delta, r)?;
    let mut diffs = Vec::with_capacity(nodes.len());
    let mut err = 0.0f64;
    for q in nodes.points() {
        let avg = steklov_value(f, rational_to_f64(q), delta, r, spec)?;
        diffs.push(avg.value - f.eval_exact(q));
        err = err.max(avg.error);
    }
    Ok(Estimate::new(lp_seminorm_discrete(&diffs, p)?, err))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nodes::{lagrange_nodes, uniform_nodes};
    use crate::torus::make_corpus;
    use std::f64::consts::PI;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn weights_for_order_two() {
        let w = steklov_weights(2);
        assert!((w[0].0 + 1.0 / 3.0).abs() < 1e-15 && w[0].1 == 1.0);
        assert!((w[1].0 - 4.0 / 3.0).abs() < 1e-15 && w[1].1 == 0.5);
        for r in 1..6 {
            let total: f64 = steklov_weights(r).iter().map(|w| w.0).sum();
            assert!((total - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn constants_are_fixed() {
        let one = PeriodicFunction::continuous("one", |_| 1.0);
        for r in 1..4 {
            let v = steklov_value(&one, 0.3, 0.2, r, &spec()).unwrap();
            assert!((v.value - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn sine_average() {
        let f = make_corpus("sin_k", &[1.0]).unwrap();
        let v = steklov_value(&f, 0.25, 0.5, 1, &spec()).unwrap();
        assert!((v.value - 2.0 / PI).abs() < 1e-12);
        let delta = 0.13;
        let x = 0.71;
        let expected = (PI * delta).sin() / (PI * delta) * (2.0 * PI * x).sin();
        let sf = steklov(&f, delta, 1, &spec()).unwrap();
        assert!((sf.eval_ae(x) - expected).abs() < 1e-12);
    }

    #[test]
    fn affine_piece_is_reproduced() {
        let f = make_corpus("spike_at_binary", &[0.25]).unwrap();
        // on (1/8, 1/8 + 1/64) f is affine
        let x = 0.125 + 0.008;
        for r in 1..=3 {
            let v = steklov_value(&f, x, 0.004, r, &spec()).unwrap();
            assert!((v.value - f.eval_ae(x)).abs() < 1e-13, "r={r}");
        }
    }

    #[test]
    fn dirichlet_node_deviation() {
        let f = make_corpus("dirichlet", &[]).unwrap();
        let g = make_corpus("dirichlet_even_denominator", &[]).unwrap();
        for n in [3, 8] {
            let x = lagrange_nodes(n).unwrap();
            let delta = 1.0 / (2 * n + 1) as f64;
            assert_eq!(steklov_node_deviation(&f, &x, delta, 1, 2.0, &spec()).unwrap().value, 1.0);
            assert_eq!(steklov_node_deviation(&g, &x, delta, 1, 2.0, &spec()).unwrap().value, 0.0);
        }
    }

    #[test]
    fn step_node_deviation_vanishes() {
        let f = make_corpus("step", &[]).unwrap();
        for n in [4, 16, 64] {
            let x = uniform_nodes(2 * n).unwrap();
            let d = steklov_node_deviation(&f, &x, 1.0 / (2 * n) as f64, 1, 1.0, &spec()).unwrap();
            assert!(d.value < 1e-12, "n={n}: {}", d.value);
        }
    }

    #[test]
    fn step_integral_deviation() {
        // |f_delta - f| is a pair of triangles of height 1 and base delta at each jump
        let f = make_corpus("step", &[]).unwrap();
        let delta = 0.125;
        let d = steklov_deviation(&f, delta, 1, 1.0, &spec()).unwrap();
        assert!((d.value - delta).abs() < 1e-12, "{}", d.value);
    }

    #[test]
    fn rejects_bad_delta() {
        let f = make_corpus("step", &[]).unwrap();
        assert!(steklov_value(&f, 0.1, 0.0, 1, &spec()).is_err());
        assert!(steklov_value(&f, 0.1, 0.1, 0, &spec()).is_err());
    }
}
