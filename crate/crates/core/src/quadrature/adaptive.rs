use serde::{Deserialize, Serialize};

use super::gauss::gl16;
use crate::torus::Breakpoint;
use crate::{Error, Result};

/// Tolerances for every integral on the torus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximal number of bisections of an initial panel.
    pub max_depth: u32,
    /// Number of geometric levels toward a singular breakpoint.
    pub graded_mesh_levels: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            abs_tol: 1e-13,
            rel_tol: 1e-10,
            max_depth: 48,
            graded_mesh_levels: 60,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return Err(Error::ParameterOutOfRange(
                "quadrature tolerances must be positive".into(),
            ));
        }
        if self.max_depth < 1 {
            return Err(Error::ParameterOutOfRange("max_depth must be at least 1".into()));
        }
        Ok(())
    }

    pub fn with_tolerances(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }

    pub(crate) fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

/// A computed value together with an estimate of its absolute error.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub fn new(value: f64, error: f64) -> Self {
        Estimate { value, error }
    }

    pub fn exact(value: f64) -> Self {
        Estimate { value, error: 0.0 }
    }

    pub fn add(self, other: Estimate) -> Estimate {
        Estimate::new(self.value + other.value, self.error + other.error)
    }

    pub fn scale(self, c: f64) -> Estimate {
        Estimate::new(self.value * c, self.error * c.abs())
    }

    /// `I^{1/p}` with the error propagated conservatively.
    pub fn root(self, p: f64) -> Estimate {
        let v = self.value.max(0.0);
        let root = v.powf(1.0 / p);
        let upper = (v + self.error).powf(1.0 / p);
        Estimate::new(root, upper - root)
    }
}

/// Composite rule produced by an adaptive run: `int g ~ sum w_i g(x_i)`.
#[derive(Debug, Clone, Default)]
pub struct CompositeRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl CompositeRule {
    fn push_panel(&mut self, a: f64, b: f64) {
        let rule = gl16();
        let len = b - a;
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            self.nodes.push(a + len * x);
            self.weights.push(w * len);
        }
    }
}

pub(super) struct Acc<'r> {
    pub(super) value: f64,
    pub(super) error: f64,
    pub(super) unconverged: bool,
    pub(super) rule: Option<&'r mut CompositeRule>,
    /// Bisections still allowed in this run.
    pub(super) budget: usize,
}

/// Bisections allowed per call before panels are accepted as they are.
pub(super) const SPLIT_BUDGET: usize = 1 << 15;

impl Acc<'_> {
    fn leaf(&mut self, a: f64, b: f64) {
        if let Some(rule) = self.rule.as_deref_mut() {
            rule.push_panel(a, b);
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    sing_left: Option<f64>,
    sing_right: Option<f64>,
}

/// Splits `[a, b]` into `min_panels` uniform panels refined at breakpoints.
fn partition(a: f64, b: f64, breaks: &[Breakpoint], min_panels: usize) -> Vec<Segment> {
    let panels = min_panels.max(1);
    let len = b - a;
    let mut pts: Vec<(f64, Option<f64>)> = (0..=panels)
        .map(|k| {
            let x = if k == panels { b } else { a + len * k as f64 / panels as f64 };
            (x, None)
        })
        .collect();
    for bp in breaks {
        if bp.x >= a && bp.x <= b {
            pts.push((bp.x, bp.singularity));
        }
    }
    pts.sort_by(|u, v| u.0.total_cmp(&v.0));
    let mut merged: Vec<(f64, Option<f64>)> = Vec::with_capacity(pts.len());
    for (x, s) in pts {
        match merged.last_mut() {
            Some(last) if last.0 == x => {
                if last.1.is_none() {
                    last.1 = s;
                }
            }
            _ => merged.push((x, s)),
        }
    }
    merged
        .windows(2)
        .filter(|w| w[1].0 > w[0].0)
        .map(|w| Segment {
            a: w[0].0,
            b: w[1].0,
            sing_left: w[0].1,
            sing_right: w[1].1,
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
pub(super) fn adapt<G: Fn(f64) -> f64 + ?Sized>(
    g: &G,
    a: f64,
    b: f64,
    whole: f64,
    depth: u32,
    density: f64,
    spec: &QuadratureSpec,
    acc: &mut Acc<'_>,
) {
    let rule = gl16();
    let m = 0.5 * (a + b);
    let left = rule.integrate(g, a, m);
    let right = rule.integrate(g, m, b);
    let halves = left + right;
    let err = (whole - halves).abs();
    // node positions carry a relative error of about eps * |x| / (b - a)
    let resolution = 1.0 + a.abs().max(b.abs()) / (b - a);
    let ok = err <= density * (b - a) || err <= 64.0 * f64::EPSILON * resolution * (left.abs() + right.abs());
    let degenerate = !(m > a && m < b);
    if ok || depth >= spec.max_depth || degenerate || !err.is_finite() || acc.budget == 0 {
        if !ok {
            acc.unconverged = true;
        }
        acc.value += halves;
        acc.error += if err.is_finite() { err } else { f64::INFINITY };
        acc.leaf(a, m);
        acc.leaf(m, b);
    } else {
        acc.budget -= 1;
        adapt(g, a, m, left, depth + 1, density, spec, acc);
        adapt(g, m, b, right, depth + 1, density, spec, acc);
    }
}

/// Geometric panels `[u + L 2^{-k-1}, u + L 2^{-k}]` toward the singular end `u`
/// of a segment of length `L`; returns the panels ordered away from `u`.
fn graded_panels(seg: &Segment, toward_left: bool, levels: u32) -> Vec<(f64, f64)> {
    let len = seg.b - seg.a;
    let mut out = Vec::with_capacity(levels as usize);
    let anchor = if toward_left { seg.a } else { seg.b };
    for k in 0..levels {
        let near = len * (0.5f64).powi(k as i32 + 1);
        let far = len * (0.5f64).powi(k as i32);
        if near <= 8.0 * f64::EPSILON * anchor.abs() {
            break;
        }
        if toward_left {
            out.push((seg.a + near, seg.a + far));
        } else {
            out.push((seg.b - far, seg.b - near));
        }
    }
    out
}

/// Core driver shared by the public entry points.
pub(super) fn run<G: Fn(f64) -> f64 + ?Sized>(
    g: &G,
    a: f64,
    b: f64,
    breaks: &[Breakpoint],
    min_panels: usize,
    spec: &QuadratureSpec,
    rule_out: Option<&mut CompositeRule>,
) -> (Estimate, bool) {
    let rule = gl16();
    if !(b > a) {
        return (Estimate::exact(0.0), true);
    }
    // plain panels and graded singular runs, each with a first GL16 value
    enum Piece {
        Plain(f64, f64, f64),
        Graded {
            panels: Vec<(f64, f64, f64)>,
            tail_point: f64,
        },
    }
    let mut pieces = Vec::new();
    let mut crude = 0.0;
    for seg in partition(a, b, breaks, min_panels) {
        let mut subsegs = Vec::new();
        match (seg.sing_left, seg.sing_right) {
            (Some(_), Some(_)) => {
                let m = 0.5 * (seg.a + seg.b);
                subsegs.push((Segment { b: m, sing_right: None, ..seg }, Some(true)));
                subsegs.push((Segment { a: m, sing_left: None, ..seg }, Some(false)));
            }
            (Some(_), None) => subsegs.push((seg, Some(true))),
            (None, Some(_)) => subsegs.push((seg, Some(false))),
            (None, None) => subsegs.push((seg, None)),
        }
        for (s, toward) in subsegs {
            match toward {
                None => {
                    let v = rule.integrate(g, s.a, s.b);
                    crude += v.abs();
                    pieces.push(Piece::Plain(s.a, s.b, v));
                }
                Some(left) => {
                    let panels: Vec<(f64, f64, f64)> =
                        graded_panels(&s, left, spec.graded_mesh_levels.max(1))
                            .into_iter()
                            .map(|(u, v)| {
                                let val = rule.integrate(g, u, v);
                                crude += if val.is_finite() { val.abs() } else { 0.0 };
                                (u, v, val)
                            })
                            .collect();
                    let tail_point = match panels.last() {
                        Some(&(u, _, _)) if left => 0.5 * (s.a + u),
                        Some(&(_, v, _)) => 0.5 * (v + s.b),
                        None => 0.5 * (s.a + s.b),
                    };
                    pieces.push(Piece::Graded { panels, tail_point });
                }
            }
        }
    }
    let density = spec.target(crude) / (b - a);
    let mut acc = Acc {
        value: 0.0,
        error: 0.0,
        unconverged: false,
        rule: rule_out,
        budget: SPLIT_BUDGET,
    };
    for piece in pieces {
        match piece {
            Piece::Plain(u, v, whole) => adapt(g, u, v, whole, 0, density, spec, &mut acc),
            Piece::Graded { panels, tail_point } => {
                let mut vals = Vec::with_capacity(panels.len());
                for (u, v, whole) in panels {
                    let mut sub = Acc {
                        value: 0.0,
                        error: 0.0,
                        unconverged: false,
                        rule: acc.rule.take(),
                        budget: acc.budget,
                    };
                    adapt(g, u, v, whole, 0, density, spec, &mut sub);
                    acc.rule = sub.rule.take();
                    acc.budget = sub.budget;
                    acc.value += sub.value;
                    acc.error += sub.error;
                    acc.unconverged |= sub.unconverged;
                    vals.push(sub.value);
                }
                // extrapolate the dropped piece next to the singular point
                let k = vals.len();
                if k == 0 {
                    continue;
                }
                let last = vals[k - 1];
                let ratio = |i: usize| if vals[i - 1] != 0.0 { vals[i] / vals[i - 1] } else { 0.0 };
                let (tail, tail_err) = if k >= 3 {
                    let q = ratio(k - 1);
                    let drift = (q - ratio(k - 2)).abs();
                    if q.is_finite() && q > 0.0 && q < 1.0 {
                        let t = last * q / (1.0 - q);
                        (t, t.abs() * (drift / (1.0 - q)).min(1.0))
                    } else if q.is_finite() && q.abs() < 1.0 {
                        (0.0, last.abs())
                    } else {
                        acc.unconverged = true;
                        (f64::INFINITY, f64::INFINITY)
                    }
                } else {
                    (0.0, last.abs())
                };
                if tail.is_finite() {
                    acc.value += tail;
                    acc.error += tail_err + last.abs() * f64::EPSILON;
                    if let Some(rule) = acc.rule.as_deref_mut() {
                        // point mass inside the dropped piece
                        let gx = g(tail_point);
                        if gx.is_finite() && gx != 0.0 {
                            rule.nodes.push(tail_point);
                            rule.weights.push(tail / gx);
                        }
                    }
                } else {
                    acc.value = f64::INFINITY;
                    acc.error = f64::INFINITY;
                }
            }
        }
    }
    let ok = acc.value.is_finite()
        && acc.error.is_finite()
        && (!acc.unconverged || acc.error <= spec.target(acc.value));
    (Estimate::new(acc.value, acc.error), ok)
}

/// Integrates `g` over `[a, b]`, splitting at the breakpoints inside the
/// interval, starting from at least `min_panels` uniform panels and grading
/// toward singular breakpoints.
pub fn integrate<G: Fn(f64) -> f64 + ?Sized>(
    g: &G,
    a: f64,
    b: f64,
    breaks: &[Breakpoint],
    min_panels: usize,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    let (est, ok) = run(g, a, b, breaks, min_panels, spec, None);
    if ok {
        Ok(est)
    } else {
        Err(Error::QuadratureNonConvergence {
            estimate: est.value,
            error_bound: est.error,
        })
    }
}

/// Like [`integrate`] but returns the best estimate even without convergence.
pub fn integrate_lenient<G: Fn(f64) -> f64 + ?Sized>(
    g: &G,
    a: f64,
    b: f64,
    breaks: &[Breakpoint],
    min_panels: usize,
    spec: &QuadratureSpec,
) -> Estimate {
    run(g, a, b, breaks, min_panels, spec, None).0
}

/// Integrates `g` and also returns the composite rule it settled on, so that
/// related integrands (e.g. `g(x) e^{-2 pi i l x}`) can reuse the mesh.
pub fn integrate_with_rule<G: Fn(f64) -> f64 + ?Sized>(
    g: &G,
    a: f64,
    b: f64,
    breaks: &[Breakpoint],
    min_panels: usize,
    spec: &QuadratureSpec,
) -> Result<(Estimate, CompositeRule)> {
    let mut rule = CompositeRule::default();
    let (est, ok) = run(g, a, b, breaks, min_panels, spec, Some(&mut rule));
    if ok {
        Ok((est, rule))
    } else {
        Err(Error::QuadratureNonConvergence {
            estimate: est.value,
            error_bound: est.error,
        })
    }
}

/// Integrates over `[a, b]` an integrand given in coordinates centered at
/// its singular breakpoints.
///
/// `g(c, u)` must return the integrand at `c + u`; `c` is either a singular
/// breakpoint from `breaks` or `0.0` when the piece contains none. Callers
/// that can form `c + u` exactly inside their own arithmetic keep full
/// resolution next to singular points that are not at the origin.
pub fn integrate_centered<G: Fn(f64, f64) -> f64 + ?Sized>(
    g: &G,
    a: f64,
    b: f64,
    breaks: &[Breakpoint],
    min_panels: usize,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    let (est, ok) = run_centered(g, a, b, breaks, min_panels, spec);
    if ok {
        Ok(est)
    } else {
        Err(Error::QuadratureNonConvergence {
            estimate: est.value,
            error_bound: est.error,
        })
    }
}

/// Like [`integrate_centered`] but returns the best estimate even without convergence.
pub fn integrate_centered_lenient<G: Fn(f64, f64) -> f64 + ?Sized>(
    g: &G,
    a: f64,
    b: f64,
    breaks: &[Breakpoint],
    min_panels: usize,
    spec: &QuadratureSpec,
) -> Estimate {
    run_centered(g, a, b, breaks, min_panels, spec).0
}

fn run_centered<G: Fn(f64, f64) -> f64 + ?Sized>(
    g: &G,
    a: f64,
    b: f64,
    breaks: &[Breakpoint],
    min_panels: usize,
    spec: &QuadratureSpec,
) -> (Estimate, bool) {
    let mut sing: Vec<f64> = breaks
        .iter()
        .filter(|bp| bp.singularity.is_some() && bp.x >= a && bp.x <= b)
        .map(|bp| bp.x)
        .collect();
    sing.sort_by(|x, y| x.total_cmp(y));
    sing.dedup();
    if sing.is_empty() {
        return run(&|x: f64| g(0.0, x), a, b, breaks, min_panels, spec, None);
    }
    let mut bounds = vec![a];
    for w in sing.windows(2) {
        bounds.push(0.5 * (w[0] + w[1]));
    }
    bounds.push(b);
    let mut total = Estimate::exact(0.0);
    let mut all_ok = true;
    for (i, &c) in sing.iter().enumerate() {
        let (lo, hi) = (bounds[i], bounds[i + 1]);
        if !(hi > lo) {
            continue;
        }
        let local: Vec<Breakpoint> = breaks
            .iter()
            .filter(|bp| bp.x >= lo && bp.x <= hi)
            .map(|bp| Breakpoint {
                x: bp.x - c,
                singularity: if bp.x == c { bp.singularity } else { None },
            })
            .collect();
        let panels = ((min_panels as f64 * (hi - lo) / (b - a)).ceil() as usize).max(1);
        let h = |u: f64| g(c, u);
        let (est, ok) = run(&h, lo - c, hi - c, &local, panels, spec, None);
        total = total.add(est);
        all_ok &= ok;
    }
    (total, all_ok)
}
