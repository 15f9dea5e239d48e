use super::difference::{binomial, sign};
use super::omega::{h_grid, ModulusEstimate};
use super::SmoothnessParams;
use crate::quadrature::{gl16, gl8, pow2_at_least, validate_p, Estimate};
use crate::torus::{rational_to_f64, wrap, Exceptions, PeriodicFunction, Rational};
use crate::{Error, Result};

const MAX_BREAKS_FIRST_ORDER: usize = 64;
const MAX_BREAKS_HIGHER_ORDER: usize = 12;

/// Local modulus `omega_r(f, x, delta)`: the sup of `|Delta_h^r f(t)|` over
/// `t, t + r h` in `[x - r delta/2, x + r delta/2]`, taken over a finite
/// candidate set with default grid sizes.
pub fn local_modulus(f: &PeriodicFunction, x: f64, r: usize, delta: f64) -> f64 {
    let params = SmoothnessParams::default();
    let steps = h_grid(delta, params.h_grid_size);
    local_modulus_with(f, x, r, delta, params.window_grid_size, &steps)
}

/// [`local_modulus`] with an explicit window grid size and list of centered steps.
///
/// Candidates are a uniform grid over the window with its endpoints, the
/// breakpoints of `f` in the window together with points just beside them,
/// one exceptional rational when `f` has an exception set, and the centered
/// differences `Delta_h^r f(x - r h / 2)` for every `h` in `steps`.
pub fn local_modulus_with(
    f: &PeriodicFunction,
    x: f64,
    r: usize,
    delta: f64,
    window_grid: usize,
    steps: &[f64],
) -> f64 {
    let half = 0.5 * r as f64 * delta;
    let (lo, hi) = (x - half, x + half);
    let cap = if r == 1 {
        MAX_BREAKS_FIRST_ORDER
    } else {
        MAX_BREAKS_HIGHER_ORDER
    };
    let cands = candidates(f, lo, hi, window_grid, cap);

    let mut best = 0.0f64;
    for &h in steps {
        if r as f64 * h <= 2.0 * half * (1.0 + 1e-12) {
            best = best.max(ae_difference(f, x - 0.5 * r as f64 * h, h, r).abs());
        }
    }
    if r == 1 {
        let (mn, mx) = cands
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), c| (a.min(c.1), b.max(c.1)));
        return best.max(mx - mn);
    }
    let slack = 1e-12 * (hi - lo);
    let coef: Vec<f64> = (0..=r).map(|k| sign(r - k) * binomial(r, k)).collect();
    for a in 0..cands.len() {
        for b in (a + 1)..cands.len() {
            let (u, fu) = cands[a];
            let (v, fv) = cands[b];
            if !(v > u) {
                continue;
            }
            for i in 0..r {
                for j in (i + 1)..=r {
                    let h = (v - u) / (j - i) as f64;
                    let t = u - i as f64 * h;
                    if t < lo - slack || t + r as f64 * h > hi + slack {
                        continue;
                    }
                    let mut d = 0.0;
                    for (k, c) in coef.iter().enumerate() {
                        let val = if k == i {
                            fu
                        } else if k == j {
                            fv
                        } else {
                            f.eval_ae(t + k as f64 * h)
                        };
                        d += c * val;
                    }
                    best = best.max(d.abs());
                }
            }
        }
    }
    best
}

fn ae_difference(f: &PeriodicFunction, t: f64, h: f64, r: usize) -> f64 {
    (0..=r)
        .map(|k| sign(r - k) * binomial(r, k) * f.eval_ae(t + k as f64 * h))
        .sum()
}

/// Sorted `(position, value)` candidates inside `[lo, hi]`.
fn candidates(f: &PeriodicFunction, lo: f64, hi: f64, m: usize, cap: usize) -> Vec<(f64, f64)> {
    let exceptional = !matches!(f.exceptions(), Exceptions::None);
    let value_at = |x: f64| -> f64 {
        if exceptional {
            if let Some(q) = dyadic_rational(wrap(x)) {
                return f.eval_exact(&q);
            }
        }
        f.eval_ae(x)
    };
    let mut out: Vec<(f64, f64)> = (0..=m)
        .map(|i| {
            let u = if i == m { hi } else { lo + (hi - lo) * i as f64 / m as f64 };
            (u, f.eval_ae(u))
        })
        .collect();

    let mut breaks: Vec<(f64, f64)> = f
        .breakpoints_in(lo, hi)
        .iter()
        .map(|b| (b.x, value_at(b.x)))
        .collect();
    if breaks.len() > cap {
        breaks.sort_by(|a, b| b.1.abs().total_cmp(&a.1.abs()).then(b.0.total_cmp(&a.0)));
        breaks.truncate(cap);
    }
    let eta = 1e-9 * (hi - lo);
    for (b, v) in breaks {
        out.push((b, v));
        for side in [b - eta, b + eta] {
            if side >= lo && side <= hi {
                out.push((side, f.eval_ae(side)));
            }
        }
    }
    if let Some(q) = f.exceptions().proxy_in(lo, hi) {
        out.push((rational_to_f64(&q), f.eval_exact(&q)));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// `x` as a dyadic rational when it has one with denominator at most `2^62`.
fn dyadic_rational(x: f64) -> Option<Rational> {
    let mut scale = 1i64;
    for _ in 0..=62 {
        let y = x * scale as f64;
        if y.fract() == 0.0 && y.abs() < 9.0e18 {
            return Some(Rational::new(y as i64, scale));
        }
        if scale > i64::MAX / 2 {
            break;
        }
        scale *= 2;
    }
    None
}

/// Averaged modulus `tau_r(f, delta)_p = ||omega_r(f, ., delta)||_p`.
pub fn tau(f: &PeriodicFunction, params: &SmoothnessParams) -> Result<ModulusEstimate> {
    let steps = h_grid(params.delta, params.h_grid_size);
    tau_with_grid(f, params, &steps)
}

/// [`tau`] where the centered-difference candidates use the given steps,
/// so that every difference seen by `omega` on that grid is also a window
/// candidate.
pub fn tau_with_grid(f: &PeriodicFunction, params: &SmoothnessParams, steps: &[f64]) -> Result<ModulusEstimate> {
    params.validate()?;
    validate_p(params.p)?;
    if !f.is_bounded() {
        return Err(Error::TauUndefined(f.name().to_string()));
    }
    let (r, delta, p) = (params.r, params.delta, params.p);
    let width = r as f64 * delta;
    let panels = pow2_at_least(((1.0 / width).ceil() as usize).max(16));

    let mut cuts: Vec<f64> = (0..=panels).map(|i| i as f64 / panels as f64).collect();
    for b in f.breakpoints() {
        for c in [b.x - 0.5 * width, b.x + 0.5 * width] {
            let c = c.rem_euclid(1.0);
            if c > 0.0 && c < 1.0 {
                cuts.push(c);
            }
        }
    }
    cuts.sort_by(|a, b| a.total_cmp(b));
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);

    let lm = |x: f64| local_modulus_with(f, x, r, delta, params.window_grid_size, steps).powf(p);
    let (g16, g8) = (gl16(), gl8());
    let mut total = Estimate::exact(0.0);
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b - a <= 0.0 {
            continue;
        }
        let hi = g16.integrate(&lm, a, b);
        let lo = g8.integrate(&lm, a, b);
        total = total.add(Estimate::new(hi, (hi - lo).abs()));
    }
    let root = total.root(p);
    Ok(ModulusEstimate {
        value: root.value,
        error: root.error,
        argmax: None,
        grid_size: params.window_grid_size,
    })
}
