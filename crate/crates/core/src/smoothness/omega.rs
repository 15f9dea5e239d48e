use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::difference::{binomial, difference_breakpoints, finite_difference_ae, sign};
use super::SmoothnessParams;
use crate::quadrature::{integrate_centered, lp_norm, validate_p, Estimate, QuadratureSpec};
use crate::torus::{wrap, PeriodicFunction, TrigPoly};
use crate::{Error, Result};

/// A sup-type modulus evaluated on a finite candidate grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModulusEstimate {
    pub value: f64,
    /// Quadrature error at the maximizing grid point.
    pub error: f64,
    /// Maximizing step `h`, when the modulus is a sup over steps.
    pub argmax: Option<f64>,
    pub grid_size: usize,
}

impl ModulusEstimate {
    pub fn estimate(&self) -> Estimate {
        Estimate::new(self.value, self.error)
    }
}

/// `size` log-spaced steps from `delta / 1024` up to `delta` inclusive.
pub fn h_grid(delta: f64, size: usize) -> Vec<f64> {
    assert!(size >= 2, "h grid needs at least two points");
    let lo = (delta / 1024.0).ln();
    let hi = delta.ln();
    let mut grid: Vec<f64> = (0..size)
        .map(|i| (lo + (hi - lo) * i as f64 / (size - 1) as f64).exp())
        .collect();
    grid[size - 1] = delta;
    grid
}

/// `||Delta_h^r f||_p` over the a.e. view.
///
/// Next to a singular point `x0` of `f`, the term `f(x + k h)` that blows up
/// is evaluated as `f(x0 + u)` so that the offset `u` keeps full precision.
pub fn diff_norm(f: &PeriodicFunction, h: f64, r: usize, p: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    validate_p(p)?;
    let breaks = difference_breakpoints(f, h, r);
    let panels = (2 * f.bandwidth()).max(1);
    let mut centers: Vec<(f64, f64, usize)> = Vec::new();
    for k in 0..=r {
        let shift = k as f64 * h;
        for bp in f.breakpoints_in(shift, 1.0 + shift) {
            if bp.singularity.is_some() {
                centers.push(((bp.x - shift).clamp(0.0, 1.0), wrap(bp.x), k));
            }
        }
    }
    let coef: Vec<f64> = (0..=r).map(|j| sign(r - j) * binomial(r, j)).collect();
    let g = |c: f64, u: f64| -> f64 {
        let d = match centers.iter().find(|e| e.0 == c) {
            Some(&(_, x0, k)) => coef
                .iter()
                .enumerate()
                .map(|(j, cj)| cj * f.eval_ae(x0 + ((j as f64 - k as f64) * h + u)))
                .sum(),
            None => finite_difference_ae(f, c + u, h, r),
        };
        d.abs().powf(p)
    };
    Ok(integrate_centered(&g, 0.0, 1.0, &breaks, panels, spec)?.root(p))
}

/// `omega_r(f, delta)_p` as a maximum over [`h_grid`].
pub fn omega(f: &PeriodicFunction, params: &SmoothnessParams) -> Result<ModulusEstimate> {
    params.validate()?;
    let grid = h_grid(params.delta, params.h_grid_size);
    omega_on_grid(f, &grid, params.r, params.p, &params.quadrature)
}

/// Maximum of `||Delta_h^r f||_p` over an explicit list of steps.
pub fn omega_on_grid(
    f: &PeriodicFunction,
    grid: &[f64],
    r: usize,
    p: f64,
    spec: &QuadratureSpec,
) -> Result<ModulusEstimate> {
    check_grid(grid, r)?;
    let mut best = ModulusEstimate {
        value: 0.0,
        error: 0.0,
        argmax: None,
        grid_size: grid.len(),
    };
    for &h in grid {
        let e = diff_norm(f, h, r, p, spec)?;
        if best.argmax.is_none() || e.value > best.value {
            best.value = e.value;
            best.error = e.error;
            best.argmax = Some(h);
        }
    }
    Ok(best)
}

fn check_grid(grid: &[f64], r: usize) -> Result<()> {
    if r == 0 {
        return Err(Error::ParameterOutOfRange("difference order must be at least 1".into()));
    }
    if grid.is_empty() || grid.iter().any(|h| !(*h > 0.0) || !h.is_finite()) {
        return Err(Error::ParameterOutOfRange("step grid must be non-empty and positive".into()));
    }
    Ok(())
}

/// `Delta_h^r T` for a trigonometric polynomial: coefficients times `(e^{2 pi i l h} - 1)^r`.
pub fn trig_difference(t: &TrigPoly, h: f64, r: usize) -> TrigPoly {
    let coeffs = t
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let l = (t.lo() + i as i64) as f64;
            let m = Complex64::from_polar(1.0, 2.0 * PI * l * h) - 1.0;
            c * m.powu(r as u32)
        })
        .collect();
    TrigPoly::new(t.lo(), coeffs)
}

/// `omega_r(T, .)_p` over an explicit step grid, with exact differences.
pub fn omega_trig(t: &TrigPoly, grid: &[f64], r: usize, p: f64, spec: &QuadratureSpec) -> Result<ModulusEstimate> {
    check_grid(grid, r)?;
    let mut best = ModulusEstimate {
        value: 0.0,
        error: 0.0,
        argmax: None,
        grid_size: grid.len(),
    };
    for &h in grid {
        let e = lp_norm(&trig_difference(t, h, r), p, spec)?;
        if best.argmax.is_none() || e.value > best.value {
            best.value = e.value;
            best.error = e.error;
            best.argmax = Some(h);
        }
    }
    Ok(best)
}
