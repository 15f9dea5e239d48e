use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::nodes::{uniform_nodes, NodeSet};
use crate::quadrature::sample_on_nodes;
use crate::torus::{bspline_values, PeriodicFunction, SplineFn};
use crate::{Error, Result};

/// Knot offset, in units of `1/n`, for splines of order `m`.
///
/// Odd degree interpolates at the knots; even degree at knot midpoints.
pub fn spline_shift(m: usize) -> f64 {
    if m % 2 == 1 && m >= 3 {
        0.5
    } else {
        0.0
    }
}

/// First column `b_d = B_m(d - shift)` of the circulant collocation matrix.
fn collocation_column(m: usize, n: usize, shift: f64) -> Vec<f64> {
    let t0 = (-shift).rem_euclid(1.0);
    let lead = if shift > 0.0 { 1 } else { 0 };
    let mut col = vec![0.0; n];
    for (i, v) in bspline_values(m, t0).into_iter().enumerate() {
        col[(i + lead) % n] += v;
    }
    col
}

/// Periodic spline of order `m` on `n` uniform knots interpolating `values`
/// at `k / n`.
pub fn spline_from_values(m: usize, values: &[f64]) -> Result<SplineFn> {
    let n = values.len();
    if m == 0 || n < m + 2 {
        return Err(Error::ParameterOutOfRange(format!("spline interpolation needs m >= 1 and n >= m + 2, got m = {m}, n = {n}")));
    }
    let shift = spline_shift(m);
    let col = collocation_column(m, n, shift);
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut sym: Vec<Complex64> = col.iter().map(|v| Complex64::new(*v, 0.0)).collect();
    fwd.process(&mut sym);
    let smallest = sym.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    if smallest < 1e-12 {
        return Err(Error::Singular(format!("spline collocation symbol vanishes (min {smallest:e}) for m = {m}, n = {n}")));
    }
    let mut rhs: Vec<Complex64> = values.iter().map(|v| Complex64::new(*v, 0.0)).collect();
    fwd.process(&mut rhs);
    for (r, s) in rhs.iter_mut().zip(&sym) {
        *r /= s;
    }
    inv.process(&mut rhs);
    let coeffs: Vec<f64> = rhs.iter().map(|z| z.re / n as f64).collect();

    let scale = 1.0 + values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let residual = (0..n)
        .map(|k| {
            let fit: f64 = (0..=m.min(n - 1)).map(|d| col[d] * coeffs[(k + n - d) % n]).sum();
            (fit - values[k]).abs()
        })
        .fold(0.0f64, f64::max);
    if !(residual < 1e-10 * scale) {
        return Err(Error::Singular(format!("spline solve residual {residual:e} for m = {m}, n = {n}")));
    }
    Ok(SplineFn::new(m, shift, coeffs))
}

/// `I_{m,n}(f)`: periodic spline of order `m` (degree `m - 1`) on `n`
/// uniform knots with `I_{m,n}f(k/n) = f(k/n)`.
pub fn spline_interp(f: &PeriodicFunction, m: usize, n: usize) -> Result<SplineFn> {
    let x: NodeSet = uniform_nodes(n)?;
    spline_from_values(m, &sample_on_nodes(f, &x))
}
