use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::nodes::{dyadic_nodes, lagrange_nodes, NodeSet};
use crate::quadrature::{sample_on_nodes, QuadratureSpec};
use crate::smoothness::steklov_value;
use crate::torus::{PeriodicFunction, TrigPoly};
use crate::{Error, Result};

/// Largest condition number accepted by [`lagrange_general`].
pub const MAX_CONDITION: f64 = 1e12;

fn forward_dft(values: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = values.iter().map(|v| Complex64::new(*v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
    buf
}

/// Interpolant in `T_n` of values given at `k / (2n + 1)`.
pub fn lagrange_from_values(values: &[f64]) -> TrigPoly {
    let m = values.len();
    assert!(m % 2 == 1, "need an odd number of equispaced samples");
    let n = (m / 2) as i64;
    let y = forward_dft(values);
    let coeffs = (-n..=n).map(|l| y[l.rem_euclid(m as i64) as usize] / m as f64).collect();
    TrigPoly::new(-n, coeffs)
}

/// Trigonometric Lagrange interpolation `L_n(f)` at `t_k = k / (2n + 1)`.
pub fn lagrange(f: &PeriodicFunction, n: usize) -> Result<TrigPoly> {
    let x = lagrange_nodes(n)?;
    Ok(lagrange_from_values(&sample_on_nodes(f, &x)))
}

/// Interpolant with frequencies `-2^{j-1} .. 2^{j-1} - 1` of values at `k / 2^j`.
pub fn modified_lagrange_from_values(values: &[f64]) -> TrigPoly {
    let m = values.len();
    assert!(m >= 2 && m.is_power_of_two(), "need 2^j samples");
    let half = (m / 2) as i64;
    let y = forward_dft(values);
    let coeffs = (-half..half).map(|l| y[l.rem_euclid(m as i64) as usize] / m as f64).collect();
    TrigPoly::new(-half, coeffs)
}

/// Modified Lagrange interpolation `L*_{2^j}(f)` on the dyadic nodes `k / 2^j`.
pub fn modified_lagrange(f: &PeriodicFunction, j: u32) -> Result<TrigPoly> {
    let x = dyadic_nodes(j)?;
    Ok(modified_lagrange_from_values(&sample_on_nodes(f, &x)))
}

/// Interpolant in `T_n` on an arbitrary set of `2n + 1` nodes, together
/// with the 2-norm condition number of the collocation matrix.
pub fn lagrange_general_with_condition(f: &PeriodicFunction, z: &NodeSet) -> Result<(TrigPoly, f64)> {
    let m = z.len();
    if m < 3 || m % 2 == 0 {
        return Err(Error::InvalidNodes(format!("need an odd number (>= 3) of nodes, got {m}")));
    }
    let n = (m / 2) as i64;
    let pts = z.to_f64();
    let a = DMatrix::from_fn(m, m, |k, i| Complex64::from_polar(1.0, 2.0 * PI * (i as i64 - n) as f64 * pts[k]));
    let sv = a.clone().singular_values();
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    let cond = smax / smin;
    if !(cond <= MAX_CONDITION) {
        return Err(Error::Singular(format!(
            "collocation matrix has condition {cond:e}; mesh gap gamma = {}",
            z.gamma()
        )));
    }
    let y = nalgebra::DVector::from_iterator(
        m,
        sample_on_nodes(f, z).into_iter().map(|v| Complex64::new(v, 0.0)),
    );
    let c = a
        .lu()
        .solve(&y)
        .ok_or_else(|| Error::Singular(format!("LU solve failed; mesh gap gamma = {}", z.gamma())))?;
    Ok((TrigPoly::new(-n, c.iter().cloned().collect()), cond))
}

/// `L_n^Z(f)`: the element of `T_n` interpolating `f` on `Z`, `|Z| = 2n + 1`.
pub fn lagrange_general(f: &PeriodicFunction, z: &NodeSet) -> Result<TrigPoly> {
    lagrange_general_with_condition(f, z).map(|(t, _)| t)
}

/// Frequency windows `Phi` for quasi-interpolation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Window {
    /// `Phi = 1`, which gives back `L_n`.
    Dirichlet,
    /// `(1 + cos 2 pi u) / 2`.
    RaisedCosine,
    /// `1 - 2|u|`.
    Triangle,
}

impl Window {
    pub fn eval(&self, u: f64) -> f64 {
        match self {
            Window::Dirichlet => 1.0,
            Window::RaisedCosine => 0.5 * (1.0 + (2.0 * PI * u).cos()),
            Window::Triangle => (1.0 - 2.0 * u.abs()).max(0.0),
        }
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Window::Dirichlet => "dirichlet",
            Window::RaisedCosine => "raised-cosine",
            Window::Triangle => "triangle",
        })
    }
}

impl FromStr for Window {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dirichlet" => Ok(Window::Dirichlet),
            "raised-cosine" | "raised_cosine" | "hann" => Ok(Window::RaisedCosine),
            "triangle" | "fejer" => Ok(Window::Triangle),
            other => Err(Error::Config(format!("unknown window `{other}`"))),
        }
    }
}

/// `Q_n(f) = (2n+1)^{-1} sum_k f(t_k) phi_n(. - t_k)` with
/// `phi_n` having coefficients `Phi(l / (2n + 1))`.
pub fn quasi_interp_with<W: Fn(f64) -> f64 + ?Sized>(f: &PeriodicFunction, n: usize, window: &W) -> Result<TrigPoly> {
    let l = lagrange(f, n)?;
    let m = (2 * n + 1) as f64;
    let coeffs = l
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| c * window((l.lo() + i as i64) as f64 / m))
        .collect();
    Ok(TrigPoly::new(l.lo(), coeffs))
}

pub fn quasi_interp(f: &PeriodicFunction, n: usize, window: Window) -> Result<TrigPoly> {
    quasi_interp_with(f, n, &|u| window.eval(u))
}

/// Sampling Kantorovich operator: `L_n` applied to the window means of `f`
/// of width `1 / (2n + 1)` centred at the nodes.
pub fn kantorovich(f: &PeriodicFunction, n: usize, spec: &QuadratureSpec) -> Result<TrigPoly> {
    let x = lagrange_nodes(n)?;
    let delta = 1.0 / x.len() as f64;
    let means = x
        .to_f64()
        .into_iter()
        .map(|t| steklov_value(f, t, delta, 1, spec).map(|e| e.value))
        .collect::<Result<Vec<f64>>>()?;
    Ok(lagrange_from_values(&means))
}
