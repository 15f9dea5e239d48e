//! Peetre and semi-discrete K-functionals, realizations, de la Vallee
//! Poussin means and best-approximation errors.

use num_complex::Complex64;
use serde::Serialize;

use crate::nodes::NodeSet;
use crate::operators::SamplingOperator;
use crate::quadrature::{fourier_coefficients, lp_distance, lp_norm, lp_seminorm_discrete, Estimate, QuadratureSpec};
use crate::torus::{rational_to_f64, Approximant, PeriodicFunction, TrigPoly};
use crate::{Error, Result};

/// Multiplier of the de la Vallee Poussin mean of order `n`.
pub fn vp_taper(l: i64, n: usize) -> f64 {
    let (a, n) = (l.unsigned_abs() as f64, n as f64);
    if a <= n {
        1.0
    } else {
        ((2.0 * n - a) / n).max(0.0)
    }
}

fn vp_from(coeffs: &[Complex64], top: usize, n: usize) -> TrigPoly {
    let deg = 2 * n - 1;
    let c = (-(deg as i64)..=deg as i64)
        .map(|l| coeffs[(l + top as i64) as usize] * vp_taper(l, n))
        .collect();
    TrigPoly::new(-(deg as i64), c)
}

/// `V_n(f)` of degree `2n - 1`, with the largest coefficient error.
pub fn vallee_poussin(f: &PeriodicFunction, n: usize, spec: &QuadratureSpec) -> Result<(TrigPoly, f64)> {
    if n == 0 {
        return Err(Error::ParameterOutOfRange("vallee_poussin needs n >= 1".into()));
    }
    let top = 2 * n;
    let (c, err) = fourier_coefficients(f, top, spec)?;
    Ok((vp_from(&c, top, n), err))
}

/// `E_n(f)_p`, exact (up to quadrature) for `p = 2`; otherwise the
/// near-best upper surrogate `||f - V_n f||_p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BestApprox {
    pub value: f64,
    pub error: f64,
    /// `false` when `value` is only the surrogate upper bound.
    pub exact: bool,
}

pub fn best_approx_error(f: &PeriodicFunction, n: usize, p: f64, spec: &QuadratureSpec) -> Result<BestApprox> {
    if p == 2.0 {
        let (c, cerr) = fourier_coefficients(f, n, spec)?;
        let partial = Approximant::Trig(TrigPoly::new(-(n as i64), c));
        let d = lp_distance(f, &partial, 2.0, spec)?;
        let width = (2 * n + 1) as f64;
        return Ok(BestApprox {
            value: d.value,
            error: d.error + cerr * width.sqrt(),
            exact: true,
        });
    }
    let (v, cerr) = vallee_poussin(f, n.div_ceil(2).max(1), spec)?;
    let d = lp_distance(f, &Approximant::Trig(v), p, spec)?;
    Ok(BestApprox {
        value: d.value,
        error: d.error + cerr * (4 * n + 1) as f64,
        exact: false,
    })
}

/// Candidate minimizers for the K-functionals: `0`, the mean, and
/// `V_m(f)` for dyadic `m` between `lo` and `hi`.
pub struct CandidateFamily<'a> {
    f: &'a PeriodicFunction,
    members: Vec<(String, TrigPoly)>,
    distances: Vec<Option<Estimate>>,
}

impl<'a> CandidateFamily<'a> {
    pub fn new(f: &'a PeriodicFunction, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<Self> {
        let mut ms = Vec::new();
        let mut m = 1usize;
        while (m as f64) <= hi {
            if m as f64 >= lo {
                ms.push(m);
            }
            m *= 2;
        }
        let top = 2 * ms.last().copied().unwrap_or(0).max(1);
        let (c, _) = fourier_coefficients(f, top, spec)?;
        let mut members = vec![
            ("zero".to_string(), TrigPoly::zero()),
            ("mean".to_string(), TrigPoly::new(0, vec![c[top]])),
        ];
        for m in ms {
            members.push((format!("V_{m}"), vp_from(&c, top, m)));
        }
        let distances = vec![None; members.len()];
        Ok(CandidateFamily { f, members, distances })
    }

    /// Family spanning `[1/(4 delta), 4/delta]`.
    pub fn for_delta(f: &'a PeriodicFunction, delta: f64, spec: &QuadratureSpec) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(Error::ParameterOutOfRange(format!("delta must be positive, got {delta}")));
        }
        Self::new(f, 0.25 / delta, 4.0 / delta, spec)
    }

    pub fn members(&self) -> &[(String, TrigPoly)] {
        &self.members
    }

    fn distance(&mut self, i: usize, p: f64, spec: &QuadratureSpec) -> Result<Estimate> {
        if self.distances[i].is_none() || p != 2.0 {
            let d = lp_distance(self.f, &Approximant::Trig(self.members[i].1.clone()), p, spec)?;
            if p != 2.0 {
                return Ok(d);
            }
            self.distances[i] = Some(d);
        }
        Ok(self.distances[i].unwrap())
    }

    /// `min_g (||f - g||_p + delta^s ||g^{(s)}||_p)`.
    pub fn k_functional(&mut self, s: usize, delta: f64, p: f64, spec: &QuadratureSpec) -> Result<KValue> {
        self.minimize(p, spec, |this, i, dist| {
            let g = &this.members[i].1;
            Ok(dist.value + delta.powi(s as i32) * lp_norm(&g.derivative(s as u32), p, spec)?.value)
        })
    }

    /// `min_g (||f - g||_{l_p(X)} + ||f - g||_p + n^{-s} ||g^{(s)}||_p)`, `n = |X|`.
    pub fn semi_discrete_k(&mut self, x: &NodeSet, s: usize, p: f64, spec: &QuadratureSpec) -> Result<KValue> {
        let n = x.len() as f64;
        let fx: Vec<f64> = x.points().iter().map(|q| self.f.eval_exact(q)).collect();
        let xs: Vec<f64> = x.points().iter().map(rational_to_f64).collect();
        self.minimize(p, spec, |this, i, dist| {
            let g = &this.members[i].1;
            let diffs: Vec<f64> = fx.iter().zip(&xs).map(|(v, t)| (Complex64::new(*v, 0.0) - g.eval(*t)).norm()).collect();
            let node = lp_seminorm_discrete(&diffs, p)?;
            Ok(node + dist.value + n.powi(-(s as i32)) * lp_norm(&g.derivative(s as u32), p, spec)?.value)
        })
    }

    fn minimize<F>(&mut self, p: f64, spec: &QuadratureSpec, objective: F) -> Result<KValue>
    where
        F: Fn(&Self, usize, Estimate) -> Result<f64>,
    {
        let mut best: Option<KValue> = None;
        for i in 0..self.members.len() {
            let dist = self.distance(i, p, spec)?;
            let v = objective(self, i, dist)?;
            if best.as_ref().is_none_or(|b| v < b.value) {
                best = Some(KValue {
                    value: v,
                    error: dist.error,
                    argmin: self.members[i].0.clone(),
                });
            }
        }
        Ok(best.expect("family is never empty"))
    }
}

/// A K-functional value, its quadrature error, and the minimizing candidate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KValue {
    pub value: f64,
    pub error: f64,
    pub argmin: String,
}

/// Peetre K-functional `K_s(f, delta)_p` over the de la Vallee Poussin family.
pub fn k_functional(f: &PeriodicFunction, s: usize, delta: f64, p: f64, spec: &QuadratureSpec) -> Result<KValue> {
    CandidateFamily::for_delta(f, delta, spec)?.k_functional(s, delta, p, spec)
}

/// Semi-discrete K-functional `K_s(f, X)_p` with `delta = 1/|X|`.
pub fn semi_discrete_k(f: &PeriodicFunction, x: &NodeSet, s: usize, p: f64, spec: &QuadratureSpec) -> Result<KValue> {
    CandidateFamily::for_delta(f, 1.0 / x.len() as f64, spec)?.semi_discrete_k(x, s, p, spec)
}

/// `||f - G_n f||_p + N^{-s} ||(G_n f)^{(s)}||_p` with `N = |X_n|`.
pub fn realization(
    f: &PeriodicFunction,
    op: &SamplingOperator,
    n: usize,
    s: usize,
    p: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    let g = op.apply(f, n, spec)?;
    let big_n = op.nodes(n)?.len() as f64;
    let err = lp_distance(f, &g, p, spec)?;
    let d = lp_norm(&g.derivative(s)?, p, spec)?;
    Ok(err.add(d.scale(big_n.powi(-(s as i32)))))
}

/// `sum_{k=1}^{depth} N_k^{-s} ||(G_{2^k n} f)^{(s)}||_p`, `N_k = |X_{2^k n}|`.
pub fn realization_tail(
    f: &PeriodicFunction,
    op: &SamplingOperator,
    n: usize,
    s: usize,
    p: f64,
    depth: usize,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    let mut total = Estimate::exact(0.0);
    for k in 1..=depth {
        let m = n << k;
        let g = op.apply(f, m, spec)?;
        let big_n = op.nodes(m)?.len() as f64;
        total = total.add(lp_norm(&g.derivative(s)?, p, spec)?.scale(big_n.powi(-(s as i32))));
    }
    Ok(total)
}
