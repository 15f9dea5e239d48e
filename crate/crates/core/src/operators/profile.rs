use std::f64::consts::{E, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::SamplingOperator;
use crate::nodes::{lagrange_nodes, perturb_nodes, uniform_nodes, NodeSet};
use crate::quadrature::{lp_distance, lp_norm, lp_seminorm_discrete, sample_on_nodes, QuadratureSpec};
use crate::smoothness::{h_grid, omega_on_grid, omega_trig, trig_difference};
use crate::torus::{Approximant, Breakpoint, PeriodicFunction, Rational, TrigPoly};
use crate::{Error, Result};

/// Left and right sides of an inequality `lhs <= rhs`, with the verdict
/// after allowing for quadrature error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InequalityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
}

impl InequalityCheck {
    fn new(lhs: f64, rhs: f64, slack: f64) -> Self {
        InequalityCheck {
            lhs,
            rhs,
            slack,
            holds: lhs <= rhs + slack,
        }
    }
}

/// `sum_k |T(x_k)|^p <= (p + 1)(e/2)(2n + 1/delta) int |T|^p`, where
/// `n = deg T` and `delta` is the minimal gap of the nodes.
pub fn mz_check(t: &TrigPoly, nodes: &NodeSet, p: f64, spec: &QuadratureSpec) -> Result<InequalityCheck> {
    let lhs: f64 = nodes.to_f64().iter().map(|x| t.eval(*x).norm().powf(p)).sum();
    let norm = lp_norm(t, p, spec)?;
    let factor = (p + 1.0) * E / 2.0 * (2.0 * t.degree() as f64 + 1.0 / nodes.min_gap());
    let integral = norm.value.powf(p);
    let integral_err = p * norm.value.powf(p - 1.0) * norm.error;
    Ok(InequalityCheck::new(lhs, factor * integral, factor * integral_err + 1e-12 * lhs))
}

/// Nikolskii-Stechkin-Boas inequality on the unit period:
/// `||T^{(r)}||_p <= (pi n / sin(pi n h))^r ||Delta_h^r T||_p` for
/// `0 < h <= 1/(2n)`, `n = deg T`. Equality holds for `e^{2 pi i n x}`.
pub fn ns_check(t: &TrigPoly, r: usize, h: f64, p: f64, spec: &QuadratureSpec) -> Result<InequalityCheck> {
    let n = t.degree().max(1) as f64;
    if !(h > 0.0 && h <= 0.5 / n) {
        return Err(Error::ParameterOutOfRange(format!("NS check needs 0 < h <= 1/(2n), got h = {h}, n = {n}")));
    }
    let lhs = lp_norm(&t.derivative(r as u32), p, spec)?;
    let diff = lp_norm(&trig_difference(t, h, r), p, spec)?;
    let factor = (PI * n / (PI * n * h).sin()).powi(r as i32);
    let rhs = factor * diff.value;
    Ok(InequalityCheck::new(
        lhs.value,
        rhs,
        lhs.error + factor * diff.error + 1e-11 * (lhs.value + rhs),
    ))
}

/// Ensemble settings for [`estimate_operator_constants`].
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileConfig {
    /// Operator indices to sample from; inadmissible ones are skipped.
    pub indices: Vec<usize>,
    /// Ensemble size; at least 50.
    pub trials: usize,
    pub h_grid_size: usize,
    pub quadrature: QuadratureSpec,
}

impl Default for ProfileConfig {
    fn default() -> Self {
        ProfileConfig {
            indices: vec![4, 8, 16, 32],
            trials: 50,
            h_grid_size: 16,
            quadrature: QuadratureSpec::default(),
        }
    }
}

/// Observed operator constants. `n` in every ratio is `|X_n|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatorProfile {
    pub operator: String,
    pub p: f64,
    pub s: usize,
    /// max `||G_n f||_p / ||f||_{l_p(X_n)}`
    pub k1: f64,
    /// min of the same ratio
    pub k2: f64,
    /// max `n^s ||f - G_n f||_p / ||f^{(s)}||_p` over smooth `f`
    pub k3: f64,
    /// max `||(G_{2^v} f - G_{2^{v-1}} f)^{(s)}||_p / (n^s ||G_{2^v} f - G_{2^{v-1}} f||_p)`,
    /// trigonometric range only
    pub k4: Option<f64>,
    /// max `n^{-s} ||(G_n f)^{(s)}||_p / omega_s(G_n f, 1/n)_p`
    pub k5: f64,
    /// smallest mesh constant among the node sets used
    pub gamma: f64,
    pub s_max: Option<usize>,
    pub sample_count: usize,
    pub mz_trials: usize,
    pub mz_violations: usize,
    pub mz_max_ratio: f64,
}

fn trial_rng(seed: u64, trial: usize, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.set_word_pos(trial as u128 * 1024);
    rng
}

fn omega_of(g: &Approximant, grid: &[f64], r: usize, p: f64, spec: &QuadratureSpec) -> Result<f64> {
    match g {
        Approximant::Trig(t) => Ok(omega_trig(t, grid, r, p, spec)?.value),
        Approximant::Spline(s) => {
            let sp = s.clone();
            let f = PeriodicFunction::continuous("spline", move |x| sp.eval(x))
                .with_breakpoints(s.knots().into_iter().map(Breakpoint::smooth).collect());
            Ok(omega_on_grid(&f, grid, r, p, spec)?.value)
        }
    }
}

/// Estimates `K_1 .. K_5` of `op` from seeded random ensembles and checks
/// the explicit Marcinkiewicz-Zygmund bound on every trial.
pub fn estimate_operator_constants(
    op: &SamplingOperator,
    p: f64,
    s: usize,
    seed: u64,
    cfg: &ProfileConfig,
) -> Result<OperatorProfile> {
    if cfg.trials < 50 {
        return Err(Error::ParameterOutOfRange(format!("ensembles need at least 50 trials, got {}", cfg.trials)));
    }
    if s == 0 {
        return Err(Error::ParameterOutOfRange("s must be positive".into()));
    }
    if let Some(max) = op.max_derivative() {
        if s > max {
            return Err(Error::ParameterOutOfRange(format!("{op} supports derivatives up to order {max}, got s = {s}")));
        }
    }
    let spec = &cfg.quadrature;
    let indices: Vec<usize> = cfg.indices.iter().copied().filter(|n| op.check_index(*n).is_ok()).collect();
    if indices.is_empty() {
        return Err(Error::Empty(format!("no admissible index for {op} in {:?}", cfg.indices)));
    }
    let sf = s as f64;
    let mut prof = OperatorProfile {
        operator: op.to_string(),
        p,
        s,
        k1: 0.0,
        k2: f64::INFINITY,
        k3: 0.0,
        k4: None,
        k5: 0.0,
        gamma: f64::INFINITY,
        s_max: op.max_derivative(),
        sample_count: 0,
        mz_trials: 0,
        mz_violations: 0,
        mz_max_ratio: 0.0,
    };

    for trial in 0..cfg.trials {
        let n = indices[trial % indices.len()];
        let x = op.nodes(n)?;
        let big_n = x.len() as f64;
        prof.gamma = prof.gamma.min(x.gamma());

        let mut rng = trial_rng(seed, trial, 0);
        let rough = TrigPoly::random_real(2 * x.len(), 0.0, &mut rng);
        let rough_f = PeriodicFunction::from_trig("rough", &rough);
        let samples = sample_on_nodes(&rough_f, &x);
        let disc = lp_seminorm_discrete(&samples, p)?;
        let g = op.apply(&rough_f, n, spec)?;
        if disc > 0.0 {
            let ratio = lp_norm(&g, p, spec)?.value / disc;
            prof.k1 = prof.k1.max(ratio);
            prof.k2 = prof.k2.min(ratio);
            prof.sample_count += 1;
        }

        let gs = lp_norm(&g.derivative(s)?, p, spec)?.value;
        let om = omega_of(&g, &h_grid(1.0 / big_n, cfg.h_grid_size), s, p, spec)?;
        if om > 0.0 {
            prof.k5 = prof.k5.max(big_n.powf(-sf) * gs / om);
        }

        let smooth = TrigPoly::random_real(4 * x.len(), sf + 2.0, &mut rng);
        let smooth_f = PeriodicFunction::from_trig("smooth", &smooth);
        let err = match op.apply(&smooth_f, n, spec)? {
            Approximant::Trig(g) => lp_norm(&smooth.sub(&g), p, spec)?.value,
            g => lp_distance(&smooth_f, &g, p, spec)?.value,
        };
        let ds = lp_norm(&smooth.derivative(s as u32), p, spec)?.value;
        if ds > 0.0 {
            prof.k3 = prof.k3.max(big_n.powf(sf) * err / ds);
        }

        if op.has_trig_range() {
            let mut nu = 1u32;
            while (1usize << nu) <= *indices.last().unwrap() {
                let (hi, lo) = (1usize << nu, 1usize << (nu - 1));
                nu += 1;
                if op.check_index(lo).is_err() || op.check_index(hi).is_err() {
                    continue;
                }
                let a = op.apply(&rough_f, hi, spec)?.sub(&op.apply(&rough_f, lo, spec)?)?;
                let base = lp_norm(&a, p, spec)?.value;
                if base > 1e-12 {
                    let nh = op.nodes(hi)?.len() as f64;
                    let r = lp_norm(&a.derivative(s)?, p, spec)?.value / (nh.powf(sf) * base);
                    prof.k4 = Some(prof.k4.unwrap_or(0.0).max(r));
                }
            }
        }

        let mut mz_rng = trial_rng(seed, trial, 1);
        let t = TrigPoly::random_real(n, 0.0, &mut mz_rng);
        let eps = Rational::new(mz_rng.gen_range(1..=3), 8);
        let node_sets = [
            uniform_nodes(mz_rng.gen_range(1..=3 * n + 1))?,
            perturb_nodes(&lagrange_nodes(n)?, eps, seed.wrapping_add(trial as u64))?,
        ];
        for nodes in &node_sets {
            let c = mz_check(&t, nodes, p, spec)?;
            prof.mz_trials += 1;
            if !c.holds {
                prof.mz_violations += 1;
            }
            if c.rhs > 0.0 {
                prof.mz_max_ratio = prof.mz_max_ratio.max(c.lhs / c.rhs);
            }
        }
    }
    if prof.sample_count == 0 {
        return Err(Error::Empty("every ensemble member had zero samples".into()));
    }
    Ok(prof)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn exponential(n: usize) -> TrigPoly {
        let mut c = vec![Complex64::new(0.0, 0.0); 2 * n + 1];
        c[2 * n] = Complex64::new(1.0, 0.0);
        TrigPoly::symmetric(c)
    }

    #[test]
    fn ns_is_sharp_for_exponential() {
        let spec = QuadratureSpec::default();
        for n in [1usize, 3, 10] {
            for r in [1usize, 2, 3] {
                for h in [0.5 / n as f64, 0.1 / n as f64] {
                    let c = ns_check(&exponential(n), r, h, 2.0, &spec).unwrap();
                    assert!((c.lhs - c.rhs).abs() < 1e-9 * c.rhs, "n={n} r={r}");
                    assert!((c.lhs - (2.0 * PI * n as f64).powi(r as i32)).abs() < 1e-9 * c.lhs);
                }
            }
        }
        assert!(ns_check(&exponential(4), 1, 0.2, 2.0, &spec).is_err());
    }

    #[test]
    fn ns_holds_for_random_polynomials() {
        let spec = QuadratureSpec::default();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for p in [1.0, 2.0, 3.0] {
            for _ in 0..10 {
                let n = rng.gen_range(1..12);
                let t = TrigPoly::random_real(n, 0.0, &mut rng);
                let h = rng.gen_range(0.01..=0.5) / n as f64;
                assert!(ns_check(&t, rng.gen_range(1..4), h, p, &spec).unwrap().holds);
            }
        }
    }

    #[test]
    fn mz_constant_one() {
        // T = 1, nodes k/m: lhs = m, rhs = (p+1)(e/2)(0 + m)
        let spec = QuadratureSpec::default();
        let c = mz_check(&TrigPoly::constant(1.0), &uniform_nodes(7).unwrap(), 2.0, &spec).unwrap();
        assert_eq!(c.lhs, 7.0);
        assert!((c.rhs - 3.0 * E / 2.0 * 7.0).abs() < 1e-12);
        assert!(c.holds);
    }

    #[test]
    fn lagrange_profile_p2() {
        let cfg = ProfileConfig::default();
        let prof = estimate_operator_constants(&SamplingOperator::Lagrange, 2.0, 1, 11, &cfg).unwrap();
        // Parseval on 2n+1 equispaced nodes: ||L_n f||_2 = ||f||_{l_2(X)}
        assert!((prof.k1 - 1.0).abs() < 1e-10 && (prof.k2 - 1.0).abs() < 1e-10);
        assert!(prof.k3.is_finite() && prof.k3 > 0.0);
        assert!(prof.k4.unwrap() <= PI + 1e-9);
        assert!(prof.k5.is_finite() && prof.k5 > 0.0);
        assert_eq!(prof.mz_violations, 0);
        assert_eq!(prof.mz_trials, 100);
        let again = estimate_operator_constants(&SamplingOperator::Lagrange, 2.0, 1, 11, &cfg).unwrap();
        assert_eq!(prof, again);
    }

    #[test]
    fn spline_profile_respects_smoothness() {
        let cfg = ProfileConfig::default();
        assert!(estimate_operator_constants(&SamplingOperator::Spline(2), 2.0, 2, 1, &cfg).is_err());
        let prof = estimate_operator_constants(&SamplingOperator::Spline(4), 2.0, 2, 1, &cfg).unwrap();
        assert!(prof.k4.is_none() && prof.k2 > 0.0 && prof.s_max == Some(3));
    }

    #[test]
    fn small_ensembles_rejected() {
        let cfg = ProfileConfig {
            trials: 10,
            ..Default::default()
        };
        assert!(estimate_operator_constants(&SamplingOperator::Lagrange, 2.0, 1, 0, &cfg).is_err());
    }
}
