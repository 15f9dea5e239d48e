use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::{Error, Result};

/// Rate models fitted in log space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RateModel {
    /// `e_n ~ c n^a`
    PurePower,
    /// `e_n ~ c 2^{-n/p} n^b`
    PowerLog,
}

impl fmt::Display for RateModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RateModel::PurePower => "pure_power",
            RateModel::PowerLog => "power_log",
        })
    }
}

impl FromStr for RateModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pure_power" | "pure-power" => Ok(RateModel::PurePower),
            "power_log" | "power-log" => Ok(RateModel::PowerLog),
            other => Err(Error::Config(format!("unknown rate model `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateFit {
    pub model: RateModel,
    /// `a` for the pure power model, `b` for the power-log model.
    pub exponent: f64,
    pub log_constant: f64,
    /// Root mean square of the log-space residuals.
    pub residual_rms: f64,
    /// Smallest and largest of `e_n / model_n` with the constant left out.
    pub c_low: f64,
    pub c_high: f64,
    pub points: usize,
}

impl RateFit {
    pub fn predict(&self, n: f64, p: f64) -> f64 {
        self.log_constant.exp() * self.shape(n, p)
    }

    fn shape(&self, n: f64, p: f64) -> f64 {
        match self.model {
            RateModel::PurePower => n.powf(self.exponent),
            RateModel::PowerLog => 2f64.powf(-n / p) * n.powf(self.exponent),
        }
    }
}

/// Least-squares fit of `log e_n` (shifted by `n ln 2 / p` for the
/// power-log model) against `log n`.
pub fn fit_rate(pairs: &[(f64, f64)], model: RateModel, p: f64) -> Result<RateFit> {
    if pairs.len() < 4 {
        return Err(Error::TooFewPoints {
            needed: 4,
            got: pairs.len(),
        });
    }
    if model == RateModel::PowerLog && !(p > 0.0 && p.is_finite()) {
        return Err(Error::ParameterOutOfRange(format!("power_log needs p > 0, got {p}")));
    }
    for &(n, v) in pairs {
        if !(v > 0.0) || !(n > 0.0) {
            return Err(Error::NonPositive { n, value: v });
        }
    }
    let xs: Vec<f64> = pairs.iter().map(|(n, _)| n.ln()).collect();
    let ys: Vec<f64> = pairs
        .iter()
        .map(|&(n, v)| match model {
            RateModel::PurePower => v.ln(),
            RateModel::PowerLog => v.ln() + n * std::f64::consts::LN_2 / p,
        })
        .collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Misaligned("all n are equal".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let mut fit = RateFit {
        model,
        exponent: slope,
        log_constant: intercept,
        residual_rms: (rss / k).sqrt(),
        c_low: f64::INFINITY,
        c_high: 0.0,
        points: pairs.len(),
    };
    for &(n, v) in pairs {
        let c = v / fit.shape(n, p);
        fit.c_low = fit.c_low.min(c);
        fit.c_high = fit.c_high.max(c);
    }
    Ok(fit)
}

/// Per-`n` comparison of two measures.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    /// `(n, A/B)`, or `None` for a matched zero pair.
    pub ratios: Vec<(f64, Option<f64>)>,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// `max_ratio / min_ratio` over the non-zero pairs.
    pub spread: f64,
    pub threshold: f64,
    pub passed: bool,
}

/// Absolute tolerance under which both members of a pair count as zero.
pub const ZERO_ATOL: f64 = 1e-10;

/// Checks `1/max_ratio <= A_n / B_n <= max_ratio` for every `n`.
pub fn check_equivalence(a: &[(f64, f64)], b: &[(f64, f64)], max_ratio: f64) -> Result<EquivalenceReport> {
    if a.len() != b.len() || a.iter().zip(b).any(|(x, y)| x.0 != y.0) {
        return Err(Error::Misaligned(format!(
            "n-lists differ: {:?} vs {:?}",
            a.iter().map(|x| x.0).collect::<Vec<_>>(),
            b.iter().map(|x| x.0).collect::<Vec<_>>()
        )));
    }
    if a.is_empty() {
        return Err(Error::Empty("equivalence check needs at least one pair".into()));
    }
    let mut ratios = Vec::with_capacity(a.len());
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    let mut ok = true;
    for (&(n, x), &(_, y)) in a.iter().zip(b) {
        if x.abs() < ZERO_ATOL && y.abs() < ZERO_ATOL {
            ratios.push((n, None));
            continue;
        }
        let r = if y == 0.0 { f64::INFINITY } else { x / y };
        ok &= r.is_finite() && r > 0.0 && r <= max_ratio && r >= 1.0 / max_ratio;
        lo = lo.min(r);
        hi = hi.max(r);
        ratios.push((n, Some(r)));
    }
    let spread = if hi == 0.0 { 1.0 } else { hi / lo };
    Ok(EquivalenceReport {
        ratios,
        min_ratio: if lo.is_finite() { lo } else { 1.0 },
        max_ratio: if hi > 0.0 { hi } else { 1.0 },
        spread,
        threshold: max_ratio,
        passed: ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power() {
        let pairs: Vec<(f64, f64)> = [16.0, 32.0, 64.0, 128.0, 256.0].iter().map(|&n: &f64| (n, n.powf(-0.5))).collect();
        let fit = fit_rate(&pairs, RateModel::PurePower, 2.0).unwrap();
        assert!((fit.exponent + 0.5).abs() < 1e-12);
        assert!(fit.log_constant.abs() < 1e-12 && fit.residual_rms < 1e-12);
        assert!((fit.c_low - 1.0).abs() < 1e-12 && (fit.c_high - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exact_power_log() {
        let pairs: Vec<(f64, f64)> = (6..=12).map(|n| n as f64).map(|n| (n, 3.0 * 2f64.powf(-n / 2.0) * n.powf(0.25))).collect();
        let fit = fit_rate(&pairs, RateModel::PowerLog, 2.0).unwrap();
        assert!((fit.exponent - 0.25).abs() < 1e-12);
        assert!((fit.log_constant - 3f64.ln()).abs() < 1e-12);
        assert!((fit.predict(9.0, 2.0) - pairs[3].1).abs() < 1e-12);
    }

    #[test]
    fn fit_errors() {
        assert!(matches!(fit_rate(&[(1.0, 1.0); 3], RateModel::PurePower, 2.0), Err(Error::TooFewPoints { .. })));
        let bad = [(1.0, 1.0), (2.0, 0.0), (3.0, 1.0), (4.0, 1.0)];
        assert!(matches!(fit_rate(&bad, RateModel::PurePower, 2.0), Err(Error::NonPositive { .. })));
    }

    #[test]
    fn equivalence_basics() {
        let a = vec![(8.0, 1.0), (16.0, 0.5), (32.0, 0.25)];
        let r = check_equivalence(&a, &a, 1.0).unwrap();
        assert!(r.passed && r.spread == 1.0);
        let b: Vec<(f64, f64)> = a.iter().map(|&(n, v)| (n, v / 3.0)).collect();
        assert!(check_equivalence(&a, &b, 3.0 + 1e-12).unwrap().passed);
        assert!(!check_equivalence(&a, &b, 2.9).unwrap().passed);
        assert!(check_equivalence(&a, &b[..2], 3.0).is_err());
    }

    #[test]
    fn zero_pairs() {
        let a = vec![(1.0, 0.0), (2.0, 1e-12), (3.0, 1.0)];
        let b = vec![(1.0, 0.0), (2.0, 0.0), (3.0, 2.0)];
        let r = check_equivalence(&a, &b, 2.0).unwrap();
        assert!(r.passed);
        assert_eq!(r.ratios[0].1, None);
        let c = vec![(1.0, 0.5), (2.0, 0.0), (3.0, 2.0)];
        assert!(!check_equivalence(&c, &b, 100.0).unwrap().passed);
    }
}
