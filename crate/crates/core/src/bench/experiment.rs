use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::config::{ExperimentConfig, Measure};
use super::fit::{check_equivalence, fit_rate, RateFit, RateModel, ZERO_ATOL};
use crate::kfunc::{best_approx_error, CandidateFamily};
use crate::operators::{approx_error, SamplingOperator};
use crate::quadrature::{lp_distance, lp_norm, Estimate};
use crate::smoothness::{combined_modulus, h_grid, omega_on_grid, steklov_node_deviation, tau, SmoothnessParams};
use crate::torus::{parse_corpus_id, PeriodicFunction};
use crate::{Error, Result};

/// One tabulated value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub function: String,
    pub operator: String,
    pub measure: String,
    pub n: usize,
    pub p: f64,
    pub value: f64,
    pub quadrature_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitRow {
    pub function: String,
    pub operator: String,
    pub measure: String,
    pub p: f64,
    #[serde(flatten)]
    pub fit: RateFit,
}

/// A named pass/fail verdict with a human-readable detail.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Report {
    pub title: String,
    pub rows: Vec<Row>,
    pub fits: Vec<FitRow>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn extend(&mut self, other: Report) {
        self.rows.extend(other.rows);
        self.fits.extend(other.fits);
        self.checks.extend(other.checks);
    }

    /// `(n, value)` for one function, measure and exponent.
    pub fn series(&self, function: &str, measure: &str, p: f64) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .filter(|r| r.function == function && r.measure == measure && r.p == p)
            .map(|r| (r.n as f64, r.value))
            .collect()
    }

    pub fn fit(&self, function: &str, measure: &str, p: f64) -> Option<&RateFit> {
        self.fits
            .iter()
            .find(|f| f.function == function && f.measure == measure && f.p == p)
            .map(|f| &f.fit)
    }

    /// Header plus one line per row: `function,operator,measure,n,p,value,quadrature_error`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            w.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
        }
        if self.rows.is_empty() {
            w.write_record(["function", "operator", "measure", "n", "p", "value", "quadrature_error"])
                .map_err(|e| Error::Io(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn fits_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["function", "operator", "measure", "p", "model", "exponent", "log_constant", "residual_rms", "c_low", "c_high", "points"])
            .map_err(|e| Error::Io(e.to_string()))?;
        for f in &self.fits {
            w.write_record([
                f.function.clone(),
                f.operator.clone(),
                f.measure.clone(),
                f.p.to_string(),
                f.fit.model.to_string(),
                f.fit.exponent.to_string(),
                f.fit.log_constant.to_string(),
                f.fit.residual_rms.to_string(),
                f.fit.c_low.to_string(),
                f.fit.c_high.to_string(),
                f.fit.points.to_string(),
            ])
            .map_err(|e| Error::Io(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }
}

/// Evaluates one measure at one operator index.
pub fn measure_value(
    f: &PeriodicFunction,
    op: &SamplingOperator,
    index: usize,
    measure: Measure,
    cfg: &ExperimentConfig,
) -> Result<Estimate> {
    let spec = &cfg.quadrature;
    let x = op.nodes(index)?;
    let big_n = x.len() as f64;
    let grid = || h_grid(1.0 / big_n, cfg.h_grid_size);
    let omega_s = || omega_on_grid(f, &grid(), cfg.s, cfg.p, spec).map(|m| m.estimate());
    match measure {
        Measure::Error => approx_error(f, op, index, cfg.p, spec),
        Measure::Omega => omega_s(),
        Measure::Tau => {
            let params = SmoothnessParams {
                r: cfg.tau_order,
                s: 1,
                p: cfg.p,
                delta: 1.0 / big_n,
                h_grid_size: cfg.h_grid_size,
                window_grid_size: cfg.window_grid_size,
                quadrature: *spec,
            };
            tau(f, &params).map(|m| m.estimate())
        }
        Measure::NodeDeviation => steklov_node_deviation(f, &x, x.gamma() / big_n, cfg.r, cfg.p, spec),
        Measure::Combined => {
            let params = SmoothnessParams {
                r: cfg.r,
                s: cfg.s,
                p: cfg.p,
                delta: 1.0 / big_n,
                h_grid_size: cfg.h_grid_size,
                window_grid_size: cfg.window_grid_size,
                quadrature: *spec,
            };
            combined_modulus(f, &x, &params).map(|c| Estimate::new(c.total, c.error))
        }
        Measure::BestApprox => best_approx_error(f, index, cfg.p, spec).map(|b| Estimate::new(b.value, b.error)),
        Measure::KClassical => {
            let delta = 1.0 / big_n;
            let k = CandidateFamily::for_delta(f, delta, spec)?.k_functional(cfg.s, delta, cfg.p, spec)?;
            Ok(Estimate::new(k.value, k.error))
        }
        Measure::KSemi => {
            let k = CandidateFamily::for_delta(f, 1.0 / big_n, spec)?.semi_discrete_k(&x, cfg.s, cfg.p, spec)?;
            Ok(Estimate::new(k.value, k.error))
        }
        Measure::Realization => {
            let g = op.apply(f, index, spec)?;
            let err = lp_distance(f, &g, cfg.p, spec)?;
            let d = lp_norm(&g.derivative(cfg.s)?, cfg.p, spec)?;
            Ok(err.add(d.scale(big_n.powi(-(cfg.s as i32)))))
        }
    }
}

/// Runs every (measure, n) cell of `cfg` in order and fits the requested
/// models to each measure.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let f = parse_corpus_id(&cfg.function)?.build()?;
    let op: SamplingOperator = cfg.operator.parse()?;
    let mut report = Report {
        title: format!("{} / {}", cfg.function, cfg.operator),
        ..Default::default()
    };
    for &measure in &cfg.measures {
        let mut pairs = Vec::new();
        for &n in &cfg.ns {
            let index = cfg.index(n);
            let est = measure_value(&f, &op, index, measure, cfg).map_err(|e| Error::Experiment {
                function: cfg.function.clone(),
                operator: cfg.operator.clone(),
                n: index,
                source: Box::new(e),
            })?;
            pairs.push((n as f64, est.value));
            report.rows.push(Row {
                function: cfg.function.clone(),
                operator: cfg.operator.clone(),
                measure: measure.name().to_string(),
                n,
                p: cfg.p,
                value: est.value,
                quadrature_error: est.error,
            });
        }
        if pairs.iter().all(|&(_, v)| v.abs() <= ZERO_ATOL) {
            continue;
        }
        for &model in &cfg.models {
            let fit = fit_rate(&pairs, model, cfg.p)?;
            report.fits.push(FitRow {
                function: cfg.function.clone(),
                operator: cfg.operator.clone(),
                measure: measure.name().to_string(),
                p: cfg.p,
                fit,
            });
        }
    }
    Ok(report)
}

/// Tables of the worked examples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Example {
    Ex1,
    Ex1Plus,
    Step,
    Ex2,
    Pr4,
    Pr5,
}

impl Example {
    pub const ALL: [Example; 6] = [Example::Ex1, Example::Ex1Plus, Example::Step, Example::Ex2, Example::Pr4, Example::Pr5];

    pub fn name(&self) -> &'static str {
        match self {
            Example::Ex1 => "ex1",
            Example::Ex1Plus => "ex1plus",
            Example::Step => "step",
            Example::Ex2 => "ex2",
            Example::Pr4 => "pr4",
            Example::Pr5 => "pr5",
        }
    }

    /// Experiment configurations making up the table.
    pub fn configs(&self) -> Vec<ExperimentConfig> {
        use Measure::*;
        let base = ExperimentConfig::default();
        match self {
            Example::Ex1 | Example::Ex1Plus => [1.0, 2.0]
                .iter()
                .map(|&p| ExperimentConfig {
                    function: if *self == Example::Ex1 { "dirichlet" } else { "dirichlet_even_denominator" }.into(),
                    p,
                    ns: vec![4, 8, 16, 32],
                    measures: vec![Error, Combined, Tau, Omega],
                    ..base.clone()
                })
                .collect(),
            Example::Step => [1.0, 2.0]
                .iter()
                .map(|&p| ExperimentConfig {
                    function: "step".into(),
                    operator: "spline:1".into(),
                    p,
                    ns: vec![16, 32, 64, 128, 256, 512],
                    measures: vec![NodeDeviation, Tau, Omega],
                    models: vec![RateModel::PurePower],
                    ..base.clone()
                })
                .collect(),
            Example::Ex2 => vec![ExperimentConfig {
                function: "power_singularity:alpha=0.25".into(),
                s: 2,
                ns: vec![16, 32, 64, 128, 256, 512],
                measures: vec![Error, Combined, Omega, BestApprox],
                models: vec![RateModel::PurePower],
                ..base
            }],
            Example::Pr4 | Example::Pr5 => {
                let pr4 = *self == Example::Pr4;
                vec![ExperimentConfig {
                    function: if pr4 { "spike_at_binary:beta=0.25" } else { "spike_shifted:beta=0.25" }.into(),
                    operator: "mod-lagrange".into(),
                    s: 2,
                    tau_order: 2,
                    ns: if pr4 { (6..=12).collect() } else { (10..=16).collect() },
                    dyadic: true,
                    measures: if pr4 {
                        vec![NodeDeviation, Tau, Error, Omega, BestApprox]
                    } else {
                        vec![NodeDeviation, Omega, Combined, Error, BestApprox, Tau]
                    },
                    models: vec![RateModel::PowerLog],
                    ..base
                }]
            }
        }
    }

    /// Runs the table and attaches the checks that the example predicts.
    pub fn reproduce(&self) -> Result<Report> {
        let mut report = Report {
            title: self.name().to_string(),
            ..Default::default()
        };
        for cfg in self.configs() {
            report.extend(run_experiment(&cfg)?);
        }
        let checks = match self {
            Example::Ex1 => exact_checks(&report, "dirichlet", &[("error", 1.0), ("combined", 1.0), ("tau", 1.0), ("omega", 0.0)]),
            Example::Ex1Plus => exact_checks(&report, "dirichlet_even_denominator", &[("error", 0.0), ("combined", 0.0), ("tau", 1.0)]),
            Example::Step => {
                let mut c = exact_checks(&report, "step", &[("node_deviation", 0.0)]);
                for p in [1.0, 2.0] {
                    c.push(exponent_check(&report, "step", "tau", p, -1.0 / p, 0.05));
                }
                c
            }
            Example::Ex2 => {
                let f = "power_singularity:alpha=0.25";
                let ms = ["error", "combined", "omega", "best_approx"];
                let mut c: Vec<Check> = ms.iter().map(|m| exponent_check(&report, f, m, 2.0, -0.25, 0.05)).collect();
                for i in 0..ms.len() {
                    for j in i + 1..ms.len() {
                        let eq = check_equivalence(&report.series(f, ms[i], 2.0), &report.series(f, ms[j], 2.0), f64::INFINITY)?;
                        c.push(Check::new(format!("spread {}/{}", ms[i], ms[j]), eq.spread <= 20.0, format!("{:.3}", eq.spread)));
                    }
                }
                c
            }
            Example::Pr4 => {
                let f = "spike_at_binary:beta=0.25";
                let up = ["node_deviation", "tau", "error"];
                let down = ["omega", "best_approx"];
                let mut c: Vec<Check> = up.iter().map(|m| exponent_check(&report, f, m, 2.0, 0.25, 0.1)).collect();
                c.extend(down.iter().map(|m| exponent_check(&report, f, m, 2.0, -0.25, 0.1)));
                let mean = |ms: &[&str]| ms.iter().map(|m| report.fit(f, m, 2.0).map_or(f64::NAN, |x| x.exponent)).sum::<f64>() / ms.len() as f64;
                let gap = mean(&up) - mean(&down);
                c.push(Check::new("group gap", (gap - 0.5).abs() <= 0.15, format!("{gap:.4} (target 0.5 +- 0.15)")));
                c
            }
            Example::Pr5 => {
                let f = "spike_shifted:beta=0.25";
                let mut c: Vec<Check> = ["node_deviation", "omega", "combined", "error"]
                    .iter()
                    .map(|m| exponent_check(&report, f, m, 2.0, -0.25, 0.1))
                    .collect();
                c.push(exponent_check(&report, f, "tau", 2.0, 0.25, 0.1));
                let b = |m: &str| report.fit(f, m, 2.0).map_or(f64::NAN, |x| x.exponent);
                let gap = b("tau") - (b("node_deviation") + b("omega") + b("combined")) / 3.0;
                c.push(Check::new("tau gap over Omega", (gap - 0.5).abs() <= 0.15, format!("{gap:.4} (target 0.5 +- 0.15)")));
                c
            }
        };
        report.checks = checks;
        Ok(report)
    }
}

impl FromStr for Example {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Example::ALL
            .iter()
            .copied()
            .find(|e| e.name() == s || (s == "ex1+" && *e == Example::Ex1Plus))
            .ok_or_else(|| Error::Config(format!("unknown example `{s}`")))
    }
}

fn exact_checks(report: &Report, function: &str, expected: &[(&str, f64)]) -> Vec<Check> {
    expected
        .iter()
        .map(|&(m, want)| {
            let rows: Vec<&Row> = report.rows.iter().filter(|r| r.function == function && r.measure == m).collect();
            let worst = rows.iter().map(|r| (r.value - want).abs()).fold(0.0, f64::max);
            Check::new(
                format!("{m} = {want}"),
                !rows.is_empty() && worst <= 1e-10,
                format!("max deviation {worst:e} over {} rows", rows.len()),
            )
        })
        .collect()
}

fn exponent_check(report: &Report, function: &str, measure: &str, p: f64, target: f64, tol: f64) -> Check {
    match report.fit(function, measure, p) {
        Some(fit) => Check::new(
            format!("{measure} exponent (p = {p})"),
            (fit.exponent - target).abs() <= tol,
            format!("{:.4} (target {target} +- {tol})", fit.exponent),
        ),
        None => Check::new(format!("{measure} exponent (p = {p})"), false, "no fit"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ex1_table() {
        let r = Example::Ex1.reproduce().unwrap();
        assert!(r.passed(), "{:#?}", r.checks);
        assert_eq!(r.rows.len(), 2 * 4 * 4);
    }

    #[test]
    fn ex1plus_table() {
        let r = Example::Ex1Plus.reproduce().unwrap();
        assert!(r.passed(), "{:#?}", r.checks);
    }

    #[test]
    fn csv_is_deterministic() {
        let cfg: ExperimentConfig = "function = step\nop = lagrange\nn = 4,8\nmeasures = error,omega".parse().unwrap();
        let a = run_experiment(&cfg).unwrap().to_csv().unwrap();
        let b = run_experiment(&cfg).unwrap().to_csv().unwrap();
        assert_eq!(a, b);
        assert!(a.starts_with("function,operator,measure,n,p,value,quadrature_error\n"));
        assert_eq!(a.lines().count(), 5);
    }

    #[test]
    fn failures_name_the_cell() {
        let cfg: ExperimentConfig = "function = power_singularity:alpha=0.25\nop = lagrange\nn = 4\nmeasures = tau".parse().unwrap();
        match run_experiment(&cfg) {
            Err(Error::Experiment { n, source, .. }) => {
                assert_eq!(n, 4);
                assert!(matches!(*source, Error::TauUndefined(_)));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn example_names() {
        for e in Example::ALL {
            assert_eq!(e.name().parse::<Example>().unwrap(), e);
        }
        assert!("ex9".parse::<Example>().is_err());
    }
}
