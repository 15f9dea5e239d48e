use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::fit::RateModel;
use crate::quadrature::QuadratureSpec;
use crate::{Error, Result};

/// Quantities an experiment can tabulate per `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    /// `||f - G_n f||_p`
    Error,
    /// `omega_s(f, 1/N)_p`
    Omega,
    /// `tau_k(f, 1/N)_p` with `k = tau_order`
    Tau,
    /// `||f_{gamma/N, r} - f||_{l_p(X_n)}`
    NodeDeviation,
    /// node deviation plus `omega_s(f, 1/N)_p`
    Combined,
    /// `E_n(f)_p` (surrogate when `p != 2`)
    BestApprox,
    /// `K_s(f, 1/N)_p`
    KClassical,
    /// semi-discrete `K_s(f, X_n)_p`
    KSemi,
    /// `||f - G_n f||_p + N^{-s} ||(G_n f)^{(s)}||_p`
    Realization,
}

impl Measure {
    pub const ALL: [Measure; 9] = [
        Measure::Error,
        Measure::Omega,
        Measure::Tau,
        Measure::NodeDeviation,
        Measure::Combined,
        Measure::BestApprox,
        Measure::KClassical,
        Measure::KSemi,
        Measure::Realization,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Measure::Error => "error",
            Measure::Omega => "omega",
            Measure::Tau => "tau",
            Measure::NodeDeviation => "node_deviation",
            Measure::Combined => "combined",
            Measure::BestApprox => "best_approx",
            Measure::KClassical => "k_classical",
            Measure::KSemi => "k_semi",
            Measure::Realization => "realization",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Measure::ALL
            .iter()
            .copied()
            .find(|m| m.name() == s || m.name().replace('_', "-") == s)
            .ok_or_else(|| Error::Config(format!("unknown measure `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Config(format!("unknown output format `{other}`"))),
        }
    }
}

/// One experiment: a function, an operator and a list of indices.
///
/// With `dyadic = true` each listed value `j` stands for the operator
/// index `2^j` and rates are fitted against `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub function: String,
    pub operator: String,
    pub p: f64,
    /// Steklov order of the node term.
    pub r: usize,
    /// Order of `omega`, of the K-functionals and of the realization.
    pub s: usize,
    pub tau_order: usize,
    pub ns: Vec<usize>,
    pub dyadic: bool,
    pub measures: Vec<Measure>,
    pub models: Vec<RateModel>,
    pub quadrature: QuadratureSpec,
    pub h_grid_size: usize,
    pub window_grid_size: usize,
    pub seed: u64,
    pub output: Option<String>,
    pub format: OutputFormat,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            function: "sin_k:k=1".into(),
            operator: "lagrange".into(),
            p: 2.0,
            r: 1,
            s: 1,
            tau_order: 1,
            ns: vec![8, 16, 32, 64],
            dyadic: false,
            measures: vec![Measure::Error],
            models: Vec::new(),
            quadrature: QuadratureSpec::default(),
            h_grid_size: 48,
            window_grid_size: 16,
            seed: 0,
            output: None,
            format: OutputFormat::Csv,
        }
    }
}

/// Parses `8,16,32`, `6..12` (inclusive) or a mix of both.
pub fn parse_index_list(s: &str) -> Result<Vec<usize>> {
    let bad = || Error::Config(format!("malformed index list `{s}`"));
    let mut out = Vec::new();
    for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        if let Some((a, b)) = tok.split_once("..") {
            let a: usize = a.trim().parse().map_err(|_| bad())?;
            let b: usize = b.trim().parse().map_err(|_| bad())?;
            out.extend(a..=b);
        } else {
            out.push(tok.parse().map_err(|_| bad())?);
        }
    }
    Ok(out)
}

fn parse_list<T: FromStr<Err = Error>>(s: &str) -> Result<Vec<T>> {
    s.split(',').map(str::trim).filter(|t| !t.is_empty()).map(T::from_str).collect()
}

fn join<T: fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ns.is_empty() {
            return Err(Error::Config("the n-list is empty".into()));
        }
        if self.ns.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(format!("the n-list must be strictly increasing, got {:?}", self.ns)));
        }
        if self.r == 0 || self.s == 0 || self.tau_order == 0 {
            return Err(Error::Config("r, s and tau_order must be positive".into()));
        }
        if self.s > 2 * self.r {
            return Err(Error::Config(format!("s <= 2r required, got s = {}, r = {}", self.s, self.r)));
        }
        if !(self.p >= 1.0 && self.p.is_finite()) {
            return Err(Error::Config(format!("p must satisfy 1 <= p < inf, got {}", self.p)));
        }
        if self.dyadic && self.ns.iter().any(|j| *j == 0 || *j > 30) {
            return Err(Error::Config("dyadic exponents must lie in 1..=30".into()));
        }
        if self.measures.is_empty() {
            return Err(Error::Config("no measures requested".into()));
        }
        self.quadrature.validate()
    }

    /// Operator index for a listed value.
    pub fn index(&self, n: usize) -> usize {
        if self.dyadic {
            1 << n
        } else {
            n
        }
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let num = |v: &str| -> Result<f64> {
            v.parse::<f64>().map_err(|_| Error::Config(format!("`{key}` expects a number, got `{v}`")))
        };
        let int = |v: &str| -> Result<usize> {
            v.parse::<usize>().map_err(|_| Error::Config(format!("`{key}` expects an integer, got `{v}`")))
        };
        match key {
            "function" | "fn" => self.function = value.to_string(),
            "operator" | "op" => self.operator = value.to_string(),
            "p" => self.p = num(value)?,
            "r" => self.r = int(value)?,
            "s" => self.s = int(value)?,
            "tau_order" => self.tau_order = int(value)?,
            "n" => {
                self.ns = parse_index_list(value)?;
                self.dyadic = false;
            }
            "j" => {
                self.ns = parse_index_list(value)?;
                self.dyadic = true;
            }
            "measures" => self.measures = parse_list(value)?,
            "models" => self.models = parse_list(value)?,
            "abs_tol" => self.quadrature.abs_tol = num(value)?,
            "rel_tol" => self.quadrature.rel_tol = num(value)?,
            "max_depth" => self.quadrature.max_depth = int(value)? as u32,
            "h_grid_size" => self.h_grid_size = int(value)?,
            "window_grid_size" => self.window_grid_size = int(value)?,
            "seed" => self.seed = value.parse().map_err(|_| Error::Config(format!("bad seed `{value}`")))?,
            "output" => self.output = Some(value.to_string()),
            "format" => self.format = value.parse()?,
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }
}

impl FromStr for ExperimentConfig {
    type Err = Error;

    /// Flat `key = value` lines; `#` starts a comment.
    fn from_str(s: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        for (lineno, raw) in s.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            cfg.set(k.trim(), v.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

impl fmt::Display for ExperimentConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "function = {}", self.function)?;
        writeln!(f, "operator = {}", self.operator)?;
        writeln!(f, "p = {}", self.p)?;
        writeln!(f, "r = {}", self.r)?;
        writeln!(f, "s = {}", self.s)?;
        writeln!(f, "tau_order = {}", self.tau_order)?;
        writeln!(f, "{} = {}", if self.dyadic { "j" } else { "n" }, join(&self.ns))?;
        writeln!(f, "measures = {}", join(&self.measures))?;
        if !self.models.is_empty() {
            writeln!(f, "models = {}", join(&self.models))?;
        }
        writeln!(f, "abs_tol = {:e}", self.quadrature.abs_tol)?;
        writeln!(f, "rel_tol = {:e}", self.quadrature.rel_tol)?;
        writeln!(f, "max_depth = {}", self.quadrature.max_depth)?;
        writeln!(f, "h_grid_size = {}", self.h_grid_size)?;
        writeln!(f, "window_grid_size = {}", self.window_grid_size)?;
        writeln!(f, "seed = {}", self.seed)?;
        if let Some(o) = &self.output {
            writeln!(f, "output = {o}")?;
        }
        writeln!(f, "format = {}", if self.format == OutputFormat::Csv { "csv" } else { "json" })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_round_trip() {
        let text = "# ex2\nfunction = power_singularity:alpha=0.25\nop = lagrange\np = 2\ns = 2\nn = 16,32,64..66\nmeasures = error, combined\nmodels = pure_power\n";
        let cfg: ExperimentConfig = text.parse().unwrap();
        assert_eq!(cfg.ns, vec![16, 32, 64, 65, 66]);
        assert_eq!(cfg.measures, vec![Measure::Error, Measure::Combined]);
        assert_eq!(cfg.models, vec![RateModel::PurePower]);
        let again: ExperimentConfig = cfg.to_string().parse().unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn dyadic_indices() {
        let cfg: ExperimentConfig = "j = 6..8\nop = mod-lagrange".parse().unwrap();
        assert!(cfg.dyadic);
        assert_eq!(cfg.index(7), 128);
    }

    #[test]
    fn rejects_bad_configs() {
        for text in ["n = 8,8", "n = 16,8", "s = 3", "p = 0.5", "bogus = 1", "n = x", "measures = speed", "no equals sign", "j = 40"] {
            assert!(text.parse::<ExperimentConfig>().is_err(), "{text}");
        }
    }
}
