//! Closed-form example functions used throughout the experiments.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use super::function::{Breakpoint, Exceptions, PeriodicFunction};
use super::rational::{rational_to_f64, reduce_mod_one, Rational};
use crate::{Error, Result};

/// Spike sums are never truncated before this index.
pub const SPIKE_MIN_TRUNCATION: u32 = 40;

/// Parsed corpus identifier such as `power_singularity:alpha=0.25`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusId {
    pub name: String,
    pub params: Vec<(String, f64)>,
}

impl CorpusId {
    pub fn param(&self, key: &str) -> Option<f64> {
        self.params.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }

    pub fn build(&self) -> Result<PeriodicFunction> {
        let values: Vec<f64> = match self.name.as_str() {
            "power_singularity" => vec![self.require("alpha")?],
            "spike_at_binary" | "spike_shifted" => {
                let mut v = vec![self.require("beta")?];
                if let Some(res) = self.param("resolution") {
                    v.push(res);
                }
                v
            }
            "sin_k" => vec![self.param("k").unwrap_or(1.0)],
            _ => Vec::new(),
        };
        make_corpus(&self.name, &values)
    }

    fn require(&self, key: &str) -> Result<f64> {
        self.param(key).ok_or_else(|| {
            Error::ParameterOutOfRange(format!("`{}` requires parameter `{}`", self.name, key))
        })
    }
}

impl fmt::Display for CorpusId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)?;
        for (i, (k, v)) in self.params.iter().enumerate() {
            let sep = if i == 0 { ':' } else { ',' };
            write!(f, "{sep}{k}={v}")?;
        }
        Ok(())
    }
}

impl FromStr for CorpusId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_corpus_id(s)
    }
}

/// Parses `name[:key=value[,key=value...]]`.
pub fn parse_corpus_id(s: &str) -> Result<CorpusId> {
    let s = s.trim();
    let (name, rest) = match s.split_once(':') {
        Some((n, r)) => (n.trim(), Some(r)),
        None => (s, None),
    };
    if name.is_empty() {
        return Err(Error::UnknownCorpus(s.to_string()));
    }
    let mut params = Vec::new();
    if let Some(rest) = rest {
        for part in rest.split(',').filter(|p| !p.trim().is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("malformed parameter `{part}` in `{s}`")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("non-numeric parameter `{part}` in `{s}`")))?;
            params.push((k.trim().to_string(), v));
        }
    }
    Ok(CorpusId {
        name: name.to_string(),
        params,
    })
}

/// Names and parameter signatures of the corpus.
pub fn list_corpus() -> Vec<(&'static str, &'static str)> {
    vec![
        ("dirichlet", "1 on rationals, 0 elsewhere"),
        (
            "dirichlet_even_denominator",
            "1 on rationals a/b in lowest terms with b even, 0 elsewhere",
        ),
        ("step", "1 on (0,1/2), -1 on (1/2,1), 0 at 0 and 1/2"),
        ("power_singularity:alpha=<a>", "x^-a on (0,1), 0 at 0; 0<a<1"),
        (
            "spike_at_binary:beta=<b>",
            "sum_{l>=3} l^-b (1-4^l|x-2^-l|)_+; 0<b<1",
        ),
        (
            "spike_shifted:beta=<b>",
            "sum_{l>=4} l^-b (1-4^l|x-2^-l-4^-l|)_+; 0<b<1",
        ),
        ("sin_k:k=<k>", "sin(2 pi k x)"),
    ]
}

/// Builds a corpus function by name.
///
/// Parameters by name: `power_singularity` takes `[alpha]`, the spike sums
/// take `[beta]` or `[beta, resolution]`, `sin_k` takes `[k]`.
pub fn make_corpus(name: &str, params: &[f64]) -> Result<PeriodicFunction> {
    match name {
        "dirichlet" => Ok(dirichlet()),
        "dirichlet_even_denominator" => Ok(dirichlet_even_denominator()),
        "step" => Ok(step()),
        "power_singularity" => {
            let alpha = *params.first().ok_or_else(|| missing(name, "alpha"))?;
            if !(alpha > 0.0 && alpha < 1.0) {
                return Err(Error::ParameterOutOfRange(format!(
                    "power_singularity needs 0 < alpha < 1, got {alpha}"
                )));
            }
            Ok(power_singularity(alpha))
        }
        "spike_at_binary" | "spike_shifted" => {
            let beta = *params.first().ok_or_else(|| missing(name, "beta"))?;
            if !(beta > 0.0 && beta < 1.0) {
                return Err(Error::ParameterOutOfRange(format!(
                    "{name} needs 0 < beta < 1, got {beta}"
                )));
            }
            let resolution = params.get(1).copied().unwrap_or(0.0);
            if resolution < 0.0 || resolution >= 1.0 {
                return Err(Error::ParameterOutOfRange(format!(
                    "resolution must lie in [0, 1), got {resolution}"
                )));
            }
            Ok(spikes(beta, name == "spike_shifted", resolution))
        }
        "sin_k" => {
            let k = params.first().copied().unwrap_or(1.0);
            if k < 0.0 || k.fract() != 0.0 {
                return Err(Error::ParameterOutOfRange(format!(
                    "sin_k needs a non-negative integer k, got {k}"
                )));
            }
            let k = k as u32;
            Ok(
                PeriodicFunction::continuous(format!("sin_k:k={k}"), move |x| {
                    (2.0 * PI * k as f64 * x).sin()
                })
                .with_bandwidth(k as usize),
            )
        }
        other => Err(Error::UnknownCorpus(other.to_string())),
    }
}

fn missing(name: &str, key: &str) -> Error {
    Error::ParameterOutOfRange(format!("`{name}` requires parameter `{key}`"))
}

fn dirichlet() -> PeriodicFunction {
    PeriodicFunction::new("dirichlet", |_| 1.0, |_| 0.0).with_exceptions(Exceptions::AllRationals)
}

fn dirichlet_even_denominator() -> PeriodicFunction {
    PeriodicFunction::new(
        "dirichlet_even_denominator",
        |q| {
            if reduce_mod_one(q).denom() % 2 == 0 {
                1.0
            } else {
                0.0
            }
        },
        |_| 0.0,
    )
    .with_exceptions(Exceptions::EvenDenominatorRationals)
}

fn step() -> PeriodicFunction {
    let half = Rational::new(1, 2);
    PeriodicFunction::new(
        "step",
        move |q| {
            let zero = Rational::new(0, 1);
            if *q == zero || *q == half {
                0.0
            } else if *q < half {
                1.0
            } else {
                -1.0
            }
        },
        |x| {
            if x == 0.0 || x == 0.5 {
                0.0
            } else if x < 0.5 {
                1.0
            } else {
                -1.0
            }
        },
    )
    .with_breakpoints(vec![Breakpoint::smooth(0.0), Breakpoint::smooth(0.5)])
}

fn power_singularity(alpha: f64) -> PeriodicFunction {
    let ae = move |x: f64| if x == 0.0 { 0.0 } else { x.powf(-alpha) };
    PeriodicFunction::new(
        format!("power_singularity:alpha={alpha}"),
        move |q| ae(rational_to_f64(q)),
        ae,
    )
    .with_breakpoints(vec![Breakpoint::singular(0.0, alpha)])
    .unbounded()
}

/// Sum of hats `l^-beta (1 - 4^l |x - c_l|)_+` with `c_l = 2^-l` (or
/// `2^-l + 4^-l` when shifted), truncated at
/// `l_max = max(40, ceil(log2(1/resolution)))`.
fn spikes(beta: f64, shifted: bool, resolution: f64) -> PeriodicFunction {
    let first: u32 = if shifted { 4 } else { 3 };
    let mut last = SPIKE_MIN_TRUNCATION;
    if resolution > 0.0 {
        last = last.max((1.0 / resolution).log2().ceil() as u32);
    }
    // 4^-l must stay representable as a normal f64
    let last = last.min(500);
    let center = move |l: u32| {
        let c = (0.5f64).powi(l as i32);
        if shifted {
            c + (0.25f64).powi(l as i32)
        } else {
            c
        }
    };
    let ae = move |x: f64| -> f64 {
        if x <= 0.0 || x > 0.5 {
            return 0.0;
        }
        let guess = (-x.log2()).round() as i64;
        for l in (guess - 1)..=(guess + 1) {
            if l < first as i64 || l > last as i64 {
                continue;
            }
            let l = l as u32;
            let half_width = (0.25f64).powi(l as i32);
            let d = (x - center(l)).abs();
            if d < half_width {
                return (l as f64).powf(-beta) * (1.0 - d / half_width);
            }
        }
        0.0
    };
    let mut bps = vec![Breakpoint::smooth(0.0)];
    for l in first..=last {
        let c = center(l);
        let w = (0.25f64).powi(l as i32);
        bps.push(Breakpoint::smooth(c - w));
        bps.push(Breakpoint::smooth(c));
        bps.push(Breakpoint::smooth(c + w));
    }
    let name = if shifted {
        format!("spike_shifted:beta={beta}")
    } else {
        format!("spike_at_binary:beta={beta}")
    };
    PeriodicFunction::new(name, move |q| ae(rational_to_f64(q)), ae)
        .with_breakpoints(bps)
        .with_tail_bound(((last + 1) as f64).powf(-beta))
}
