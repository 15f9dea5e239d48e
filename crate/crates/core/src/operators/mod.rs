//! Sampling operators `G_n`, their errors, and empirical operator constants.

mod interp;
mod profile;
mod spline;

use std::fmt;
use std::str::FromStr;

pub use interp::{
    kantorovich, lagrange, lagrange_from_values, lagrange_general, lagrange_general_with_condition, modified_lagrange,
    modified_lagrange_from_values, quasi_interp, quasi_interp_with, Window, MAX_CONDITION,
};
pub use profile::{estimate_operator_constants, mz_check, ns_check, InequalityCheck, OperatorProfile, ProfileConfig};
pub use spline::{spline_from_values, spline_interp, spline_shift};

use crate::nodes::{dyadic_nodes, lagrange_nodes, perturb_nodes, uniform_nodes, NodeSet};
use crate::quadrature::{lp_distance, Estimate, QuadratureSpec};
use crate::torus::{Approximant, PeriodicFunction, Rational};
use crate::{Error, Result};

/// A sampling operator family `(G_n)`.
///
/// The index `n` means the degree for the `2n + 1`-node trigonometric
/// operators, the number of nodes (a power of two) for the modified
/// Lagrange operator, and the number of knots for splines.
#[derive(Debug, Clone, PartialEq)]
pub enum SamplingOperator {
    Lagrange,
    /// Lagrange interpolation on `lagrange_nodes(n)` perturbed by `eps / (2n+1)`.
    LagrangeGeneral { eps: Rational, seed: u64 },
    ModifiedLagrange,
    Quasi(Window),
    Kantorovich,
    /// Spline interpolation of order `m`.
    Spline(usize),
}

impl SamplingOperator {
    /// Smallest admissible index.
    pub fn min_index(&self) -> usize {
        match self {
            SamplingOperator::ModifiedLagrange => 2,
            SamplingOperator::Spline(m) => m + 2,
            _ => 1,
        }
    }

    pub fn check_index(&self, n: usize) -> Result<()> {
        if n < self.min_index() {
            return Err(Error::ParameterOutOfRange(format!("{self} needs n >= {}, got {n}", self.min_index())));
        }
        if *self == SamplingOperator::ModifiedLagrange && !n.is_power_of_two() {
            return Err(Error::ParameterOutOfRange(format!("mod-lagrange needs n = 2^j, got {n}")));
        }
        Ok(())
    }

    /// The node set `X_n`.
    pub fn nodes(&self, n: usize) -> Result<NodeSet> {
        self.check_index(n)?;
        match self {
            SamplingOperator::Lagrange | SamplingOperator::Quasi(_) | SamplingOperator::Kantorovich => lagrange_nodes(n),
            SamplingOperator::LagrangeGeneral { eps, seed } => perturb_nodes(&lagrange_nodes(n)?, *eps, *seed),
            SamplingOperator::ModifiedLagrange => dyadic_nodes(n.trailing_zeros()),
            SamplingOperator::Spline(_) => uniform_nodes(n),
        }
    }

    /// Whether `G_n f` matches `f` at the nodes.
    pub fn is_interpolatory(&self) -> bool {
        match self {
            SamplingOperator::Quasi(w) => *w == Window::Dirichlet,
            SamplingOperator::Kantorovich => false,
            _ => true,
        }
    }

    pub fn has_trig_range(&self) -> bool {
        !matches!(self, SamplingOperator::Spline(_))
    }

    /// Highest derivative order available on the range; `None` if unlimited.
    pub fn max_derivative(&self) -> Option<usize> {
        match self {
            SamplingOperator::Spline(m) => Some(m - 1),
            _ => None,
        }
    }

    pub fn apply(&self, f: &PeriodicFunction, n: usize, spec: &QuadratureSpec) -> Result<Approximant> {
        self.check_index(n)?;
        Ok(match self {
            SamplingOperator::Lagrange => Approximant::Trig(lagrange(f, n)?),
            SamplingOperator::LagrangeGeneral { .. } => Approximant::Trig(lagrange_general(f, &self.nodes(n)?)?),
            SamplingOperator::ModifiedLagrange => Approximant::Trig(modified_lagrange(f, n.trailing_zeros())?),
            SamplingOperator::Quasi(w) => Approximant::Trig(quasi_interp(f, n, *w)?),
            SamplingOperator::Kantorovich => Approximant::Trig(kantorovich(f, n, spec)?),
            SamplingOperator::Spline(m) => Approximant::Spline(spline_interp(f, *m, n)?),
        })
    }
}

impl fmt::Display for SamplingOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SamplingOperator::Lagrange => write!(f, "lagrange"),
            SamplingOperator::LagrangeGeneral { eps, seed } => {
                write!(f, "lagrange-z:eps={}/{},seed={seed}", eps.numer(), eps.denom())
            }
            SamplingOperator::ModifiedLagrange => write!(f, "mod-lagrange"),
            SamplingOperator::Quasi(w) => write!(f, "quasi:{w}"),
            SamplingOperator::Kantorovich => write!(f, "kantorovich"),
            SamplingOperator::Spline(m) => write!(f, "spline:{m}"),
        }
    }
}

fn parse_rational(s: &str) -> Option<Rational> {
    match s.split_once('/') {
        Some((a, b)) => {
            let (a, b) = (a.trim().parse::<i64>().ok()?, b.trim().parse::<i64>().ok()?);
            (b != 0).then(|| Rational::new(a, b))
        }
        None => s.trim().parse::<i64>().ok().map(Rational::from_integer),
    }
}

impl FromStr for SamplingOperator {
    type Err = Error;

    /// `lagrange`, `lagrange-z[:eps=a/b,seed=k]`, `mod-lagrange`,
    /// `quasi:<window>`, `kantorovich`, `spline:<m>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Config(format!("operator `{s}`: {msg}"));
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h.trim(), Some(a.trim())),
            None => (s.trim(), None),
        };
        match (head, arg) {
            ("lagrange", None) => Ok(SamplingOperator::Lagrange),
            ("mod-lagrange", None) => Ok(SamplingOperator::ModifiedLagrange),
            ("kantorovich", None) => Ok(SamplingOperator::Kantorovich),
            ("quasi", Some(w)) => Ok(SamplingOperator::Quasi(w.parse()?)),
            ("spline", Some(m)) => match m.parse::<usize>() {
                Ok(m) if m >= 1 => Ok(SamplingOperator::Spline(m)),
                _ => Err(bad("spline order must be a positive integer")),
            },
            ("lagrange-z", arg) => {
                let mut eps = Rational::new(1, 8);
                let mut seed = 0u64;
                for kv in arg.unwrap_or("").split(',').filter(|t| !t.trim().is_empty()) {
                    match kv.split_once('=').map(|(k, v)| (k.trim(), v.trim())) {
                        Some(("eps", v)) => eps = parse_rational(v).ok_or_else(|| bad("eps must be a rational a/b"))?,
                        Some(("seed", v)) => seed = v.parse().map_err(|_| bad("seed must be an integer"))?,
                        _ => return Err(bad("expected eps=<a/b> or seed=<k>")),
                    }
                }
                Ok(SamplingOperator::LagrangeGeneral { eps, seed })
            }
            _ => Err(bad("unknown operator")),
        }
    }
}

/// `||f - G_n(f)||_p`.
pub fn approx_error(
    f: &PeriodicFunction,
    op: &SamplingOperator,
    n: usize,
    p: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    let g = op.apply(f, n, spec)?;
    lp_distance(f, &g, p, spec)
}
