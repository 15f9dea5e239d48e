use num_complex::Complex64;

use super::function::Breakpoint;
use super::spline::SplineFn;
use super::trig::TrigPoly;
use crate::{Error, Result};

/// Output of a sampling operator: a trigonometric polynomial or a spline.
#[derive(Debug, Clone, PartialEq)]
pub enum Approximant {
    Trig(TrigPoly),
    Spline(SplineFn),
}

impl Approximant {
    pub fn eval(&self, x: f64) -> Complex64 {
        match self {
            Approximant::Trig(t) => t.eval(x),
            Approximant::Spline(s) => Complex64::new(s.eval(x), 0.0),
        }
    }

    /// Exact `s`-th derivative. Splines of order `m` allow `s <= m - 1`.
    pub fn derivative(&self, s: usize) -> Result<Approximant> {
        match self {
            Approximant::Trig(t) => Ok(Approximant::Trig(t.derivative(s as u32))),
            Approximant::Spline(sp) => sp.derivative(s).map(Approximant::Spline).ok_or_else(|| {
                Error::ParameterOutOfRange(format!(
                    "derivative of order {s} exceeds the smoothness of a spline of order {}",
                    sp.order()
                ))
            }),
        }
    }

    pub fn as_trig(&self) -> Option<&TrigPoly> {
        match self {
            Approximant::Trig(t) => Some(t),
            Approximant::Spline(_) => None,
        }
    }

    pub fn as_spline(&self) -> Option<&SplineFn> {
        match self {
            Approximant::Spline(s) => Some(s),
            Approximant::Trig(_) => None,
        }
    }

    /// Points in `[0, 1]` where the approximant is not smooth.
    pub fn breakpoints(&self) -> Vec<Breakpoint> {
        match self {
            Approximant::Trig(_) => Vec::new(),
            Approximant::Spline(s) => {
                let mut v: Vec<Breakpoint> = s.knots().into_iter().map(Breakpoint::smooth).collect();
                if s.shift() == 0.0 {
                    v.push(Breakpoint::smooth(1.0));
                }
                v
            }
        }
    }

    /// Number of uniform panels needed to resolve the approximant.
    pub fn resolution(&self) -> usize {
        match self {
            Approximant::Trig(t) => 2 * t.degree() + 1,
            Approximant::Spline(s) => s.n(),
        }
    }

    pub fn sub(&self, other: &Approximant) -> Result<Approximant> {
        match (self, other) {
            (Approximant::Trig(a), Approximant::Trig(b)) => Ok(Approximant::Trig(a.sub(b))),
            (Approximant::Spline(a), Approximant::Spline(b))
                if a.order() == b.order() && a.n() == b.n() && a.shift() == b.shift() =>
            {
                let coeffs = a.coeffs().iter().zip(b.coeffs()).map(|(x, y)| x - y).collect();
                Ok(Approximant::Spline(SplineFn::new(a.order(), a.shift(), coeffs)))
            }
            _ => Err(Error::Misaligned(
                "cannot subtract approximants from different spaces".into(),
            )),
        }
    }
}

impl From<TrigPoly> for Approximant {
    fn from(t: TrigPoly) -> Self {
        Approximant::Trig(t)
    }
}

impl From<SplineFn> for Approximant {
    fn from(s: SplineFn) -> Self {
        Approximant::Spline(s)
    }
}
