use std::fmt;
use std::sync::Arc;

use super::rational::{rational_to_f64, reduce_mod_one, Rational};
use super::trig::TrigPoly;
use super::wrap;

/// A point in `[0, 1)` where the a.e. representative is not smooth.
///
/// `singularity` carries the exponent `a` of an integrable blow-up
/// `|x - x0|^{-a}` on the right of the point, so that quadrature can grade
/// its mesh geometrically toward it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Breakpoint {
    pub x: f64,
    pub singularity: Option<f64>,
}

impl Breakpoint {
    pub fn smooth(x: f64) -> Self {
        Breakpoint { x, singularity: None }
    }

    pub fn singular(x: f64, exponent: f64) -> Self {
        Breakpoint {
            x,
            singularity: Some(exponent),
        }
    }
}

/// Measure-zero set on which the pointwise values differ from the a.e. view.
#[derive(Clone, Default)]
pub enum Exceptions {
    #[default]
    None,
    /// Every rational point.
    AllRationals,
    /// Rationals whose reduced denominator is even.
    EvenDenominatorRationals,
}

impl fmt::Debug for Exceptions {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exceptions::None => write!(f, "None"),
            Exceptions::AllRationals => write!(f, "AllRationals"),
            Exceptions::EvenDenominatorRationals => write!(f, "EvenDenominatorRationals"),
        }
    }
}

impl Exceptions {
    pub fn contains(&self, q: &Rational) -> bool {
        match self {
            Exceptions::None => false,
            Exceptions::AllRationals => true,
            Exceptions::EvenDenominatorRationals => reduce_mod_one(q).denom() % 2 == 0,
        }
    }

    /// An exceptional rational inside `[lo, hi]`, if one can be represented.
    pub fn proxy_in(&self, lo: f64, hi: f64) -> Option<Rational> {
        if matches!(self, Exceptions::None) || !(hi > lo) {
            return None;
        }
        let width = hi - lo;
        // smallest j with 2^{-j} < width / 4
        let mut j = 1u32;
        while j < 60 && (0.5f64).powi(j as i32) >= width / 4.0 {
            j += 1;
        }
        if j >= 60 {
            return None;
        }
        let scale = (1i64 << j) as f64;
        let mut k = (lo * scale).ceil() as i64;
        if matches!(self, Exceptions::EvenDenominatorRationals) && k % 2 == 0 {
            k += 1;
        }
        let q = Rational::new(k, 1i64 << j);
        let qf = rational_to_f64(&q);
        (qf >= lo && qf <= hi && self.contains(&q)).then_some(q)
    }
}

type ExactFn = dyn Fn(&Rational) -> f64 + Send + Sync;
type AeFn = dyn Fn(f64) -> f64 + Send + Sync;

/// A 1-periodic function with two views: exact pointwise values at rational
/// points (used for sampling) and an almost-everywhere representative (used
/// in every integral).
#[derive(Clone)]
pub struct PeriodicFunction {
    name: String,
    exact: Arc<ExactFn>,
    ae: Arc<AeFn>,
    breakpoints: Vec<Breakpoint>,
    exceptions: Exceptions,
    bounded: bool,
    bandwidth: usize,
    tail_bound: f64,
}

impl fmt::Debug for PeriodicFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PeriodicFunction")
            .field("name", &self.name)
            .field("breakpoints", &self.breakpoints.len())
            .field("exceptions", &self.exceptions)
            .field("bounded", &self.bounded)
            .field("bandwidth", &self.bandwidth)
            .finish()
    }
}

impl PeriodicFunction {
    /// Builds a function from its exact and a.e. views. Both receive
    /// arguments already reduced to `[0, 1)`.
    pub fn new<E, A>(name: impl Into<String>, exact: E, ae: A) -> Self
    where
        E: Fn(&Rational) -> f64 + Send + Sync + 'static,
        A: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        PeriodicFunction {
            name: name.into(),
            exact: Arc::new(exact),
            ae: Arc::new(ae),
            breakpoints: Vec::new(),
            exceptions: Exceptions::None,
            bounded: true,
            bandwidth: 0,
            tail_bound: 0.0,
        }
    }

    /// A function whose exact view is the a.e. view evaluated at the rational.
    pub fn continuous<A>(name: impl Into<String>, ae: A) -> Self
    where
        A: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let ae = Arc::new(ae);
        let ae2 = Arc::clone(&ae);
        let mut f = Self::new(name, move |q: &Rational| ae2(rational_to_f64(q)), |_| 0.0);
        f.ae = ae;
        f
    }

    /// Real part of a trigonometric polynomial, viewed as a periodic function.
    pub fn from_trig(name: impl Into<String>, poly: &TrigPoly) -> Self {
        let p = poly.clone();
        let degree = p.degree();
        Self::continuous(name, move |x| p.eval(x).re).with_bandwidth(degree)
    }

    pub fn with_breakpoints(mut self, mut points: Vec<Breakpoint>) -> Self {
        for b in points.iter_mut() {
            b.x = wrap(b.x);
        }
        points.sort_by(|a, b| a.x.total_cmp(&b.x));
        points.dedup_by(|a, b| {
            if a.x == b.x {
                if b.singularity.is_none() {
                    b.singularity = a.singularity;
                }
                true
            } else {
                false
            }
        });
        self.breakpoints = points;
        self
    }

    pub fn with_exceptions(mut self, exceptions: Exceptions) -> Self {
        self.exceptions = exceptions;
        self
    }

    pub fn unbounded(mut self) -> Self {
        self.bounded = false;
        self
    }

    /// Frequency scale of the function; quadrature uses at least a few
    /// panels per period of `e^{2 pi i bandwidth x}`.
    pub fn with_bandwidth(mut self, bandwidth: usize) -> Self {
        self.bandwidth = bandwidth;
        self
    }

    pub fn with_tail_bound(mut self, bound: f64) -> Self {
        self.tail_bound = bound;
        self
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn breakpoints(&self) -> &[Breakpoint] {
        &self.breakpoints
    }

    pub fn exceptions(&self) -> &Exceptions {
        &self.exceptions
    }

    pub fn is_bounded(&self) -> bool {
        self.bounded
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    /// Sup-norm bound of the truncated tail for procedurally generated
    /// functions; zero when nothing was truncated.
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// Pointwise value at a rational point.
    pub fn eval_exact(&self, x: &Rational) -> f64 {
        (self.exact)(&reduce_mod_one(x))
    }

    /// Value of the a.e. representative.
    pub fn eval_ae(&self, x: f64) -> f64 {
        (self.ae)(wrap(x))
    }

    /// Breakpoints of the periodic extension lying in `[lo, hi]`, sorted.
    pub fn breakpoints_in(&self, lo: f64, hi: f64) -> Vec<Breakpoint> {
        let mut out = Vec::new();
        if self.breakpoints.is_empty() || hi < lo {
            return out;
        }
        let first = lo.floor() as i64;
        let last = hi.floor() as i64;
        for shift in first..=last {
            let s = shift as f64;
            let from = self.breakpoints.partition_point(|b| b.x + s < lo);
            for b in &self.breakpoints[from..] {
                let x = b.x + s;
                if x > hi {
                    break;
                }
                out.push(Breakpoint { x, ..*b });
            }
        }
        out
    }

    /// Pointwise sum `self + other` in both views.
    pub fn add(&self, other: &PeriodicFunction) -> PeriodicFunction {
        self.combine(other, 1.0, "+")
    }

    /// Pointwise difference `self - other` in both views.
    pub fn sub(&self, other: &PeriodicFunction) -> PeriodicFunction {
        self.combine(other, -1.0, "-")
    }

    fn combine(&self, other: &PeriodicFunction, sign: f64, op: &str) -> PeriodicFunction {
        let (e1, e2) = (Arc::clone(&self.exact), Arc::clone(&other.exact));
        let (a1, a2) = (Arc::clone(&self.ae), Arc::clone(&other.ae));
        let mut bps = self.breakpoints.clone();
        bps.extend_from_slice(&other.breakpoints);
        let exceptions = match (&self.exceptions, &other.exceptions) {
            (Exceptions::None, e) | (e, Exceptions::None) => e.clone(),
            (Exceptions::AllRationals, _) | (_, Exceptions::AllRationals) => {
                Exceptions::AllRationals
            }
            _ => Exceptions::EvenDenominatorRationals,
        };
        let mut f = PeriodicFunction::new(
            format!("({}{}{})", self.name, op, other.name),
            move |q| e1(q) + sign * e2(q),
            move |x| a1(x) + sign * a2(x),
        )
        .with_breakpoints(bps)
        .with_exceptions(exceptions)
        .with_bandwidth(self.bandwidth.max(other.bandwidth))
        .with_tail_bound(self.tail_bound + other.tail_bound);
        f.bounded = self.bounded && other.bounded;
        f
    }

    /// `c * self`.
    pub fn scale(&self, c: f64) -> PeriodicFunction {
        let e = Arc::clone(&self.exact);
        let a = Arc::clone(&self.ae);
        let mut f = PeriodicFunction::new(
            format!("{}*{}", c, self.name),
            move |q| c * e(q),
            move |x| c * a(x),
        );
        f.breakpoints = self.breakpoints.clone();
        f.exceptions = self.exceptions.clone();
        f.bounded = self.bounded;
        f.bandwidth = self.bandwidth;
        f.tail_bound = c.abs() * self.tail_bound;
        f
    }
}
