//! Functions on the torus `[0, 1)`: exact/a.e. dual-view periodic functions,
//! the example corpus, trigonometric polynomials and periodic splines.

mod approximant;
mod corpus;
mod function;
mod rational;
mod spline;
mod trig;

pub use approximant::Approximant;
pub use corpus::{list_corpus, make_corpus, parse_corpus_id, CorpusId, SPIKE_MIN_TRUNCATION};
pub use function::{Breakpoint, Exceptions, PeriodicFunction};
pub use rational::{dyadic, rational_to_f64, reduce_mod_one, Rational};
pub use spline::{bspline_values, SplineFn};
pub use trig::{dirichlet_kernel, TrigPoly};

/// Reduces a real number into `[0, 1)`.
#[inline]
pub fn wrap(x: f64) -> f64 {
    let y = x - x.floor();
    if y >= 1.0 {
        0.0
    } else {
        y
    }
}
