//! Sampling operators on the torus `[0, 1)` together with the smoothness
//! measures needed to quantify their `L_p` errors: integral and averaged
//! moduli, generalized Steklov averages, the combined node/integral measure,
//! classical and semi-discrete K-functionals, and realizations.
//!
//! Everything here is deterministic and free of shared mutable state. Values
//! that come out of numerical integration are reported as [`Estimate`]s so
//! that inequality checks can budget for quadrature noise.

pub mod bench;
pub mod error;
pub mod kfunc;
pub mod nodes;
pub mod operators;
pub mod quadrature;
pub mod smoothness;
pub mod torus;

pub use error::{Error, Result};
pub use nodes::NodeSet;
pub use quadrature::{Estimate, QuadratureSpec};
pub use smoothness::SmoothnessParams;
pub use torus::{PeriodicFunction, Rational, SplineFn, TrigPoly};
