//! Breakpoint-aware quadrature on the torus and the norms built on it.

mod adaptive;
mod gauss;
mod norms;
mod spectral;

pub use adaptive::{
    integrate, integrate_centered, integrate_centered_lenient, integrate_lenient, integrate_with_rule, CompositeRule,
    Estimate, QuadratureSpec,
};
pub use gauss::{gl16, gl8, GaussRule};
pub use norms::{
    lp_distance, lp_norm, lp_norm_closure, lp_seminorm_discrete, sample_on_nodes, torus_breaks,
    validate_p, LpNorm,
};
pub use spectral::{fourier_coefficients, integrate_with_trig, pow2_at_least, trig_on_uniform_gl};
