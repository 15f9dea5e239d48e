//! Finite differences, the integral modulus `omega_r`, the averaged modulus
//! `tau_r`, generalized Steklov averages and the combined node/integral
//! measure.

mod combined;
mod difference;
mod omega;
mod steklov;
mod tau;

use serde::{Deserialize, Serialize};

use crate::quadrature::{validate_p, QuadratureSpec};
use crate::{Error, Result};

pub use combined::{combined_modulus, combined_modulus_with, CombinedModulus};
pub use difference::{binomial, difference_breakpoints, finite_difference, finite_difference_ae, View};
pub use omega::{diff_norm, h_grid, omega, omega_on_grid, omega_trig, trig_difference, ModulusEstimate};
pub use steklov::{
    steklov, steklov_deviation, steklov_node_deviation, steklov_value, steklov_weights, window_average,
};
pub use tau::{local_modulus, local_modulus_with, tau, tau_with_grid};

/// Orders, exponent, step and grid sizes shared by the smoothness measures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessParams {
    /// Difference order of `omega`/`tau` and Steklov order.
    pub r: usize,
    /// Order of the integral modulus in the combined measure; `s <= 2r`.
    pub s: usize,
    pub p: f64,
    pub delta: f64,
    pub h_grid_size: usize,
    pub window_grid_size: usize,
    pub quadrature: QuadratureSpec,
}

impl Default for SmoothnessParams {
    fn default() -> Self {
        SmoothnessParams {
            r: 1,
            s: 1,
            p: 2.0,
            delta: 0.1,
            h_grid_size: 48,
            window_grid_size: 16,
            quadrature: QuadratureSpec::default(),
        }
    }
}

impl SmoothnessParams {
    pub fn new(r: usize, s: usize, p: f64, delta: f64) -> Result<Self> {
        let params = SmoothnessParams {
            r,
            s,
            p,
            delta,
            ..Default::default()
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.r == 0 || self.s == 0 {
            return Err(Error::ParameterOutOfRange("r and s must be positive".into()));
        }
        if self.s > 2 * self.r {
            return Err(Error::ParameterOutOfRange(format!(
                "s <= 2r required, got s = {} and r = {}",
                self.s, self.r
            )));
        }
        validate_p(self.p)?;
        if !(self.delta > 0.0) || !self.delta.is_finite() {
            return Err(Error::ParameterOutOfRange(format!(
                "delta must be positive, got {}",
                self.delta
            )));
        }
        if self.h_grid_size < 8 || self.window_grid_size < 8 {
            return Err(Error::ParameterOutOfRange("grid sizes must be at least 8".into()));
        }
        self.quadrature.validate()
    }

    pub fn with_r(mut self, r: usize) -> Self {
        self.r = r;
        self
    }

    pub fn with_s(mut self, s: usize) -> Self {
        self.s = s;
        self
    }

    pub fn with_p(mut self, p: f64) -> Self {
        self.p = p;
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_quadrature(mut self, spec: QuadratureSpec) -> Self {
        self.quadrature = spec;
        self
    }

    pub fn with_grids(mut self, h_grid_size: usize, window_grid_size: usize) -> Self {
        self.h_grid_size = h_grid_size;
        self.window_grid_size = window_grid_size;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(SmoothnessParams::new(1, 2, 2.0, 0.1).is_ok());
        assert!(SmoothnessParams::new(1, 3, 2.0, 0.1).is_err());
        assert!(SmoothnessParams::new(1, 1, 0.5, 0.1).is_err());
        assert!(SmoothnessParams::new(1, 1, 2.0, 0.0).is_err());
        assert!(SmoothnessParams::default().with_grids(4, 16).validate().is_err());
    }
}
