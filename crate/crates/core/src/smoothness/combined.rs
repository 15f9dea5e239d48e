use serde::Serialize;

use super::omega::{h_grid, omega_on_grid};
use super::steklov::steklov_node_deviation;
use super::SmoothnessParams;
use crate::nodes::NodeSet;
use crate::torus::PeriodicFunction;
use crate::Result;

/// `Omega(f, X)_p = ||f_{delta,r} - f||_{l_p(X)} + omega_s(f, 1/|X|)_p`
/// with both addends kept.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CombinedModulus {
    pub node_term: f64,
    pub omega_term: f64,
    pub total: f64,
    /// Sum of the error estimates of both terms.
    pub error: f64,
    pub delta: f64,
}

/// Combined measure with `delta = gamma / |X|`.
pub fn combined_modulus(f: &PeriodicFunction, nodes: &NodeSet, params: &SmoothnessParams) -> Result<CombinedModulus> {
    let delta = nodes.gamma() / nodes.len() as f64;
    combined_modulus_with(f, nodes, params, delta)
}

/// Combined measure with an explicit Steklov width `delta`; the modulus
/// term always uses the step bound `1/|X|`.
pub fn combined_modulus_with(
    f: &PeriodicFunction,
    nodes: &NodeSet,
    params: &SmoothnessParams,
    delta: f64,
) -> Result<CombinedModulus> {
    params.validate()?;
    let node = steklov_node_deviation(f, nodes, delta, params.r, params.p, &params.quadrature)?;
    let grid = h_grid(1.0 / nodes.len() as f64, params.h_grid_size);
    let w = omega_on_grid(f, &grid, params.s, params.p, &params.quadrature)?;
    Ok(CombinedModulus {
        node_term: node.value,
        omega_term: w.value,
        total: node.value + w.value,
        error: node.error + w.error,
        delta,
    })
}
