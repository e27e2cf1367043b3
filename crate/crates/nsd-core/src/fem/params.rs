//! Physical coefficients of the coupled model.

use crate::mesh::{InterfaceEdge, RegionMap};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ParamError {
    #[error("physical parameter {name} must be positive, got {value}")]
    NotPositive { name: &'static str, value: f64 },
}

/// Coefficients: kinematic viscosity ν, gravity g, mass storativity S₀, BJS
/// slip coefficient α, and the piecewise-constant conductivity k. The BJS
/// coefficient η = α √(νg / tr(K)) with tr(K) = 2k in 2D is recomputed per
/// interface edge from the porous-side k, never stored.
#[derive(Clone, Debug)]
pub struct PhysicalParams {
    pub nu: f64,
    pub g: f64,
    pub s0: f64,
    pub alpha: f64,
    pub k: RegionMap,
}

impl PhysicalParams {
    pub fn new(nu: f64, g: f64, s0: f64, alpha: f64, k: RegionMap) -> Result<Self, ParamError> {
        for (name, value) in [("nu", nu), ("g", g), ("s0", s0), ("alpha", alpha)] {
            if !(value > 0.0) {
                return Err(ParamError::NotPositive { name, value });
            }
        }
        Ok(PhysicalParams {
            nu,
            g,
            s0,
            alpha,
            k,
        })
    }

    /// η for an interface edge with porous-side conductivity `k_edge`.
    pub fn eta(&self, k_edge: f64) -> f64 {
        self.alpha * (self.nu * self.g / (2.0 * k_edge)).sqrt()
    }

    /// η evaluated with the porous-side k of the given interface edge.
    pub fn eta_on(&self, edge: &InterfaceEdge) -> f64 {
        self.eta(self.k.k(edge.porous_tri))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Rect;
    use crate::mesh::build_rect_coupled;

    #[test]
    fn eta_uses_porous_side_k() {
        let mesh = build_rect_coupled(
            Rect::new(0.0, 0.0, 1.0, 1.0),
            Rect::new(0.0, -1.0, 1.0, 0.0),
            1,
            1,
            1,
        )
        .unwrap();
        let k = RegionMap::uniform(&mesh, 0.1).unwrap();
        let p = PhysicalParams::new(1e-3, 1.0, 1.0, 1.0, k).unwrap();
        let eta = p.eta_on(&mesh.interface_edges[0]);
        assert!((eta - (1e-3 / 0.2f64).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_nonpositive() {
        let mesh = build_rect_coupled(
            Rect::new(0.0, 0.0, 1.0, 1.0),
            Rect::new(0.0, -1.0, 1.0, 0.0),
            1,
            1,
            1,
        )
        .unwrap();
        let k = RegionMap::uniform(&mesh, 1.0).unwrap();
        assert!(PhysicalParams::new(0.0, 1.0, 1.0, 1.0, k).is_err());
    }
}
