//! The demonstration scenarios: cavity flow, filtration, the Y-shape karst
//! aquifer, and a zero-forcing decay problem for energy diagnostics.

use super::{zero_scalar, zero_vector, Geometry, HeadBc, Scenario, VectorFn};
use crate::geometry::{Rect, Vec2};
use std::path::PathBuf;
use std::sync::Arc;

fn constant_velocity(v: Vec2) -> VectorFn {
    Arc::new(move |_, _| v)
}

/// Cavity flow over a porous bed: `Ω_f = [0,1]²`, `Ω_p = [0,1]×[−1,0]`,
/// lid `u = (1,0)` on the top, no-slip walls, `φ = 0` on the outer porous
/// boundary; every physical parameter is 1. Canonical setup: `T = 0.5`,
/// `Δt = 0.01`, `h = 1/64`.
pub fn cavity() -> Scenario {
    Scenario {
        name: "cavity".to_string(),
        geometry: Geometry::RectPair {
            fluid: Rect::new(0.0, 0.0, 1.0, 1.0),
            porous: Rect::new(0.0, -1.0, 1.0, 0.0),
        },
        nu: 1.0,
        g: 1.0,
        s0: 1.0,
        alpha: 1.0,
        k_base: 1.0,
        low_k: Vec::new(),
        // The lid is listed last so its value wins at the top corners and
        // every lid dof carries exactly (1, 0).
        velocity_bc: vec![
            ("fluid_left".to_string(), zero_vector()),
            ("fluid_right".to_string(), zero_vector()),
            (
                "fluid_top".to_string(),
                constant_velocity(Vec2::new(1.0, 0.0)),
            ),
        ],
        head_bc: vec![
            ("porous_left".to_string(), HeadBc::Dirichlet(zero_scalar())),
            ("porous_right".to_string(), HeadBc::Dirichlet(zero_scalar())),
            (
                "porous_bottom".to_string(),
                HeadBc::Dirichlet(zero_scalar()),
            ),
        ],
        f1: zero_vector(),
        f2: zero_scalar(),
        u0: zero_vector(),
        phi0: zero_scalar(),
        exact: None,
        bjs_compensation: false,
        default_final_time: 0.5,
        default_dt: 0.01,
        default_h: 1.0 / 64.0,
    }
}

/// Filtration through two low-conductivity baffles: `Ω_f = [0,2]×[1.5,2]`,
/// `Ω_p = [0,2]×[0,1.5]`, inflow `u = (0, x(x−2))` on the top, no-slip
/// sides, zero-flux head on the porous sides and `φ = 0` at the bottom;
/// `k = 10⁻⁶` inside two staggered wall-attached blocks and 1 elsewhere.
/// Canonical setup: `T = 0.5`, `Δt = 0.01`, `h = 1/32`.
pub fn filtration() -> Scenario {
    Scenario {
        name: "filtration".to_string(),
        geometry: Geometry::RectPair {
            fluid: Rect::new(0.0, 1.5, 2.0, 2.0),
            porous: Rect::new(0.0, 0.0, 2.0, 1.5),
        },
        nu: 1.0,
        g: 1.0,
        s0: 1.0,
        alpha: 1.0,
        k_base: 1.0,
        low_k: vec![
            (Rect::new(0.0, 1.0, 1.25, 1.125), 1e-6),
            (Rect::new(0.75, 0.5, 2.0, 0.625), 1e-6),
        ],
        velocity_bc: vec![
            ("fluid_left".to_string(), zero_vector()),
            ("fluid_right".to_string(), zero_vector()),
            (
                "fluid_top".to_string(),
                Arc::new(|p: Vec2, _| Vec2::new(0.0, p.x * (p.x - 2.0))),
            ),
        ],
        head_bc: vec![
            ("porous_left".to_string(), HeadBc::ZeroFlux),
            ("porous_right".to_string(), HeadBc::ZeroFlux),
            (
                "porous_bottom".to_string(),
                HeadBc::Dirichlet(zero_scalar()),
            ),
        ],
        f1: zero_vector(),
        f2: zero_scalar(),
        u0: zero_vector(),
        phi0: zero_scalar(),
        exact: None,
        bjs_compensation: false,
        default_final_time: 0.5,
        default_dt: 0.01,
        default_h: 1.0 / 32.0,
    }
}

/// Subsurface flow in a Y-shape karst aquifer, driven by constant inflows
/// `(ω₁, 0)` on segment HA, `(0, ω₁)` on CD and outflow `(ω₂, 0)` on FG of
/// the imported mesh; `φ = 0` on the outer porous boundary and every other
/// parameter 1. The mesh file must label the openings `inlet_ha`,
/// `inlet_cd`, `outlet_fg` and the porous boundary `porous_outer`.
pub fn yshape(mesh_path: impl Into<PathBuf>, omega1: f64, omega2: f64, k: f64) -> Scenario {
    Scenario {
        name: "yshape".to_string(),
        geometry: Geometry::MshFile(mesh_path.into()),
        nu: 1.0,
        g: 1.0,
        s0: 1.0,
        alpha: 1.0,
        k_base: k,
        low_k: Vec::new(),
        velocity_bc: vec![
            (
                "inlet_ha".to_string(),
                constant_velocity(Vec2::new(omega1, 0.0)),
            ),
            (
                "inlet_cd".to_string(),
                constant_velocity(Vec2::new(0.0, omega1)),
            ),
            (
                "outlet_fg".to_string(),
                constant_velocity(Vec2::new(omega2, 0.0)),
            ),
        ],
        head_bc: vec![("porous_outer".to_string(), HeadBc::Dirichlet(zero_scalar()))],
        f1: zero_vector(),
        f2: zero_scalar(),
        u0: zero_vector(),
        phi0: zero_scalar(),
        exact: None,
        bjs_compensation: false,
        default_final_time: 0.5,
        default_dt: 0.01,
        default_h: 0.05,
    }
}

/// Zero forcing, homogeneous Dirichlet data on the manufactured geometry;
/// used for energy-identity and unconditional-stability runs from arbitrary
/// initial coefficients.
pub fn decay() -> Scenario {
    Scenario {
        name: "decay".to_string(),
        geometry: Geometry::RectPair {
            fluid: Rect::new(0.0, 0.0, 1.0, 1.0),
            porous: Rect::new(0.0, -1.0, 1.0, 0.0),
        },
        nu: 1.0,
        g: 1.0,
        s0: 1.0,
        alpha: 1.0,
        k_base: 1.0,
        low_k: Vec::new(),
        velocity_bc: vec![
            ("fluid_left".to_string(), zero_vector()),
            ("fluid_right".to_string(), zero_vector()),
            ("fluid_top".to_string(), zero_vector()),
        ],
        head_bc: vec![
            ("porous_left".to_string(), HeadBc::Dirichlet(zero_scalar())),
            ("porous_right".to_string(), HeadBc::Dirichlet(zero_scalar())),
            (
                "porous_bottom".to_string(),
                HeadBc::Dirichlet(zero_scalar()),
            ),
        ],
        f1: zero_vector(),
        f2: zero_scalar(),
        u0: zero_vector(),
        phi0: zero_scalar(),
        exact: None,
        bjs_compensation: false,
        default_final_time: 0.5,
        default_dt: 0.01,
        default_h: 0.125,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cavity_lid_and_filtration_inflow_values() {
        let c = cavity();
        let lid = &c.velocity_bc.last().unwrap().1;
        assert_eq!(lid(Vec2::new(0.5, 1.0), 0.3), Vec2::new(1.0, 0.0));

        let f = filtration();
        let top = &f.velocity_bc.last().unwrap().1;
        // u = (0, x(x-2)) at x = 1 is (0, -1).
        assert_eq!(top(Vec2::new(1.0, 2.0), 0.0), Vec2::new(0.0, -1.0));
    }

    #[test]
    fn scenario_bcs_cover_rect_meshes() {
        for s in [cavity(), filtration(), decay()] {
            let mesh = s.build_mesh(0.25).unwrap();
            s.validate_bcs(&mesh).unwrap();
        }
    }

    #[test]
    fn filtration_blocks_are_low_k() {
        let s = filtration();
        let mesh = s.build_mesh(1.0 / 32.0).unwrap();
        let params = s.physical_params(&mesh).unwrap();
        let mut low = 0usize;
        for t in 0..mesh.n_triangles() {
            if s.low_k.iter().any(|(r, _)| r.contains(mesh.centroid(t))) {
                assert_eq!(params.k.k(t), 1e-6);
                low += 1;
            }
        }
        assert!(low > 0);
    }
}
