//! Global velocity `U = u` on `Ω_f`, `U = -K∇φ` (Darcy velocity) on `Ω_p`,
//! sampled at mesh vertices.

use crate::fem::{PhysicalParams, Spaces};
use crate::geometry::Vec2;
use crate::mesh::{Mesh, Subdomain};
use crate::stepper::State;

/// Both one-sided values at an interface vertex.
#[derive(Clone, Copy, Debug)]
pub struct InterfaceSample {
    pub vertex: usize,
    pub fluid: Vec2,
    pub porous: Vec2,
}

/// Vertex-sampled global velocity. On Γ the `values` array carries the fluid
/// side; both one-sided values are retained in `interface`.
#[derive(Clone, Debug)]
pub struct GlobalVelocity {
    pub values: Vec<Vec2>,
    pub interface: Vec<InterfaceSample>,
}

pub fn global_velocity(
    state: &State,
    mesh: &Mesh,
    spaces: &Spaces,
    params: &PhysicalParams,
) -> GlobalVelocity {
    let n_v = mesh.n_vertices();
    let mut fluid_val = vec![Vec2::ZERO; n_v];
    let mut porous_val = vec![Vec2::ZERO; n_v];
    let mut porous_count = vec![0usize; n_v];
    let mut on_fluid = vec![false; n_v];
    let mut on_porous = vec![false; n_v];

    // Fluid side: the P2 velocity has nodal values at vertices.
    for v in 0..n_v {
        if let Some(node) = spaces.velocity.vertex_node(v) {
            fluid_val[v] = Vec2::new(state.u.values[2 * node], state.u.values[2 * node + 1]);
            on_fluid[v] = true;
        }
    }

    // Porous side: U = -k ∇φ_h, averaged over the adjacent porous triangles
    // (P2 gradients are discontinuous across elements).
    use crate::fem::reference::{p2_grad, TriGeom};
    for t in 0..mesh.n_triangles() {
        if mesh.subdomain[t] != Subdomain::Porous {
            continue;
        }
        let geom = TriGeom::new(mesh.triangle_vertices(t));
        let nodes = spaces.head.tri_nodes(t, mesh, &spaces.topo);
        let k = params.k.k(t);
        let ref_corners = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)];
        for (corner, &(xi, eta)) in ref_corners.iter().enumerate() {
            let v = mesh.triangles[t][corner];
            let gr = p2_grad(xi, eta);
            let mut grad = Vec2::ZERO;
            for i in 0..6 {
                grad = grad + geom.grad(gr[i]) * state.phi.values[nodes[i]];
            }
            porous_val[v] = porous_val[v] + grad * (-k);
            porous_count[v] += 1;
            on_porous[v] = true;
        }
    }
    for v in 0..n_v {
        if porous_count[v] > 0 {
            porous_val[v] = porous_val[v] * (1.0 / porous_count[v] as f64);
        }
    }

    let mut values = vec![Vec2::ZERO; n_v];
    let mut interface = Vec::new();
    for v in 0..n_v {
        values[v] = match (on_fluid[v], on_porous[v]) {
            (true, _) => fluid_val[v],
            (false, true) => porous_val[v],
            (false, false) => Vec2::ZERO,
        };
        if on_fluid[v] && on_porous[v] {
            interface.push(InterfaceSample {
                vertex: v,
                fluid: fluid_val[v],
                porous: porous_val[v],
            });
        }
    }
    GlobalVelocity { values, interface }
}

/// Global velocity at an arbitrary point: the P2 velocity on the fluid side,
/// `-k ∇φ_h` on the porous side (fluid side wins on Γ). `None` outside the
/// mesh.
pub fn sample_global_velocity(
    state: &State,
    mesh: &Mesh,
    spaces: &Spaces,
    params: &PhysicalParams,
    point: Vec2,
) -> Option<Vec2> {
    use crate::fem::reference::{p2_grad, p2_shape, TriGeom};
    // Prefer a fluid triangle when the point sits on Γ.
    let mut tri = None;
    for t in 0..mesh.n_triangles() {
        let geom = TriGeom::new(mesh.triangle_vertices(t));
        let (xi, eta) = geom.to_reference(point);
        let tol = 1e-12;
        if xi >= -tol && eta >= -tol && xi + eta <= 1.0 + tol {
            if mesh.subdomain[t] == Subdomain::Fluid {
                tri = Some(t);
                break;
            }
            tri.get_or_insert(t);
        }
    }
    let t = tri?;
    let geom = TriGeom::new(mesh.triangle_vertices(t));
    let (xi, eta) = geom.to_reference(point);
    match mesh.subdomain[t] {
        Subdomain::Fluid => {
            let nodes = spaces.velocity.tri_nodes(t, mesh, &spaces.topo);
            let n = p2_shape(xi, eta);
            let mut v = Vec2::ZERO;
            for i in 0..6 {
                v = v + Vec2::new(
                    state.u.values[2 * nodes[i]],
                    state.u.values[2 * nodes[i] + 1],
                ) * n[i];
            }
            Some(v)
        }
        Subdomain::Porous => {
            let nodes = spaces.head.tri_nodes(t, mesh, &spaces.topo);
            let gr = p2_grad(xi, eta);
            let mut grad = Vec2::ZERO;
            for i in 0..6 {
                grad = grad + geom.grad(gr[i]) * state.phi.values[nodes[i]];
            }
            Some(grad * (-params.k.k(t)))
        }
    }
}
