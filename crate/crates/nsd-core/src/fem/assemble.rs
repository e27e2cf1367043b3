//! Sparse assembly of every bilinear, trilinear and interface form in the
//! weak formulation.
//!
//! Volume terms use the 12-point degree-6 triangle rule, interface terms the
//! 4-point Gauss edge rule; both are exact for every polynomial integrand
//! that occurs (the stiffest is the P2 × P2 × ∇P2 trilinear term, degree 5
//! in the volume and degree 6 on edges). Assembly is single-threaded and
//! bit-reproducible: elements are visited in index order.

use super::dofmap::{DofMap, FieldKind, Spaces};
use super::params::PhysicalParams;
use super::reference::{
    edge_p2_shape, edge_rule_gauss4, p1_shape, p2_grad, p2_shape, tri_rule_degree6, TriGeom,
};
use super::sparse::{CooBuilder, SparseOperator};
use crate::geometry::Vec2;
use crate::mesh::{Mesh, Subdomain};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FemError {
    #[error("wrong field kind: expected {expected:?}, got {got:?}")]
    FieldKind { expected: FieldKind, got: FieldKind },
    #[error("coefficient vector has length {len}, dof map has {expected}")]
    Length { len: usize, expected: usize },
}

/// The assembled weak-form terms.
///
/// `MassVelocity` is `(u, v)_f`; `StiffnessVelocity` is `ν(∇u, ∇v)_f`;
/// `Divergence` is `(∇·u, q)_f` (pressure rows, velocity columns);
/// `InterfaceTangential` is `η Σᵢ ∫_Γ (u·τᵢ)(v·τᵢ) ds`; `MassHead` is
/// `g S₀ (φ, ψ)_p`; `StiffnessHead` is `g (K∇φ, ∇ψ)_p`;
/// `InterfaceCoupling` is `c_Γ(v, φ) = g ∫_Γ φ (v·n_f) ds` (velocity rows,
/// head columns).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormId {
    MassVelocity,
    StiffnessVelocity,
    Divergence,
    InterfaceTangential,
    MassHead,
    StiffnessHead,
    InterfaceCoupling,
}

pub fn assemble_form(
    form: FormId,
    mesh: &Mesh,
    spaces: &Spaces,
    params: &PhysicalParams,
) -> SparseOperator {
    match form {
        FormId::MassVelocity => vector_p2_form(mesh, spaces, |_t, _g| 1.0, Weight::Mass),
        FormId::StiffnessVelocity => {
            vector_p2_form(mesh, spaces, |_t, _g| params.nu, Weight::Stiffness)
        }
        FormId::Divergence => divergence(mesh, spaces),
        FormId::InterfaceTangential => interface_tangential(mesh, spaces, params),
        FormId::MassHead => scalar_p2_form(mesh, spaces, |_t| params.g * params.s0, Weight::Mass),
        FormId::StiffnessHead => scalar_p2_form(
            mesh,
            spaces,
            |t| params.g * params.k.k(t),
            Weight::Stiffness,
        ),
        FormId::InterfaceCoupling => interface_coupling(mesh, spaces, params),
    }
}

enum Weight {
    Mass,
    Stiffness,
}

fn vector_p2_form(
    mesh: &Mesh,
    spaces: &Spaces,
    coeff: impl Fn(usize, &TriGeom) -> f64,
    weight: Weight,
) -> SparseOperator {
    let map = &spaces.velocity;
    let rule = tri_rule_degree6();
    let mut b = CooBuilder::new(map.n_dofs, map.n_dofs);
    let mut local = [[0.0f64; 6]; 6];
    for t in 0..mesh.n_triangles() {
        if mesh.subdomain[t] != Subdomain::Fluid {
            continue;
        }
        let geom = TriGeom::new(mesh.triangle_vertices(t));
        let c = coeff(t, &geom);
        for row in local.iter_mut() {
            row.fill(0.0);
        }
        for (q, &(xi, eta)) in rule.points.iter().enumerate() {
            let w = rule.weights[q] * geom.det_j * c;
            match weight {
                Weight::Mass => {
                    let n = p2_shape(xi, eta);
                    for i in 0..6 {
                        for j in 0..6 {
                            local[i][j] += w * n[i] * n[j];
                        }
                    }
                }
                Weight::Stiffness => {
                    let gr = p2_grad(xi, eta);
                    let g: Vec<Vec2> = gr.iter().map(|&gi| geom.grad(gi)).collect();
                    for i in 0..6 {
                        for j in 0..6 {
                            local[i][j] += w * g[i].dot(g[j]);
                        }
                    }
                }
            }
        }
        let nodes = map.tri_nodes(t, mesh, &spaces.topo);
        for i in 0..6 {
            for j in 0..6 {
                for c in 0..2 {
                    b.add(2 * nodes[i] + c, 2 * nodes[j] + c, local[i][j]);
                }
            }
        }
    }
    b.build()
}

fn scalar_p2_form(
    mesh: &Mesh,
    spaces: &Spaces,
    coeff: impl Fn(usize) -> f64,
    weight: Weight,
) -> SparseOperator {
    let map = &spaces.head;
    let rule = tri_rule_degree6();
    let mut b = CooBuilder::new(map.n_dofs, map.n_dofs);
    for t in 0..mesh.n_triangles() {
        if mesh.subdomain[t] != Subdomain::Porous {
            continue;
        }
        let geom = TriGeom::new(mesh.triangle_vertices(t));
        let c = coeff(t);
        let nodes = map.tri_nodes(t, mesh, &spaces.topo);
        for (q, &(xi, eta)) in rule.points.iter().enumerate() {
            let w = rule.weights[q] * geom.det_j * c;
            match weight {
                Weight::Mass => {
                    let n = p2_shape(xi, eta);
                    for i in 0..6 {
                        for j in 0..6 {
                            b.add(nodes[i], nodes[j], w * n[i] * n[j]);
                        }
                    }
                }
                Weight::Stiffness => {
                    let gr = p2_grad(xi, eta);
                    let g: Vec<Vec2> = gr.iter().map(|&gi| geom.grad(gi)).collect();
                    for i in 0..6 {
                        for j in 0..6 {
                            b.add(nodes[i], nodes[j], w * g[i].dot(g[j]));
                        }
                    }
                }
            }
        }
    }
    b.build()
}

/// `(∇·u, q)_f`: pressure rows, velocity columns.
fn divergence(mesh: &Mesh, spaces: &Spaces) -> SparseOperator {
    let rule = tri_rule_degree6();
    let mut b = CooBuilder::new(spaces.pressure.n_dofs, spaces.velocity.n_dofs);
    for t in 0..mesh.n_triangles() {
        if mesh.subdomain[t] != Subdomain::Fluid {
            continue;
        }
        let geom = TriGeom::new(mesh.triangle_vertices(t));
        let vnodes = spaces.velocity.tri_nodes(t, mesh, &spaces.topo);
        let pnodes = spaces.pressure.tri_nodes(t, mesh, &spaces.topo);
        for (q, &(xi, eta)) in rule.points.iter().enumerate() {
            let w = rule.weights[q] * geom.det_j;
            let p1 = p1_shape(xi, eta);
            let gr = p2_grad(xi, eta);
            for i in 0..3 {
                for j in 0..6 {
                    let g = geom.grad(gr[j]);
                    b.add(pnodes[i], 2 * vnodes[j], w * p1[i] * g.x);
                    b.add(pnodes[i], 2 * vnodes[j] + 1, w * p1[i] * g.y);
                }
            }
        }
    }
    b.build()
}

/// `η Σᵢ ∫_Γ (u·τᵢ)(v·τᵢ) ds` with η from the porous-side k of each edge.
fn interface_tangential(mesh: &Mesh, spaces: &Spaces, params: &PhysicalParams) -> SparseOperator {
    let rule = edge_rule_gauss4();
    let mut b = CooBuilder::new(spaces.velocity.n_dofs, spaces.velocity.n_dofs);
    for e in &mesh.interface_edges {
        let [va, vb] = e.vertices;
        let nodes = spaces
            .velocity
            .edge_nodes_on(va, vb, &spaces.topo)
            .expect("interface edge lies in the fluid mesh");
        let len = mesh.edge_length(e.vertices);
        let tau = e.tangent();
        let eta = params.eta_on(e);
        for (q, &s) in rule.points.iter().enumerate() {
            let w = rule.weights[q] * len * eta;
            let tr = edge_p2_shape(s);
            for i in 0..3 {
                for j in 0..3 {
                    let v = w * tr[i] * tr[j];
                    for c in 0..2 {
                        for cp in 0..2 {
                            b.add(
                                2 * nodes[i] + c,
                                2 * nodes[j] + cp,
                                v * tau_c(tau, c) * tau_c(tau, cp),
                            );
                        }
                    }
                }
            }
        }
    }
    b.build()
}

/// `c_Γ(v, φ) = g ∫_Γ φ (v·n_f) ds`: velocity rows, head columns.
fn interface_coupling(mesh: &Mesh, spaces: &Spaces, params: &PhysicalParams) -> SparseOperator {
    let rule = edge_rule_gauss4();
    let mut b = CooBuilder::new(spaces.velocity.n_dofs, spaces.head.n_dofs);
    for e in &mesh.interface_edges {
        let [va, vb] = e.vertices;
        let vnodes = spaces
            .velocity
            .edge_nodes_on(va, vb, &spaces.topo)
            .expect("interface edge lies in the fluid mesh");
        let hnodes = spaces
            .head
            .edge_nodes_on(va, vb, &spaces.topo)
            .expect("interface edge lies in the porous mesh");
        let len = mesh.edge_length(e.vertices);
        for (q, &s) in rule.points.iter().enumerate() {
            let w = rule.weights[q] * len * params.g;
            let tr = edge_p2_shape(s);
            for i in 0..3 {
                for j in 0..3 {
                    let v = w * tr[i] * tr[j];
                    b.add(2 * vnodes[i], hnodes[j], v * e.normal_f.x);
                    b.add(2 * vnodes[i] + 1, hnodes[j], v * e.normal_f.y);
                }
            }
        }
    }
    b.build()
}

fn tau_c(tau: Vec2, c: usize) -> f64 {
    if c == 0 {
        tau.x
    } else {
        tau.y
    }
}

fn check_velocity(coeffs: &super::dofmap::FieldVector, map: &DofMap) -> Result<(), FemError> {
    if coeffs.kind != FieldKind::Velocity {
        return Err(FemError::FieldKind {
            expected: FieldKind::Velocity,
            got: coeffs.kind,
        });
    }
    if coeffs.values.len() != map.n_dofs {
        return Err(FemError::Length {
            len: coeffs.values.len(),
            expected: map.n_dofs,
        });
    }
    Ok(())
}

/// Evaluates the trilinear form against every velocity test function:
/// `out[i] = a_N(u, v, φᵢ) = ((u·∇)v, φᵢ)_f − ½ ∫_Γ (u·v)(φᵢ·n_f) ds`.
///
/// The boundary correction integrates over Γ only.
pub fn apply_trilinear(
    u: &super::dofmap::FieldVector,
    v: &super::dofmap::FieldVector,
    mesh: &Mesh,
    spaces: &Spaces,
) -> Result<Vec<f64>, FemError> {
    check_velocity(u, &spaces.velocity)?;
    check_velocity(v, &spaces.velocity)?;
    let u = &u.values;
    let v = &v.values;

    let rule = tri_rule_degree6();
    let mut out = vec![0.0; spaces.velocity.n_dofs];
    for t in 0..mesh.n_triangles() {
        if mesh.subdomain[t] != Subdomain::Fluid {
            continue;
        }
        let geom = TriGeom::new(mesh.triangle_vertices(t));
        let nodes = spaces.velocity.tri_nodes(t, mesh, &spaces.topo);
        for (q, &(xi, eta)) in rule.points.iter().enumerate() {
            let w = rule.weights[q] * geom.det_j;
            let n = p2_shape(xi, eta);
            let gr = p2_grad(xi, eta);
            let mut u_val = Vec2::ZERO;
            let mut grad_v = [[0.0f64; 2]; 2]; // grad_v[c][d] = ∂v_c/∂x_d
            for k in 0..6 {
                let nk = nodes[k];
                u_val = u_val + Vec2::new(u[2 * nk], u[2 * nk + 1]) * n[k];
                let g = geom.grad(gr[k]);
                grad_v[0][0] += v[2 * nk] * g.x;
                grad_v[0][1] += v[2 * nk] * g.y;
                grad_v[1][0] += v[2 * nk + 1] * g.x;
                grad_v[1][1] += v[2 * nk + 1] * g.y;
            }
            let conv = Vec2::new(
                u_val.x * grad_v[0][0] + u_val.y * grad_v[0][1],
                u_val.x * grad_v[1][0] + u_val.y * grad_v[1][1],
            );
            for i in 0..6 {
                out[2 * nodes[i]] += w * n[i] * conv.x;
                out[2 * nodes[i] + 1] += w * n[i] * conv.y;
            }
        }
    }

    let erule = edge_rule_gauss4();
    for e in &mesh.interface_edges {
        let [va, vb] = e.vertices;
        let nodes = spaces
            .velocity
            .edge_nodes_on(va, vb, &spaces.topo)
            .expect("interface edge lies in the fluid mesh");
        let len = mesh.edge_length(e.vertices);
        for (q, &s) in erule.points.iter().enumerate() {
            let w = erule.weights[q] * len;
            let tr = edge_p2_shape(s);
            let mut u_val = Vec2::ZERO;
            let mut v_val = Vec2::ZERO;
            for k in 0..3 {
                let nk = nodes[k];
                u_val = u_val + Vec2::new(u[2 * nk], u[2 * nk + 1]) * tr[k];
                v_val = v_val + Vec2::new(v[2 * nk], v[2 * nk + 1]) * tr[k];
            }
            let uv = u_val.dot(v_val);
            for i in 0..3 {
                out[2 * nodes[i]] -= 0.5 * w * tr[i] * uv * e.normal_f.x;
                out[2 * nodes[i] + 1] -= 0.5 * w * tr[i] * uv * e.normal_f.y;
            }
        }
    }
    Ok(out)
}

/// Convection operator linear in its middle slot:
/// `N(a)[i, j] = a_N(a, φⱼ, φᵢ)`. Used by the implicit Picard reference.
pub fn convection_matrix(
    a: &super::dofmap::FieldVector,
    mesh: &Mesh,
    spaces: &Spaces,
) -> Result<SparseOperator, FemError> {
    check_velocity(a, &spaces.velocity)?;
    let a = &a.values;
    let rule = tri_rule_degree6();
    let mut b = CooBuilder::new(spaces.velocity.n_dofs, spaces.velocity.n_dofs);
    for t in 0..mesh.n_triangles() {
        if mesh.subdomain[t] != Subdomain::Fluid {
            continue;
        }
        let geom = TriGeom::new(mesh.triangle_vertices(t));
        let nodes = spaces.velocity.tri_nodes(t, mesh, &spaces.topo);
        for (q, &(xi, eta)) in rule.points.iter().enumerate() {
            let w = rule.weights[q] * geom.det_j;
            let n = p2_shape(xi, eta);
            let gr = p2_grad(xi, eta);
            let mut a_val = Vec2::ZERO;
            for k in 0..6 {
                let nk = nodes[k];
                a_val = a_val + Vec2::new(a[2 * nk], a[2 * nk + 1]) * n[k];
            }
            for j in 0..6 {
                let adv = a_val.dot(geom.grad(gr[j]));
                for i in 0..6 {
                    let v = w * n[i] * adv;
                    b.add(2 * nodes[i], 2 * nodes[j], v);
                    b.add(2 * nodes[i] + 1, 2 * nodes[j] + 1, v);
                }
            }
        }
    }
    let erule = edge_rule_gauss4();
    for e in &mesh.interface_edges {
        let [va, vb] = e.vertices;
        let nodes = spaces
            .velocity
            .edge_nodes_on(va, vb, &spaces.topo)
            .expect("interface edge lies in the fluid mesh");
        let len = mesh.edge_length(e.vertices);
        for (q, &s) in erule.points.iter().enumerate() {
            let w = erule.weights[q] * len;
            let tr = edge_p2_shape(s);
            let mut a_val = Vec2::ZERO;
            for k in 0..3 {
                let nk = nodes[k];
                a_val = a_val + Vec2::new(a[2 * nk], a[2 * nk + 1]) * tr[k];
            }
            for i in 0..3 {
                for j in 0..3 {
                    let v = -0.5 * w * tr[i] * tr[j];
                    for c in 0..2 {
                        let nfc = if c == 0 { e.normal_f.x } else { e.normal_f.y };
                        b.add(2 * nodes[i] + c, 2 * nodes[j], v * a_val.x * nfc);
                        b.add(2 * nodes[i] + c, 2 * nodes[j] + 1, v * a_val.y * nfc);
                    }
                }
            }
        }
    }
    Ok(b.build())
}

/// Load vector `(f, v)_f` over the velocity test space at time `t`.
pub fn assemble_load_velocity(
    mesh: &Mesh,
    spaces: &Spaces,
    f: &dyn Fn(Vec2, f64) -> Vec2,
    t: f64,
) -> Vec<f64> {
    let rule = tri_rule_degree6();
    let mut out = vec![0.0; spaces.velocity.n_dofs];
    for tr in 0..mesh.n_triangles() {
        if mesh.subdomain[tr] != Subdomain::Fluid {
            continue;
        }
        let geom = TriGeom::new(mesh.triangle_vertices(tr));
        let nodes = spaces.velocity.tri_nodes(tr, mesh, &spaces.topo);
        for (q, &(xi, eta)) in rule.points.iter().enumerate() {
            let w = rule.weights[q] * geom.det_j;
            let n = p2_shape(xi, eta);
            let fv = f(geom.to_physical(xi, eta), t);
            for i in 0..6 {
                out[2 * nodes[i]] += w * n[i] * fv.x;
                out[2 * nodes[i] + 1] += w * n[i] * fv.y;
            }
        }
    }
    out
}

/// Load vector `g (f, ψ)_p` over the head test space at time `t` (carries the
/// weak form's g weight).
pub fn assemble_load_head(
    mesh: &Mesh,
    spaces: &Spaces,
    f: &dyn Fn(Vec2, f64) -> f64,
    t: f64,
    g: f64,
) -> Vec<f64> {
    let rule = tri_rule_degree6();
    let mut out = vec![0.0; spaces.head.n_dofs];
    for tr in 0..mesh.n_triangles() {
        if mesh.subdomain[tr] != Subdomain::Porous {
            continue;
        }
        let geom = TriGeom::new(mesh.triangle_vertices(tr));
        let nodes = spaces.head.tri_nodes(tr, mesh, &spaces.topo);
        for (q, &(xi, eta)) in rule.points.iter().enumerate() {
            let w = rule.weights[q] * geom.det_j * g;
            let n = p2_shape(xi, eta);
            let fv = f(geom.to_physical(xi, eta), t);
            for i in 0..6 {
                out[nodes[i]] += w * n[i] * fv;
            }
        }
    }
    out
}

/// Interface functional `ℓ(v) = ∫_Γ q(x, n_f, τ, η) (v·τ) ds` over the
/// velocity test space; `q` is evaluated per quadrature point with the edge's
/// normal, tangent and BJS coefficient. Used for the BJS compensation of
/// manufactured runs.
pub fn assemble_interface_tangential_load(
    mesh: &Mesh,
    spaces: &Spaces,
    params: &PhysicalParams,
    q_fn: &dyn Fn(Vec2, Vec2, Vec2, f64) -> f64,
) -> Vec<f64> {
    let rule = edge_rule_gauss4();
    let mut out = vec![0.0; spaces.velocity.n_dofs];
    for e in &mesh.interface_edges {
        let [va, vb] = e.vertices;
        let nodes = spaces
            .velocity
            .edge_nodes_on(va, vb, &spaces.topo)
            .expect("interface edge lies in the fluid mesh");
        let len = mesh.edge_length(e.vertices);
        let a = mesh.vertices[va];
        let b = mesh.vertices[vb];
        let tau = e.tangent();
        let eta = params.eta_on(e);
        for (q, &s) in rule.points.iter().enumerate() {
            let w = rule.weights[q] * len;
            let x = a + (b - a) * s;
            let qv = q_fn(x, e.normal_f, tau, eta);
            let tr = edge_p2_shape(s);
            for i in 0..3 {
                out[2 * nodes[i]] += w * tr[i] * qv * tau.x;
                out[2 * nodes[i] + 1] += w * tr[i] * qv * tau.y;
            }
        }
    }
    out
}

/// Net interface flux `∫_Γ u_h·n_f ds` of a velocity coefficient vector.
pub fn interface_flux(u: &[f64], mesh: &Mesh, spaces: &Spaces) -> f64 {
    let rule = edge_rule_gauss4();
    let mut flux = 0.0;
    for e in &mesh.interface_edges {
        let [va, vb] = e.vertices;
        let nodes = spaces
            .velocity
            .edge_nodes_on(va, vb, &spaces.topo)
            .expect("interface edge lies in the fluid mesh");
        let len = mesh.edge_length(e.vertices);
        for (q, &s) in rule.points.iter().enumerate() {
            let w = rule.weights[q] * len;
            let tr = edge_p2_shape(s);
            let mut u_val = Vec2::ZERO;
            for k in 0..3 {
                let nk = nodes[k];
                u_val = u_val + Vec2::new(u[2 * nk], u[2 * nk + 1]) * tr[k];
            }
            flux += w * u_val.dot(e.normal_f);
        }
    }
    flux
}

/// Net outflow `∮ u_h·n ds` through the boundary segments whose label passes
/// the filter (outward normal of the adjacent triangle).
pub fn boundary_flux(
    u: &[f64],
    mesh: &Mesh,
    spaces: &Spaces,
    label_filter: &dyn Fn(&str) -> bool,
) -> f64 {
    let rule = edge_rule_gauss4();
    let mut flux = 0.0;
    for e in &mesh.boundary_edges {
        if !label_filter(&e.label) || mesh.subdomain[e.triangle] != Subdomain::Fluid {
            continue;
        }
        let [va, vb] = e.vertices;
        let nodes = spaces
            .velocity
            .edge_nodes_on(va, vb, &spaces.topo)
            .expect("boundary edge lies in the fluid mesh");
        let len = mesh.edge_length(e.vertices);
        let n = mesh
            .outward_normal(e.triangle, e.vertices)
            .expect("edge belongs to its triangle");
        for (q, &s) in rule.points.iter().enumerate() {
            let w = rule.weights[q] * len;
            let tr = edge_p2_shape(s);
            let mut u_val = Vec2::ZERO;
            for k in 0..3 {
                let nk = nodes[k];
                u_val = u_val + Vec2::new(u[2 * nk], u[2 * nk + 1]) * tr[k];
            }
            flux += w * u_val.dot(n);
        }
    }
    flux
}
