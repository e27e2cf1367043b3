//! L2 and H1 norms of discrete fields, exact functions, and their
//! differences, plus the discrete-in-time composites.
//!
//! Quadrature uses the degree-6 triangle rule, exact for `2·(max basis
//! degree) + 2 = 6` with P2 fields.

use super::dofmap::{DofMap, FieldKind, Spaces};
use super::reference::{p1_shape, p2_grad, p2_shape, tri_rule_degree6, TriGeom, P1_GRAD};
use crate::geometry::Vec2;
use crate::mesh::{Mesh, Subdomain};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormKind {
    L2,
    H1Semi,
    H1,
}

#[derive(Debug, Error)]
pub enum NormError {
    #[error("field kind {kind:?} does not live on subdomain {subdomain:?}")]
    SubdomainMismatch {
        kind: FieldKind,
        subdomain: Subdomain,
    },
    #[error("coefficient vector has length {len}, dof map has {expected}")]
    Length { len: usize, expected: usize },
}

fn check(map: &DofMap, len: usize, subdomain: Subdomain) -> Result<(), NormError> {
    if map.kind.subdomain() != subdomain {
        return Err(NormError::SubdomainMismatch {
            kind: map.kind,
            subdomain,
        });
    }
    if len != map.n_dofs {
        return Err(NormError::Length {
            len,
            expected: map.n_dofs,
        });
    }
    Ok(())
}

struct Accum {
    l2: f64,
    h1: f64,
}

fn finish(kind: NormKind, a: Accum) -> f64 {
    match kind {
        NormKind::L2 => a.l2.sqrt(),
        NormKind::H1Semi => a.h1.sqrt(),
        NormKind::H1 => (a.l2 + a.h1).sqrt(),
    }
}

/// Norm of the difference between a scalar discrete field and a scalar exact
/// function (pass `&|_| 0.0` closures to get the field norm itself).
pub fn scalar_error_norm(
    kind: NormKind,
    coeffs: &[f64],
    map: &DofMap,
    mesh: &Mesh,
    spaces: &Spaces,
    subdomain: Subdomain,
    exact: &dyn Fn(Vec2) -> f64,
    exact_grad: &dyn Fn(Vec2) -> Vec2,
) -> Result<f64, NormError> {
    check(map, coeffs.len(), subdomain)?;
    let rule = tri_rule_degree6();
    let mut acc = Accum { l2: 0.0, h1: 0.0 };
    let linear = map.kind == FieldKind::Pressure;
    for t in 0..mesh.n_triangles() {
        if mesh.subdomain[t] != subdomain {
            continue;
        }
        let geom = TriGeom::new(mesh.triangle_vertices(t));
        let nodes = map.tri_nodes(t, mesh, &spaces.topo);
        for (q, &(xi, eta)) in rule.points.iter().enumerate() {
            let w = rule.weights[q] * geom.det_j;
            let x = geom.to_physical(xi, eta);
            let (mut val, mut grad) = (0.0f64, Vec2::ZERO);
            if linear {
                let n = p1_shape(xi, eta);
                for i in 0..3 {
                    val += coeffs[nodes[i]] * n[i];
                    grad = grad + geom.grad(P1_GRAD[i]) * coeffs[nodes[i]];
                }
            } else {
                let n = p2_shape(xi, eta);
                let gr = p2_grad(xi, eta);
                for i in 0..6 {
                    val += coeffs[nodes[i]] * n[i];
                    grad = grad + geom.grad(gr[i]) * coeffs[nodes[i]];
                }
            }
            let dv = val - exact(x);
            let dg = grad - exact_grad(x);
            acc.l2 += w * dv * dv;
            acc.h1 += w * dg.dot(dg);
        }
    }
    Ok(finish(kind, acc))
}

/// Norm of a scalar discrete field.
pub fn scalar_field_norm(
    kind: NormKind,
    coeffs: &[f64],
    map: &DofMap,
    mesh: &Mesh,
    spaces: &Spaces,
    subdomain: Subdomain,
) -> Result<f64, NormError> {
    scalar_error_norm(
        kind,
        coeffs,
        map,
        mesh,
        spaces,
        subdomain,
        &|_| 0.0,
        &|_| Vec2::ZERO,
    )
}

/// Norm of the difference between the discrete velocity and a vector exact
/// function; `exact_grad` returns `[[∂u₁/∂x, ∂u₁/∂y], [∂u₂/∂x, ∂u₂/∂y]]`.
pub fn vector_error_norm(
    kind: NormKind,
    coeffs: &[f64],
    map: &DofMap,
    mesh: &Mesh,
    spaces: &Spaces,
    exact: &dyn Fn(Vec2) -> Vec2,
    exact_grad: &dyn Fn(Vec2) -> [[f64; 2]; 2],
) -> Result<f64, NormError> {
    check(map, coeffs.len(), Subdomain::Fluid)?;
    let rule = tri_rule_degree6();
    let mut acc = Accum { l2: 0.0, h1: 0.0 };
    for t in 0..mesh.n_triangles() {
        if mesh.subdomain[t] != Subdomain::Fluid {
            continue;
        }
        let geom = TriGeom::new(mesh.triangle_vertices(t));
        let nodes = map.tri_nodes(t, mesh, &spaces.topo);
        for (q, &(xi, eta)) in rule.points.iter().enumerate() {
            let w = rule.weights[q] * geom.det_j;
            let x = geom.to_physical(xi, eta);
            let n = p2_shape(xi, eta);
            let gr = p2_grad(xi, eta);
            let mut val = Vec2::ZERO;
            let mut grad = [[0.0f64; 2]; 2];
            for i in 0..6 {
                let ni = nodes[i];
                val = val + Vec2::new(coeffs[2 * ni], coeffs[2 * ni + 1]) * n[i];
                let g = geom.grad(gr[i]);
                grad[0][0] += coeffs[2 * ni] * g.x;
                grad[0][1] += coeffs[2 * ni] * g.y;
                grad[1][0] += coeffs[2 * ni + 1] * g.x;
                grad[1][1] += coeffs[2 * ni + 1] * g.y;
            }
            let dv = val - exact(x);
            let ge = exact_grad(x);
            acc.l2 += w * dv.dot(dv);
            for c in 0..2 {
                for d in 0..2 {
                    let dg = grad[c][d] - ge[c][d];
                    acc.h1 += w * dg * dg;
                }
            }
        }
    }
    Ok(finish(kind, acc))
}

/// Norm of the discrete velocity field.
pub fn vector_field_norm(
    kind: NormKind,
    coeffs: &[f64],
    map: &DofMap,
    mesh: &Mesh,
    spaces: &Spaces,
) -> Result<f64, NormError> {
    vector_error_norm(kind, coeffs, map, mesh, spaces, &|_| Vec2::ZERO, &|_| {
        [[0.0; 2]; 2]
    })
}

/// Norm of an exact scalar function over a subdomain (quadrature value).
pub fn exact_scalar_norm(
    kind: NormKind,
    mesh: &Mesh,
    subdomain: Subdomain,
    f: &dyn Fn(Vec2) -> f64,
    grad: &dyn Fn(Vec2) -> Vec2,
) -> f64 {
    let rule = tri_rule_degree6();
    let mut acc = Accum { l2: 0.0, h1: 0.0 };
    for t in 0..mesh.n_triangles() {
        if mesh.subdomain[t] != subdomain {
            continue;
        }
        let geom = TriGeom::new(mesh.triangle_vertices(t));
        for (q, &(xi, eta)) in rule.points.iter().enumerate() {
            let w = rule.weights[q] * geom.det_j;
            let x = geom.to_physical(xi, eta);
            let v = f(x);
            let g = grad(x);
            acc.l2 += w * v * v;
            acc.h1 += w * g.dot(g);
        }
    }
    finish(kind, acc)
}

/// Discrete-in-time composite `(Δt Σₙ vₙᵐ)^{1/m}` with m = 2.
pub fn time_l2(dt: f64, samples: &[f64]) -> f64 {
    (dt * samples.iter().map(|v| v * v).sum::<f64>()).sqrt()
}

/// Discrete-in-time composite `maxₙ vₙ`.
pub fn time_linf(samples: &[f64]) -> f64 {
    samples.iter().cloned().fold(0.0, f64::max)
}
