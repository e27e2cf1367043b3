//! Reference triangle, Lagrange shape functions and quadrature rules.
//!
//! Reference coordinates are `(ξ, η)` on the triangle with vertices
//! `(0,0), (1,0), (0,1)`; barycentric `λ = (1-ξ-η, ξ, η)`. The local P2 dof
//! order is the 3 vertices followed by the 3 edge midpoints, each edge
//! ordered opposite its vertex (midpoint 3 on edge 1-2, 4 on 2-0, 5 on 0-1).

use crate::geometry::Vec2;

/// P1 shape values at `(ξ, η)`.
pub fn p1_shape(xi: f64, eta: f64) -> [f64; 3] {
    [1.0 - xi - eta, xi, eta]
}

/// P1 reference gradients (constant).
pub const P1_GRAD: [[f64; 2]; 3] = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];

/// P2 shape values at `(ξ, η)`.
pub fn p2_shape(xi: f64, eta: f64) -> [f64; 6] {
    let l = p1_shape(xi, eta);
    [
        l[0] * (2.0 * l[0] - 1.0),
        l[1] * (2.0 * l[1] - 1.0),
        l[2] * (2.0 * l[2] - 1.0),
        4.0 * l[1] * l[2],
        4.0 * l[2] * l[0],
        4.0 * l[0] * l[1],
    ]
}

/// P2 reference gradients at `(ξ, η)`.
pub fn p2_grad(xi: f64, eta: f64) -> [[f64; 2]; 6] {
    let l = p1_shape(xi, eta);
    let d = P1_GRAD;
    let mut g = [[0.0; 2]; 6];
    for i in 0..3 {
        for c in 0..2 {
            g[i][c] = (4.0 * l[i] - 1.0) * d[i][c];
        }
    }
    let pairs = [(1, 2), (2, 0), (0, 1)];
    for (m, &(a, b)) in pairs.iter().enumerate() {
        for c in 0..2 {
            g[3 + m][c] = 4.0 * (l[a] * d[b][c] + l[b] * d[a][c]);
        }
    }
    g
}

/// Quadratic Lagrange trace on an edge parametrized by `s ∈ [0, 1]`, dofs
/// ordered (endpoint at s=0, endpoint at s=1, midpoint).
pub fn edge_p2_shape(s: f64) -> [f64; 3] {
    [
        (1.0 - s) * (1.0 - 2.0 * s),
        s * (2.0 * s - 1.0),
        4.0 * s * (1.0 - s),
    ]
}

/// Quadrature rule on the reference triangle; weights sum to its area 1/2.
#[derive(Clone, Debug)]
pub struct TriRule {
    pub points: Vec<(f64, f64)>,
    pub weights: Vec<f64>,
}

/// 12-point rule exact through total degree 6 (covers the P2×P2×∇P2
/// trilinear integrand).
pub fn tri_rule_degree6() -> TriRule {
    // Three symmetric orbits; barycentric coordinates and weights (weights
    // normalized to the unit-area triangle, rescaled by 1/2 below).
    let orbits: [(&[f64], f64); 3] = [
        (
            &[0.873_821_971_016_996, 0.063_089_014_491_502],
            0.050_844_906_370_207,
        ),
        (
            &[0.501_426_509_658_179, 0.249_286_745_170_910],
            0.116_786_275_726_379,
        ),
        (
            &[
                0.636_502_499_121_399,
                0.310_352_451_033_785,
                0.053_145_049_844_816,
            ],
            0.082_851_075_618_374,
        ),
    ];
    let mut points = Vec::with_capacity(12);
    let mut weights = Vec::with_capacity(12);
    for (coords, w) in orbits {
        let perms: Vec<[f64; 3]> = match coords.len() {
            2 => {
                let (a, b) = (coords[0], coords[1]);
                vec![[a, b, b], [b, a, b], [b, b, a]]
            }
            _ => {
                let (a, b, c) = (coords[0], coords[1], coords[2]);
                vec![
                    [a, b, c],
                    [a, c, b],
                    [b, a, c],
                    [b, c, a],
                    [c, a, b],
                    [c, b, a],
                ]
            }
        };
        for bary in perms {
            // (ξ, η) = (λ₁, λ₂)
            points.push((bary[1], bary[2]));
            weights.push(0.5 * w);
        }
    }
    TriRule { points, weights }
}

/// Gauss-Legendre rule on `[0, 1]`; weights sum to 1.
#[derive(Clone, Debug)]
pub struct EdgeRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

/// 4-point Gauss rule, exact through degree 7.
pub fn edge_rule_gauss4() -> EdgeRule {
    let x1 = 0.339_981_043_584_856_26;
    let x2 = 0.861_136_311_594_052_6;
    let w1 = 0.652_145_154_862_546_1;
    let w2 = 0.347_854_845_137_453_85;
    EdgeRule {
        points: vec![
            0.5 * (1.0 - x2),
            0.5 * (1.0 - x1),
            0.5 * (1.0 + x1),
            0.5 * (1.0 + x2),
        ],
        weights: vec![0.5 * w2, 0.5 * w1, 0.5 * w1, 0.5 * w2],
    }
}

/// Affine geometry of one physical triangle: maps reference points and
/// gradients to physical space.
#[derive(Clone, Copy, Debug)]
pub struct TriGeom {
    pub verts: [Vec2; 3],
    /// det J = 2 · area (positive for CCW vertices).
    pub det_j: f64,
    inv_jt: [[f64; 2]; 2],
}

impl TriGeom {
    pub fn new(verts: [Vec2; 3]) -> Self {
        let j = [
            [verts[1].x - verts[0].x, verts[2].x - verts[0].x],
            [verts[1].y - verts[0].y, verts[2].y - verts[0].y],
        ];
        let det_j = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        // J^{-T} = adj(J)ᵀ / det.
        let inv_jt = [
            [j[1][1] / det_j, -j[1][0] / det_j],
            [-j[0][1] / det_j, j[0][0] / det_j],
        ];
        TriGeom {
            verts,
            det_j,
            inv_jt,
        }
    }

    pub fn area(&self) -> f64 {
        0.5 * self.det_j
    }

    pub fn to_physical(&self, xi: f64, eta: f64) -> Vec2 {
        self.verts[0] + (self.verts[1] - self.verts[0]) * xi + (self.verts[2] - self.verts[0]) * eta
    }

    /// Inverse of the affine map: reference coordinates of a physical point.
    pub fn to_reference(&self, p: Vec2) -> (f64, f64) {
        let d = p - self.verts[0];
        // J⁻¹ = (J^{-T})ᵀ.
        (
            self.inv_jt[0][0] * d.x + self.inv_jt[1][0] * d.y,
            self.inv_jt[0][1] * d.x + self.inv_jt[1][1] * d.y,
        )
    }

    /// Physical gradient from a reference gradient.
    pub fn grad(&self, g_ref: [f64; 2]) -> Vec2 {
        Vec2::new(
            self.inv_jt[0][0] * g_ref[0] + self.inv_jt[0][1] * g_ref[1],
            self.inv_jt[1][0] * g_ref[0] + self.inv_jt[1][1] * g_ref[1],
        )
    }
}
