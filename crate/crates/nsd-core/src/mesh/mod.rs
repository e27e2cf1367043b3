//! Conforming triangulations of the coupled two-subdomain geometry.
//!
//! A single [`Mesh`] spans both subdomains with a per-triangle tag; conformity
//! across the interface `Γ` then holds by construction instead of by matching
//! two independent meshes. Interface edges store the unit normal `n_f` of the
//! fluid side; the tangent `τ` is its counter-clockwise 90° rotation (the only
//! tangential direction in 2D).

mod msh;
mod rect;

pub use msh::import_msh;
pub use rect::build_rect_coupled;

use crate::geometry::{cross2, Rect, Vec2};
use thiserror::Error;

/// Which subdomain a triangle belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subdomain {
    Fluid,
    Porous,
}

/// An outer-boundary edge, owned by exactly one triangle.
#[derive(Clone, Debug)]
pub struct BoundaryEdge {
    pub vertices: [usize; 2],
    /// Segment label (e.g. `"fluid_top"`, `"porous_bottom"`, or a name from a
    /// Gmsh physical group). Scenario boundary conditions are keyed on it.
    pub label: String,
    /// The unique adjacent triangle.
    pub triangle: usize,
}

/// An edge on `Γ`, shared by one fluid and one porous triangle.
#[derive(Clone, Debug)]
pub struct InterfaceEdge {
    pub vertices: [usize; 2],
    /// Unit normal pointing out of the fluid triangle.
    pub normal_f: Vec2,
    pub fluid_tri: usize,
    pub porous_tri: usize,
}

impl InterfaceEdge {
    /// Interface tangent: counter-clockwise 90° rotation of `n_f`.
    pub fn tangent(&self) -> Vec2 {
        self.normal_f.perp_ccw()
    }
}

/// Triangulation of `Ω_f ∪ Ω_p` with subdomain, boundary and interface tags.
#[derive(Clone, Debug)]
pub struct Mesh {
    pub vertices: Vec<Vec2>,
    /// Vertex index triples, counter-clockwise.
    pub triangles: Vec<[usize; 3]>,
    pub subdomain: Vec<Subdomain>,
    pub boundary_edges: Vec<BoundaryEdge>,
    pub interface_edges: Vec<InterfaceEdge>,
}

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error("msh parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("mesh validation failed: {0}")]
    Invalid(String),
}

/// One violation of a [`Mesh`] invariant, as reported by [`Mesh::validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum MeshDefect {
    NonPositiveArea { triangle: usize, area: f64 },
    InterfaceNotConforming { edge: usize, detail: String },
    BoundaryEdgeBad { edge: usize, detail: String },
    InterfaceNormalBad { edge: usize, detail: String },
}

impl std::fmt::Display for MeshDefect {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MeshDefect::NonPositiveArea { triangle, area } => {
                write!(f, "triangle {triangle} has non-positive signed area {area}")
            }
            MeshDefect::InterfaceNotConforming { edge, detail } => {
                write!(f, "interface edge {edge} is not conforming: {detail}")
            }
            MeshDefect::BoundaryEdgeBad { edge, detail } => {
                write!(f, "boundary edge {edge}: {detail}")
            }
            MeshDefect::InterfaceNormalBad { edge, detail } => {
                write!(f, "interface edge {edge} normal: {detail}")
            }
        }
    }
}

impl Mesh {
    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn triangle_vertices(&self, t: usize) -> [Vec2; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    /// Signed area of triangle `t` (positive for counter-clockwise vertices).
    pub fn signed_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_vertices(t);
        0.5 * cross2(a, b, c)
    }

    pub fn centroid(&self, t: usize) -> Vec2 {
        let [a, b, c] = self.triangle_vertices(t);
        (a + b + c) * (1.0 / 3.0)
    }

    pub fn subdomain_area(&self, sd: Subdomain) -> f64 {
        (0..self.n_triangles())
            .filter(|&t| self.subdomain[t] == sd)
            .map(|t| self.signed_area(t))
            .sum()
    }

    /// Total length of `Γ`.
    pub fn interface_length(&self) -> f64 {
        self.interface_edges
            .iter()
            .map(|e| (self.vertices[e.vertices[1]] - self.vertices[e.vertices[0]]).norm())
            .sum()
    }

    pub fn edge_length(&self, vertices: [usize; 2]) -> f64 {
        (self.vertices[vertices[1]] - self.vertices[vertices[0]]).norm()
    }

    /// Longest triangle side, the usual mesh parameter `h`.
    pub fn h_max(&self) -> f64 {
        let mut h: f64 = 0.0;
        for t in 0..self.n_triangles() {
            let v = self.triangle_vertices(t);
            for i in 0..3 {
                h = h.max((v[(i + 1) % 3] - v[i]).norm());
            }
        }
        h
    }

    /// Checks every mesh invariant and reports all violations; an empty report
    /// means the mesh is valid.
    pub fn validate(&self) -> Vec<MeshDefect> {
        let mut defects = Vec::new();

        for t in 0..self.n_triangles() {
            let area = self.signed_area(t);
            if !(area > 0.0) {
                defects.push(MeshDefect::NonPositiveArea { triangle: t, area });
            }
        }

        // Adjacency: undirected edge -> adjacent triangles.
        let mut adjacency: std::collections::HashMap<(usize, usize), Vec<usize>> =
            std::collections::HashMap::new();
        for (t, tri) in self.triangles.iter().enumerate() {
            for i in 0..3 {
                let a = tri[i];
                let b = tri[(i + 1) % 3];
                adjacency.entry(key(a, b)).or_default().push(t);
            }
        }

        for (i, e) in self.interface_edges.iter().enumerate() {
            let tris = adjacency.get(&key(e.vertices[0], e.vertices[1]));
            match tris {
                Some(ts) if ts.len() == 2 => {
                    let mut fluid = 0usize;
                    let mut porous = 0usize;
                    for &t in ts {
                        match self.subdomain[t] {
                            Subdomain::Fluid => fluid += 1,
                            Subdomain::Porous => porous += 1,
                        }
                    }
                    if fluid != 1 || porous != 1 {
                        defects.push(MeshDefect::InterfaceNotConforming {
                            edge: i,
                            detail: format!(
                                "shared by {fluid} fluid and {porous} porous triangles"
                            ),
                        });
                        continue;
                    }
                    if !ts.contains(&e.fluid_tri) || !ts.contains(&e.porous_tri) {
                        defects.push(MeshDefect::InterfaceNotConforming {
                            edge: i,
                            detail: "stored fluid/porous triangle ids do not match adjacency"
                                .to_string(),
                        });
                        continue;
                    }
                }
                Some(ts) => {
                    defects.push(MeshDefect::InterfaceNotConforming {
                        edge: i,
                        detail: format!("shared by {} triangles, expected 2", ts.len()),
                    });
                    continue;
                }
                None => {
                    defects.push(MeshDefect::InterfaceNotConforming {
                        edge: i,
                        detail: "edge not present in the triangulation".to_string(),
                    });
                    continue;
                }
            }

            // n_f must be unit length and point out of the fluid triangle.
            let n = e.normal_f;
            if (n.norm() - 1.0).abs() > 1e-12 {
                defects.push(MeshDefect::InterfaceNormalBad {
                    edge: i,
                    detail: format!("length {} is not 1", n.norm()),
                });
            } else if self.subdomain.get(e.fluid_tri) == Some(&Subdomain::Fluid) {
                let expected = self.outward_normal(e.fluid_tri, e.vertices);
                if let Some(expected) = expected {
                    if (expected - n).norm() > 1e-12 {
                        defects.push(MeshDefect::InterfaceNormalBad {
                            edge: i,
                            detail: format!(
                                "stored ({}, {}) but outward of fluid triangle is ({}, {})",
                                n.x, n.y, expected.x, expected.y
                            ),
                        });
                    }
                }
            }
        }

        for (i, e) in self.boundary_edges.iter().enumerate() {
            match adjacency.get(&key(e.vertices[0], e.vertices[1])) {
                Some(ts) if ts.len() == 1 => {
                    if ts[0] != e.triangle {
                        defects.push(MeshDefect::BoundaryEdgeBad {
                            edge: i,
                            detail: format!(
                                "stored triangle {} but adjacency gives {}",
                                e.triangle, ts[0]
                            ),
                        });
                    }
                }
                Some(ts) => defects.push(MeshDefect::BoundaryEdgeBad {
                    edge: i,
                    detail: format!("belongs to {} triangles, expected 1", ts.len()),
                }),
                None => defects.push(MeshDefect::BoundaryEdgeBad {
                    edge: i,
                    detail: "edge not present in the triangulation".to_string(),
                }),
            }
        }

        defects
    }

    /// Builds a mesh from raw connectivity: orientation is normalized to
    /// counter-clockwise, boundary and interface edges are derived by
    /// adjacency (boundary labels looked up in `edge_labels`, defaulting to
    /// `outer_fluid` / `outer_porous`), and hanging nodes are rejected.
    pub fn from_parts(
        vertices: Vec<Vec2>,
        mut triangles: Vec<[usize; 3]>,
        subdomain: Vec<Subdomain>,
        edge_labels: std::collections::HashMap<(usize, usize), String>,
    ) -> Result<Mesh, MeshError> {
        for tri in triangles.iter_mut() {
            let a = vertices[tri[0]];
            let b = vertices[tri[1]];
            let c = vertices[tri[2]];
            if cross2(a, b, c) < 0.0 {
                tri.swap(1, 2);
            }
        }

        let mut adjacency: std::collections::HashMap<(usize, usize), Vec<usize>> =
            std::collections::HashMap::new();
        for (t, tri) in triangles.iter().enumerate() {
            for i in 0..3 {
                adjacency
                    .entry(key(tri[i], tri[(i + 1) % 3]))
                    .or_default()
                    .push(t);
            }
        }

        let mut mesh = Mesh {
            vertices,
            triangles,
            subdomain,
            boundary_edges: Vec::new(),
            interface_edges: Vec::new(),
        };

        for (&(a, b), tris) in adjacency.iter() {
            match tris.len() {
                1 => {
                    let t = tris[0];
                    let label = edge_labels.get(&(a, b)).cloned().unwrap_or_else(|| {
                        match mesh.subdomain[t] {
                            Subdomain::Fluid => "outer_fluid".to_string(),
                            Subdomain::Porous => "outer_porous".to_string(),
                        }
                    });
                    mesh.boundary_edges.push(BoundaryEdge {
                        vertices: [a, b],
                        label,
                        triangle: t,
                    });
                }
                2 => {
                    let (s0, s1) = (mesh.subdomain[tris[0]], mesh.subdomain[tris[1]]);
                    if s0 != s1 {
                        let (fluid_tri, porous_tri) = if s0 == Subdomain::Fluid {
                            (tris[0], tris[1])
                        } else {
                            (tris[1], tris[0])
                        };
                        let normal_f = mesh
                            .outward_normal(fluid_tri, [a, b])
                            .expect("edge belongs to its adjacent triangle");
                        mesh.interface_edges.push(InterfaceEdge {
                            vertices: [a, b],
                            normal_f,
                            fluid_tri,
                            porous_tri,
                        });
                    }
                }
                n => {
                    return Err(MeshError::Parse {
                        line: 0,
                        message: format!("edge ({a}, {b}) is shared by {n} triangles"),
                    })
                }
            }
        }
        // Deterministic ordering regardless of hash-map iteration.
        mesh.boundary_edges
            .sort_by_key(|e| (e.vertices[0], e.vertices[1]));
        mesh.interface_edges
            .sort_by_key(|e| (e.vertices[0], e.vertices[1]));

        mesh.check_conforming()?;
        Ok(mesh)
    }

    /// A hanging node shows up as a mesh vertex strictly inside a facet that
    /// has only one adjacent triangle. Boundary facets are few, so the
    /// quadratic scan is fine.
    fn check_conforming(&self) -> Result<(), MeshError> {
        for e in &self.boundary_edges {
            let a = self.vertices[e.vertices[0]];
            let b = self.vertices[e.vertices[1]];
            let d = b - a;
            let len2 = d.dot(d);
            for (v, &p) in self.vertices.iter().enumerate() {
                if v == e.vertices[0] || v == e.vertices[1] {
                    continue;
                }
                let s = (p - a).dot(d) / len2;
                if s <= 1e-9 || s >= 1.0 - 1e-9 {
                    continue;
                }
                let foot = a + d * s;
                if (p - foot).norm() < 1e-9 * len2.sqrt() {
                    return Err(MeshError::Parse {
                        line: 0,
                        message: format!(
                            "non-conforming mesh: vertex {v} hangs on facet ({}, {})",
                            e.vertices[0], e.vertices[1]
                        ),
                    });
                }
            }
        }
        Ok(())
    }

    /// Outward unit normal of triangle `t` across the edge `(a, b)`, or `None`
    /// if the edge is not part of the triangle.
    pub fn outward_normal(&self, t: usize, edge: [usize; 2]) -> Option<Vec2> {
        let tri = self.triangles[t];
        for i in 0..3 {
            let a = tri[i];
            let b = tri[(i + 1) % 3];
            if key(a, b) == key(edge[0], edge[1]) {
                // In a CCW triangle the outward normal of the directed edge
                // a -> b is its clockwise rotation.
                let d = self.vertices[b] - self.vertices[a];
                return Some(Vec2::new(d.y, -d.x).normalized());
            }
        }
        None
    }
}

pub(crate) fn key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Piecewise-constant hydraulic conductivity, one value per triangle.
#[derive(Clone, Debug)]
pub struct RegionMap {
    k: Vec<f64>,
}

impl RegionMap {
    /// A single global conductivity.
    pub fn uniform(mesh: &Mesh, k: f64) -> Result<Self, MeshError> {
        Self::with_blocks(mesh, k, &[])
    }

    /// Base conductivity overridden inside axis-aligned blocks (assigned by
    /// triangle centroid). Only porous triangles carry meaningful values.
    pub fn with_blocks(mesh: &Mesh, base: f64, blocks: &[(Rect, f64)]) -> Result<Self, MeshError> {
        let k: Vec<f64> = (0..mesh.n_triangles())
            .map(|t| {
                let c = mesh.centroid(t);
                blocks
                    .iter()
                    .find(|(r, _)| r.contains(c))
                    .map(|&(_, kv)| kv)
                    .unwrap_or(base)
            })
            .collect();
        for (t, &kv) in k.iter().enumerate() {
            if mesh.subdomain[t] == Subdomain::Porous && !(kv > 0.0) {
                return Err(MeshError::Argument(format!(
                    "hydraulic conductivity {kv} on porous triangle {t} must be positive"
                )));
            }
        }
        Ok(RegionMap { k })
    }

    pub fn k(&self, triangle: usize) -> f64 {
        self.k[triangle]
    }

    pub fn len(&self) -> usize {
        self.k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k.is_empty()
    }
}
