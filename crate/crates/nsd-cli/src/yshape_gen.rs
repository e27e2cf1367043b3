//! Block-structured mesh of the Y-shape aquifer geometry.
//!
//! The unit square splits into a fluid Y-shape with vertices
//! A(0,0.25) B(0.4,0.3) C(0.3,0) D(0.5,0) E(0.6,0.35) F(1,0.5) G(1,0.75)
//! H(0,0.5) and a porous remainder. Five transfinite quad blocks cover it
//! (fluid: channel A-B-E-F / H-G plus leg C-D-E-B; porous: upper strip and
//! the two lower corners); shared block edges evaluate the same linear
//! interpolation formulas, so welding vertices by exact bits yields a
//! conforming mesh. The three openings are labeled `inlet_ha`, `inlet_cd`,
//! `outlet_fg`, the rest of the square boundary `porous_outer`. This tool
//! regenerates `assets/yshape.msh`; the solver itself only ever imports that
//! file.

use nsdarcy::geometry::Vec2;
use nsdarcy::mesh::{Mesh, MeshError, Subdomain};
use std::collections::HashMap;

const A: Vec2 = Vec2 { x: 0.0, y: 0.25 };
const B: Vec2 = Vec2 { x: 0.4, y: 0.3 };
const C: Vec2 = Vec2 { x: 0.3, y: 0.0 };
const D: Vec2 = Vec2 { x: 0.5, y: 0.0 };
const E: Vec2 = Vec2 { x: 0.6, y: 0.35 };
const F: Vec2 = Vec2 { x: 1.0, y: 0.5 };
const G: Vec2 = Vec2 { x: 1.0, y: 0.75 };
const H: Vec2 = Vec2 { x: 0.0, y: 0.5 };

fn lerp(a: Vec2, b: Vec2, s: f64) -> Vec2 {
    Vec2::new(a.x + (b.x - a.x) * s, a.y + (b.y - a.y) * s)
}

struct Welder {
    vertices: Vec<Vec2>,
    index: HashMap<(u64, u64), usize>,
}

impl Welder {
    fn new() -> Self {
        Welder {
            vertices: Vec::new(),
            index: HashMap::new(),
        }
    }

    fn insert(&mut self, p: Vec2) -> usize {
        let key = (p.x.to_bits(), p.y.to_bits());
        *self.index.entry(key).or_insert_with(|| {
            self.vertices.push(p);
            self.vertices.len() - 1
        })
    }
}

struct Builder {
    welder: Welder,
    triangles: Vec<[usize; 3]>,
    subdomain: Vec<Subdomain>,
}

impl Builder {
    /// Adds one structured quad block given its node coordinates as a
    /// function of integer grid position; cells split along the lower-left to
    /// upper-right diagonal.
    fn add_block(
        &mut self,
        ni: usize,
        nj: usize,
        sd: Subdomain,
        node: impl Fn(usize, usize) -> Vec2,
    ) {
        let mut ids = vec![0usize; (ni + 1) * (nj + 1)];
        for j in 0..=nj {
            for i in 0..=ni {
                ids[j * (ni + 1) + i] = self.welder.insert(node(i, j));
            }
        }
        let id = |i: usize, j: usize| ids[j * (ni + 1) + i];
        for j in 0..nj {
            for i in 0..ni {
                let (ll, lr, ur, ul) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
                self.triangles.push([ll, lr, ur]);
                self.subdomain.push(sd);
                self.triangles.push([ll, ur, ul]);
                self.subdomain.push(sd);
            }
        }
    }
}

/// Generates the Y-shape mesh. The default subdivision (16/8/16 columns,
/// 10-layer channel, 12-layer leg and porous blocks) gives 992 fluid and
/// 1728 porous triangles.
pub fn generate() -> Result<Mesh, MeshError> {
    let (n1, n2, n3) = (16usize, 8usize, 16usize);
    let m_ch = 10usize;
    let m_leg = 12usize;
    let m_up = 12usize;

    // Channel x-samples with their bottom polyline points (A-B-E-F).
    let mut bottom: Vec<Vec2> = Vec::new();
    for i in 0..=n1 {
        bottom.push(lerp(A, B, i as f64 / n1 as f64));
    }
    for i in 1..=n2 {
        bottom.push(lerp(B, E, i as f64 / n2 as f64));
    }
    for i in 1..=n3 {
        bottom.push(lerp(E, F, i as f64 / n3 as f64));
    }
    let top: Vec<Vec2> = bottom.iter().map(|p| lerp(H, G, p.x)).collect();

    let mut b = Builder {
        welder: Welder::new(),
        triangles: Vec::new(),
        subdomain: Vec::new(),
    };

    // Fluid channel between the bottom polyline and the H-G line.
    let (bt, tp) = (bottom.clone(), top.clone());
    b.add_block(bt.len() - 1, m_ch, Subdomain::Fluid, |i, j| {
        lerp(bt[i], tp[i], j as f64 / m_ch as f64)
    });
    // Fluid leg C-D-E-B.
    b.add_block(n2, m_leg, Subdomain::Fluid, |i, j| {
        let s = i as f64 / n2 as f64;
        lerp(lerp(C, D, s), lerp(B, E, s), j as f64 / m_leg as f64)
    });
    // Porous strip above the channel.
    let tp2 = top.clone();
    b.add_block(tp2.len() - 1, m_up, Subdomain::Porous, |i, j| {
        lerp(tp2[i], Vec2::new(tp2[i].x, 1.0), j as f64 / m_up as f64)
    });
    // Porous lower-left corner (0,0)-C-B-A.
    b.add_block(n1, m_leg, Subdomain::Porous, |i, j| {
        let s = i as f64 / n1 as f64;
        lerp(
            lerp(Vec2::ZERO, C, s),
            lerp(A, B, s),
            j as f64 / m_leg as f64,
        )
    });
    // Porous lower-right corner D-(1,0)-F-E.
    b.add_block(n3, m_leg, Subdomain::Porous, |i, j| {
        let s = i as f64 / n3 as f64;
        lerp(
            lerp(D, Vec2::new(1.0, 0.0), s),
            lerp(E, F, s),
            j as f64 / m_leg as f64,
        )
    });

    // Label boundary facets geometrically: the fluid boundary consists of
    // exactly the three openings.
    let vertices = b.welder.vertices;
    let mut adjacency: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (t, tri) in b.triangles.iter().enumerate() {
        for i in 0..3 {
            let (x, y) = (tri[i], tri[(i + 1) % 3]);
            let k = if x < y { (x, y) } else { (y, x) };
            adjacency.entry(k).or_default().push(t);
        }
    }
    let mut labels: HashMap<(usize, usize), String> = HashMap::new();
    for (&(va, vb), tris) in &adjacency {
        if tris.len() != 1 {
            continue;
        }
        let label = match b.subdomain[tris[0]] {
            Subdomain::Fluid => {
                let (pa, pb) = (vertices[va], vertices[vb]);
                if pa.x == 0.0 && pb.x == 0.0 {
                    "inlet_ha"
                } else if pa.y == 0.0 && pb.y == 0.0 {
                    "inlet_cd"
                } else if pa.x == 1.0 && pb.x == 1.0 {
                    "outlet_fg"
                } else {
                    unreachable!("fluid boundary facet away from the openings")
                }
            }
            Subdomain::Porous => "porous_outer",
        };
        labels.insert((va, vb), label.to_string());
    }

    Mesh::from_parts(vertices, b.triangles, b.subdomain, labels)
}
