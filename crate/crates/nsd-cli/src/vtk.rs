//! Legacy ASCII VTK writer (`DATASET UNSTRUCTURED_GRID`, VTK_TRIANGLE cells).
//!
//! P2 fields are down-sampled to vertex values (midside values discarded);
//! point data carries `VECTORS velocity` and `SCALARS pressure, head`, cell
//! data carries `SCALARS subdomain, k`.

use nsdarcy::fem::{PhysicalParams, Spaces};
use nsdarcy::geometry::Vec2;
use nsdarcy::mesh::{Mesh, Subdomain};
use nsdarcy::scenario::GlobalVelocity;
use nsdarcy::stepper::State;
use std::io::{self, Write};

/// Vertex-sampled output fields.
pub struct VtkFields {
    pub velocity: Vec<Vec2>,
    pub pressure: Vec<f64>,
    pub head: Vec<f64>,
}

impl VtkFields {
    /// Raw state fields: velocity/pressure on fluid vertices, head on porous
    /// vertices, zero elsewhere.
    pub fn from_state(state: &State, mesh: &Mesh, spaces: &Spaces) -> Self {
        let n = mesh.n_vertices();
        let mut velocity = vec![Vec2::ZERO; n];
        let mut pressure = vec![0.0; n];
        let mut head = vec![0.0; n];
        for v in 0..n {
            if let Some(node) = spaces.velocity.vertex_node(v) {
                velocity[v] = Vec2::new(state.u.values[2 * node], state.u.values[2 * node + 1]);
            }
            if let Some(node) = spaces.pressure.vertex_node(v) {
                pressure[v] = state.p.values[node];
            }
            if let Some(node) = spaces.head.vertex_node(v) {
                head[v] = state.phi.values[node];
            }
        }
        VtkFields {
            velocity,
            pressure,
            head,
        }
    }

    /// Like [`VtkFields::from_state`] but with the velocity replaced by the
    /// derived global velocity `U`.
    pub fn with_global_velocity(
        state: &State,
        mesh: &Mesh,
        spaces: &Spaces,
        gv: &GlobalVelocity,
    ) -> Self {
        let mut fields = Self::from_state(state, mesh, spaces);
        fields.velocity = gv.values.clone();
        fields
    }
}

pub fn vtk_string(mesh: &Mesh, params: &PhysicalParams, fields: &VtkFields, title: &str) -> String {
    let n = mesh.n_vertices();
    let m = mesh.n_triangles();
    assert_eq!(fields.velocity.len(), n);
    assert_eq!(fields.pressure.len(), n);
    assert_eq!(fields.head.len(), n);

    let mut out = String::new();
    out.push_str("# vtk DataFile Version 3.0\n");
    out.push_str(title);
    out.push('\n');
    out.push_str("ASCII\nDATASET UNSTRUCTURED_GRID\n");
    out.push_str(&format!("POINTS {n} double\n"));
    for v in &mesh.vertices {
        out.push_str(&format!("{} {} 0\n", v.x, v.y));
    }
    out.push_str(&format!("CELLS {m} {}\n", 4 * m));
    for t in &mesh.triangles {
        out.push_str(&format!("3 {} {} {}\n", t[0], t[1], t[2]));
    }
    out.push_str(&format!("CELL_TYPES {m}\n"));
    for _ in 0..m {
        out.push_str("5\n");
    }
    out.push_str(&format!("POINT_DATA {n}\n"));
    out.push_str("VECTORS velocity double\n");
    for v in &fields.velocity {
        out.push_str(&format!("{} {} 0\n", v.x, v.y));
    }
    out.push_str("SCALARS pressure double 1\nLOOKUP_TABLE default\n");
    for p in &fields.pressure {
        out.push_str(&format!("{p}\n"));
    }
    out.push_str("SCALARS head double 1\nLOOKUP_TABLE default\n");
    for h in &fields.head {
        out.push_str(&format!("{h}\n"));
    }
    out.push_str(&format!("CELL_DATA {m}\n"));
    out.push_str("SCALARS subdomain int 1\nLOOKUP_TABLE default\n");
    for t in 0..m {
        out.push_str(match mesh.subdomain[t] {
            Subdomain::Fluid => "0\n",
            Subdomain::Porous => "1\n",
        });
    }
    out.push_str("SCALARS k double 1\nLOOKUP_TABLE default\n");
    for t in 0..m {
        out.push_str(&format!("{}\n", params.k.k(t)));
    }
    out
}

pub fn write_vtk(
    path: &std::path::Path,
    mesh: &Mesh,
    params: &PhysicalParams,
    fields: &VtkFields,
    title: &str,
) -> io::Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(vtk_string(mesh, params, fields, title).as_bytes())
}
