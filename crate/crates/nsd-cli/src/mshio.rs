//! Gmsh MSH 2.2 ASCII export, the counterpart of the core reader.
//!
//! Physical surfaces: 1 = `fluid`, 2 = `porous`; boundary labels become
//! physical lines numbered from 101 in first-appearance order. Coordinates
//! use shortest round-trip formatting, so import(export(mesh)) reproduces
//! them exactly.

use nsdarcy::mesh::{Mesh, Subdomain};
use std::io::{self, Write};

pub fn msh_string(mesh: &Mesh) -> String {
    let mut out = String::new();
    out.push_str("$MeshFormat\n2.2 0 8\n$EndMeshFormat\n");

    let mut line_labels: Vec<&str> = Vec::new();
    for e in &mesh.boundary_edges {
        if !line_labels.contains(&e.label.as_str()) {
            line_labels.push(&e.label);
        }
    }
    out.push_str("$PhysicalNames\n");
    out.push_str(&format!("{}\n", 2 + line_labels.len()));
    out.push_str("2 1 \"fluid\"\n2 2 \"porous\"\n");
    for (i, label) in line_labels.iter().enumerate() {
        out.push_str(&format!("1 {} \"{label}\"\n", 101 + i));
    }
    out.push_str("$EndPhysicalNames\n");

    out.push_str("$Nodes\n");
    out.push_str(&format!("{}\n", mesh.n_vertices()));
    for (i, v) in mesh.vertices.iter().enumerate() {
        out.push_str(&format!("{} {} {} 0\n", i + 1, v.x, v.y));
    }
    out.push_str("$EndNodes\n");

    out.push_str("$Elements\n");
    out.push_str(&format!(
        "{}\n",
        mesh.boundary_edges.len() + mesh.n_triangles()
    ));
    let mut eid = 1usize;
    for e in &mesh.boundary_edges {
        let phys = 101
            + line_labels
                .iter()
                .position(|l| *l == e.label)
                .expect("label collected above");
        out.push_str(&format!(
            "{eid} 1 2 {phys} {phys} {} {}\n",
            e.vertices[0] + 1,
            e.vertices[1] + 1
        ));
        eid += 1;
    }
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let phys = match mesh.subdomain[t] {
            Subdomain::Fluid => 1,
            Subdomain::Porous => 2,
        };
        out.push_str(&format!(
            "{eid} 2 2 {phys} {phys} {} {} {}\n",
            tri[0] + 1,
            tri[1] + 1,
            tri[2] + 1
        ));
        eid += 1;
    }
    out.push_str("$EndElements\n");
    out
}

pub fn write_msh(path: &std::path::Path, mesh: &Mesh) -> io::Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(msh_string(mesh).as_bytes())
}
