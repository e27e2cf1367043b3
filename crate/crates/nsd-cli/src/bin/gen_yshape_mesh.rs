//! Regenerates the bundled Y-shape aquifer mesh (`assets/yshape.msh`).

use nsdarcy_cli::{mshio, yshape_gen};

fn main() {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "assets/yshape.msh".to_string());
    let mesh = yshape_gen::generate().expect("Y-shape generation is deterministic");
    let defects = mesh.validate();
    if !defects.is_empty() {
        for d in &defects {
            eprintln!("defect: {d}");
        }
        std::process::exit(1);
    }
    if let Some(parent) = std::path::Path::new(&path).parent() {
        std::fs::create_dir_all(parent).expect("create output directory");
    }
    mshio::write_msh(std::path::Path::new(&path), &mesh).expect("write mesh file");
    println!(
        "wrote {path}: {} vertices, {} triangles ({} interface edges)",
        mesh.n_vertices(),
        mesh.n_triangles(),
        mesh.interface_edges.len()
    );
}
