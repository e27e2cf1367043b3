//! Gmsh MSH 2.2 ASCII reader.
//!
//! Supported sections: `$MeshFormat`, `$PhysicalNames`, `$Nodes`, `$Elements`;
//! element types 1 (2-node line) and 2 (3-node triangle). Physical surface
//! names `fluid` / `porous` (case-insensitive) tag the subdomains; physical
//! line names become boundary-segment labels. Interface edges are detected as
//! facets shared by a fluid and a porous triangle; line elements lying on the
//! interface are ignored. Untagged boundary facets get the labels
//! `outer_fluid` / `outer_porous`.

use super::{key, Mesh, MeshError, Subdomain};
use crate::geometry::Vec2;
use std::collections::HashMap;

struct Lines<'a> {
    iter: std::str::Lines<'a>,
    current: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Option<(usize, &'a str)> {
        self.iter.next().map(|l| {
            self.current += 1;
            (self.current, l.trim())
        })
    }

    fn expect(&mut self, what: &str) -> Result<(usize, &'a str), MeshError> {
        self.next().ok_or_else(|| MeshError::Parse {
            line: self.current + 1,
            message: format!("unexpected end of file, expected {what}"),
        })
    }
}

fn parse<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T, MeshError> {
    tok.parse().map_err(|_| MeshError::Parse {
        line,
        message: format!("cannot parse {what} from {tok:?}"),
    })
}

/// Parses MSH 2.2 ASCII text into a [`Mesh`].
pub fn import_msh(text: &str) -> Result<Mesh, MeshError> {
    let mut lines = Lines {
        iter: text.lines(),
        current: 0,
    };

    let mut physical: HashMap<(u32, i64), String> = HashMap::new(); // (dim, id) -> name
    let mut node_ids: HashMap<i64, usize> = HashMap::new();
    let mut vertices: Vec<Vec2> = Vec::new();
    let mut triangles: Vec<[usize; 3]> = Vec::new();
    let mut tri_subdomain: Vec<Subdomain> = Vec::new();
    let mut line_elements: Vec<([usize; 2], String)> = Vec::new();
    let mut saw_format = false;
    let mut saw_nodes = false;
    let mut saw_elements = false;

    while let Some((_, line)) = lines.next() {
        match line {
            "$MeshFormat" => {
                let (ln, header) = lines.expect("version header")?;
                let mut toks = header.split_whitespace();
                let version = toks.next().unwrap_or("");
                if version != "2.2" {
                    return Err(MeshError::Parse {
                        line: ln,
                        message: format!("unsupported MSH version {version:?}, expected 2.2"),
                    });
                }
                let file_type: u32 = parse(toks.next().unwrap_or(""), ln, "file type")?;
                if file_type != 0 {
                    return Err(MeshError::Parse {
                        line: ln,
                        message: "binary MSH files are not supported".into(),
                    });
                }
                skip_to_end(&mut lines, "$EndMeshFormat")?;
                saw_format = true;
            }
            "$PhysicalNames" => {
                let (ln, count) = lines.expect("physical name count")?;
                let count: usize = parse(count, ln, "physical name count")?;
                for _ in 0..count {
                    let (ln, entry) = lines.expect("physical name entry")?;
                    let mut toks = entry.splitn(3, char::is_whitespace);
                    let dim: u32 = parse(toks.next().unwrap_or(""), ln, "dimension")?;
                    let id: i64 = parse(toks.next().unwrap_or(""), ln, "physical id")?;
                    let name = toks
                        .next()
                        .unwrap_or("")
                        .trim()
                        .trim_matches('"')
                        .to_string();
                    physical.insert((dim, id), name);
                }
                skip_to_end(&mut lines, "$EndPhysicalNames")?;
            }
            "$Nodes" => {
                let (ln, count) = lines.expect("node count")?;
                let count: usize = parse(count, ln, "node count")?;
                for _ in 0..count {
                    let (ln, entry) = lines.expect("node entry")?;
                    let mut toks = entry.split_whitespace();
                    let id: i64 = parse(toks.next().unwrap_or(""), ln, "node id")?;
                    let x: f64 = parse(toks.next().unwrap_or(""), ln, "x coordinate")?;
                    let y: f64 = parse(toks.next().unwrap_or(""), ln, "y coordinate")?;
                    node_ids.insert(id, vertices.len());
                    vertices.push(Vec2::new(x, y));
                }
                skip_to_end(&mut lines, "$EndNodes")?;
                saw_nodes = true;
            }
            "$Elements" => {
                let (ln, count) = lines.expect("element count")?;
                let count: usize = parse(count, ln, "element count")?;
                for _ in 0..count {
                    let (ln, entry) = lines.expect("element entry")?;
                    let toks: Vec<&str> = entry.split_whitespace().collect();
                    if toks.len() < 3 {
                        return Err(MeshError::Parse {
                            line: ln,
                            message: "element entry too short".into(),
                        });
                    }
                    let etype: u32 = parse(toks[1], ln, "element type")?;
                    let ntags: usize = parse(toks[2], ln, "tag count")?;
                    let phys: Option<i64> = if ntags > 0 {
                        Some(parse(
                            toks.get(3).copied().unwrap_or(""),
                            ln,
                            "physical tag",
                        )?)
                    } else {
                        None
                    };
                    let nodes = &toks[3 + ntags..];
                    let resolve = |tok: &str| -> Result<usize, MeshError> {
                        let id: i64 = parse(tok, ln, "node reference")?;
                        node_ids.get(&id).copied().ok_or_else(|| MeshError::Parse {
                            line: ln,
                            message: format!("element references unknown node {id}"),
                        })
                    };
                    match etype {
                        1 => {
                            if nodes.len() != 2 {
                                return Err(MeshError::Parse {
                                    line: ln,
                                    message: format!("2-node line with {} nodes", nodes.len()),
                                });
                            }
                            let a = resolve(nodes[0])?;
                            let b = resolve(nodes[1])?;
                            let label = phys
                                .and_then(|p| physical.get(&(1, p)).cloned())
                                .unwrap_or_default();
                            line_elements.push(([a, b], label));
                        }
                        2 => {
                            if nodes.len() != 3 {
                                return Err(MeshError::Parse {
                                    line: ln,
                                    message: format!("3-node triangle with {} nodes", nodes.len()),
                                });
                            }
                            let a = resolve(nodes[0])?;
                            let b = resolve(nodes[1])?;
                            let c = resolve(nodes[2])?;
                            let name = phys
                                .and_then(|p| physical.get(&(2, p)).cloned())
                                .unwrap_or_default();
                            let sd = match name.to_ascii_lowercase().as_str() {
                                "fluid" => Subdomain::Fluid,
                                "porous" => Subdomain::Porous,
                                other => {
                                    return Err(MeshError::Parse {
                                        line: ln,
                                        message: format!(
                                            "triangle physical group {other:?} is neither \"fluid\" nor \"porous\""
                                        ),
                                    })
                                }
                            };
                            triangles.push([a, b, c]);
                            tri_subdomain.push(sd);
                        }
                        other => {
                            return Err(MeshError::Parse {
                                line: ln,
                                message: format!(
                                    "unsupported element type {other} (only 1 = line, 2 = triangle)"
                                ),
                            })
                        }
                    }
                }
                skip_to_end(&mut lines, "$EndElements")?;
                saw_elements = true;
            }
            _ => {} // unknown sections and blank lines are skipped
        }
    }

    if !saw_format {
        return Err(MeshError::Parse {
            line: 1,
            message: "missing $MeshFormat section".into(),
        });
    }
    if !saw_nodes || !saw_elements {
        return Err(MeshError::Parse {
            line: lines.current,
            message: "missing $Nodes or $Elements section".into(),
        });
    }

    assemble(vertices, triangles, tri_subdomain, line_elements)
}

fn skip_to_end(lines: &mut Lines, end: &str) -> Result<(), MeshError> {
    loop {
        let (_, l) = lines.expect(end)?;
        if l == end {
            return Ok(());
        }
    }
}

fn assemble(
    vertices: Vec<Vec2>,
    triangles: Vec<[usize; 3]>,
    tri_subdomain: Vec<Subdomain>,
    line_elements: Vec<([usize; 2], String)>,
) -> Result<Mesh, MeshError> {
    let labels: HashMap<(usize, usize), String> = line_elements
        .into_iter()
        .map(|(e, l)| (key(e[0], e[1]), l))
        .collect();
    Mesh::from_parts(vertices, triangles, tri_subdomain, labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_single_fluid_triangle() {
        let text = "\
$MeshFormat
2.2 0 8
$EndMeshFormat
$PhysicalNames
1
2 1 \"fluid\"
$EndPhysicalNames
$Nodes
3
1 0 0 0
2 1 0 0
3 0 1 0
$EndNodes
$Elements
1
1 2 2 1 1 1 2 3
$EndElements
";
        let m = import_msh(text).unwrap();
        assert_eq!(m.n_triangles(), 1);
        assert_eq!(m.subdomain[0], Subdomain::Fluid);
        assert!(m.interface_edges.is_empty());
        assert_eq!(m.boundary_edges.len(), 3);
        assert!(m.validate().is_empty());
    }

    #[test]
    fn rejects_msh_4() {
        let text = "$MeshFormat\n4.1 0 8\n$EndMeshFormat\n";
        match import_msh(text) {
            Err(MeshError::Parse { line, message }) => {
                assert_eq!(line, 2);
                assert!(message.contains("4.1"), "{message}");
            }
            other => panic!("expected version error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_dangling_node_reference() {
        let text = "\
$MeshFormat
2.2 0 8
$EndMeshFormat
$PhysicalNames
1
2 1 \"fluid\"
$EndPhysicalNames
$Nodes
3
1 0 0 0
2 1 0 0
3 0 1 0
$EndNodes
$Elements
1
1 2 2 1 1 1 2 9
$EndElements
";
        match import_msh(text) {
            Err(MeshError::Parse { message, .. }) => {
                assert!(message.contains("unknown node 9"), "{message}")
            }
            other => panic!("expected dangling-node error, got {other:?}"),
        }
    }

    #[test]
    fn detects_interface_between_fluid_and_porous() {
        // Two triangles of the unit square sharing the diagonal; fluid above,
        // porous below.
        let text = "\
$MeshFormat
2.2 0 8
$EndMeshFormat
$PhysicalNames
2
2 1 \"fluid\"
2 2 \"porous\"
$EndPhysicalNames
$Nodes
4
1 0 0 0
2 1 0 0
3 1 1 0
4 0 1 0
$EndNodes
$Elements
2
1 2 2 1 1 1 3 4
2 2 2 2 2 1 2 3
$EndElements
";
        let m = import_msh(text).unwrap();
        assert_eq!(m.interface_edges.len(), 1);
        let e = &m.interface_edges[0];
        assert_eq!(key(e.vertices[0], e.vertices[1]), (0, 2));
        assert_eq!(m.subdomain[e.fluid_tri], Subdomain::Fluid);
        assert_eq!(m.subdomain[e.porous_tri], Subdomain::Porous);
        // Outward of the fluid triangle (upper-left) across the diagonal is
        // down-right.
        let expect = Vec2::new(1.0, -1.0).normalized();
        assert!((e.normal_f - expect).norm() < 1e-14);
        assert!(m.validate().is_empty());
    }

    #[test]
    fn rejects_hanging_node() {
        // Left: one big triangle whose right edge spans (1,0)-(1,1).
        // Right: two triangles splitting that edge at (1,0.5).
        let text = "\
$MeshFormat
2.2 0 8
$EndMeshFormat
$PhysicalNames
2
2 1 \"fluid\"
2 2 \"porous\"
$EndPhysicalNames
$Nodes
5
1 0 0.5 0
2 1 0 0
3 1 1 0
4 1 0.5 0
5 2 0.5 0
$EndNodes
$Elements
3
1 2 2 1 1 1 2 3
2 2 2 2 2 2 5 4
3 2 2 2 2 4 5 3
$EndElements
";
        match import_msh(text) {
            Err(MeshError::Parse { message, .. }) => {
                assert!(message.contains("non-conforming"), "{message}")
            }
            other => panic!("expected non-conforming error, got {other:?}"),
        }
    }
}
