//! Structured triangulation of two stacked axis-aligned rectangles.

use super::{BoundaryEdge, InterfaceEdge, Mesh, MeshError, Subdomain};
use crate::geometry::{Rect, Vec2};

/// Builds a structured triangulation of a fluid box stacked on a porous box
/// sharing one full horizontal edge (the interface `Γ`).
///
/// Each grid cell is split into two triangles along the diagonal from its
/// lower-left to its upper-right corner, so results are reproducible across
/// runs. Vertex rows on `Γ` are shared by both subdomains. Boundary labels are
/// `fluid_left/right/top` and `porous_left/right/bottom` when the fluid box is
/// on top (and the mirrored set when it is below).
pub fn build_rect_coupled(
    fluid: Rect,
    porous: Rect,
    nx: usize,
    ny_f: usize,
    ny_p: usize,
) -> Result<Mesh, MeshError> {
    if nx == 0 || ny_f == 0 || ny_p == 0 {
        return Err(MeshError::Argument(format!(
            "cell counts must be at least 1, got nx={nx}, ny_f={ny_f}, ny_p={ny_p}"
        )));
    }
    if !(fluid.width() > 0.0
        && fluid.height() > 0.0
        && porous.width() > 0.0
        && porous.height() > 0.0)
    {
        return Err(MeshError::Geometry(
            "boxes must have positive extent".into(),
        ));
    }
    if fluid.x0 != porous.x0 || fluid.x1 != porous.x1 {
        return Err(MeshError::Geometry(format!(
            "boxes must share their x-extent: fluid [{}, {}], porous [{}, {}]",
            fluid.x0, fluid.x1, porous.x0, porous.x1
        )));
    }
    let fluid_on_top = if fluid.y0 == porous.y1 {
        true
    } else if fluid.y1 == porous.y0 {
        false
    } else {
        return Err(MeshError::Geometry(
            "boxes must share exactly one full horizontal edge".into(),
        ));
    };

    let (lower, upper, ny_lower, ny_upper) = if fluid_on_top {
        (porous, fluid, ny_p, ny_f)
    } else {
        (fluid, porous, ny_f, ny_p)
    };
    let ny = ny_lower + ny_upper;
    let y_interface = lower.y1;

    // Vertex grid, row-major from the bottom. The interface row is computed
    // once so both subdomains share bit-identical coordinates.
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        let y = if j < ny_lower {
            lower.y0 + (lower.y1 - lower.y0) * (j as f64 / ny_lower as f64)
        } else if j == ny_lower {
            y_interface
        } else {
            let jj = j - ny_lower;
            upper.y0 + (upper.y1 - upper.y0) * (jj as f64 / ny_upper as f64)
        };
        for i in 0..=nx {
            let x = lower.x0 + (lower.x1 - lower.x0) * (i as f64 / nx as f64);
            vertices.push(Vec2::new(x, y));
        }
    }
    let vid = |i: usize, j: usize| j * (nx + 1) + i;

    let mut triangles = Vec::with_capacity(2 * nx * ny);
    let mut subdomain = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        let lower_cell = j < ny_lower;
        let sd = match (lower_cell, fluid_on_top) {
            (true, true) | (false, false) => Subdomain::Porous,
            _ => Subdomain::Fluid,
        };
        for i in 0..nx {
            let ll = vid(i, j);
            let lr = vid(i + 1, j);
            let ul = vid(i, j + 1);
            let ur = vid(i + 1, j + 1);
            triangles.push([ll, lr, ur]);
            subdomain.push(sd);
            triangles.push([ll, ur, ul]);
            subdomain.push(sd);
        }
    }
    let cell_tris = |i: usize, j: usize| (2 * (j * nx + i), 2 * (j * nx + i) + 1);

    // Interface edges along the shared row. The lower cell's upper-left
    // triangle owns the edge from below; the upper cell's lower triangle from
    // above.
    let mut interface_edges = Vec::with_capacity(nx);
    for i in 0..nx {
        let below = cell_tris(i, ny_lower - 1).1; // [ll, ur, ul] touches the top edge
        let above = cell_tris(i, ny_lower).0; // [ll, lr, ur] touches the bottom edge
        let (fluid_tri, porous_tri) = if fluid_on_top {
            (above, below)
        } else {
            (below, above)
        };
        let normal_f = if fluid_on_top {
            Vec2::new(0.0, -1.0)
        } else {
            Vec2::new(0.0, 1.0)
        };
        interface_edges.push(InterfaceEdge {
            vertices: [vid(i, ny_lower), vid(i + 1, ny_lower)],
            normal_f,
            fluid_tri,
            porous_tri,
        });
    }

    let (lower_name, upper_name) = if fluid_on_top {
        ("porous", "fluid")
    } else {
        ("fluid", "porous")
    };
    let mut boundary_edges = Vec::new();
    // Bottom and top rows.
    for i in 0..nx {
        boundary_edges.push(BoundaryEdge {
            vertices: [vid(i, 0), vid(i + 1, 0)],
            label: format!("{lower_name}_bottom"),
            triangle: cell_tris(i, 0).0,
        });
        boundary_edges.push(BoundaryEdge {
            vertices: [vid(i, ny), vid(i + 1, ny)],
            label: format!("{upper_name}_top"),
            triangle: cell_tris(i, ny - 1).1,
        });
    }
    // Side columns, split at the interface row.
    for j in 0..ny {
        let side_name = if j < ny_lower { lower_name } else { upper_name };
        boundary_edges.push(BoundaryEdge {
            vertices: [vid(0, j), vid(0, j + 1)],
            label: format!("{side_name}_left"),
            triangle: cell_tris(0, j).1,
        });
        boundary_edges.push(BoundaryEdge {
            vertices: [vid(nx, j), vid(nx, j + 1)],
            label: format!("{side_name}_right"),
            triangle: cell_tris(nx - 1, j).0,
        });
    }

    Ok(Mesh {
        vertices,
        triangles,
        subdomain,
        boundary_edges,
        interface_edges,
    })
}
