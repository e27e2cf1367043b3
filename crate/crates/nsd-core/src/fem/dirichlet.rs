//! Dirichlet constraints by symmetric elimination with lifting.
//!
//! Constrained rows and columns are replaced by the identity; at solve time
//! the right-hand side receives the lifting contribution `-A·g_D` on free
//! rows and the boundary values on constrained rows, so the solution
//! reproduces the boundary data exactly and operators stay symmetric
//! positive definite where they were.

use super::dofmap::{DofMap, Topology};
use super::sparse::{CooBuilder, SparseOperator};
use crate::geometry::Vec2;
use crate::mesh::Mesh;

/// One constrained dof: where it lives and which boundary segment drives it.
#[derive(Clone, Debug)]
pub struct BoundaryConstraint {
    /// Dof index within the field's own numbering.
    pub dof: usize,
    pub position: Vec2,
    pub component: usize,
    /// Index into the scenario's segment list for this field.
    pub segment: usize,
}

/// Collects the constrained dofs of a field on the labeled boundary segments.
///
/// All nodes of each P2 (or P1) facet on a listed segment are constrained.
/// When a node is shared by two labeled segments (corners), the segment
/// listed later wins, so scenario order resolves corner conflicts.
pub fn collect_constraints(
    mesh: &Mesh,
    topo: &Topology,
    map: &DofMap,
    labels: &[&str],
) -> Vec<BoundaryConstraint> {
    let ncomp = map.kind.components();
    // node -> segment, later segments overriding earlier ones.
    let mut node_segment: std::collections::HashMap<usize, usize> =
        std::collections::HashMap::new();
    for (seg, label) in labels.iter().enumerate() {
        for edge in mesh.boundary_edges.iter().filter(|e| &e.label == label) {
            let [a, b] = edge.vertices;
            let mut nodes: Vec<usize> = Vec::with_capacity(3);
            if let (Some(na), Some(nb)) = (map.vertex_node(a), map.vertex_node(b)) {
                nodes.push(na);
                nodes.push(nb);
            } else {
                continue; // segment belongs to the other subdomain
            }
            if let Some(e) = topo.edge_index(a, b) {
                if let Some(nm) = map.edge_node(e) {
                    nodes.push(nm);
                }
            }
            for n in nodes {
                node_segment.insert(n, seg);
            }
        }
    }
    let mut nodes: Vec<(usize, usize)> = node_segment.into_iter().collect();
    nodes.sort_unstable();
    let mut out = Vec::with_capacity(nodes.len() * ncomp);
    for (node, segment) in nodes {
        for component in 0..ncomp {
            out.push(BoundaryConstraint {
                dof: node * ncomp + component,
                position: map.node_position[node],
                component,
                segment,
            });
        }
    }
    out
}

/// Returns a copy of `matrix` with the given (block-global) dofs eliminated:
/// their rows and columns zeroed and a unit diagonal inserted.
pub fn eliminate(matrix: &SparseOperator, dofs: &[usize]) -> SparseOperator {
    let mut constrained = vec![false; matrix.nrows];
    for &d in dofs {
        constrained[d] = true;
    }
    let mut b = CooBuilder::new(matrix.nrows, matrix.ncols);
    for row in 0..matrix.nrows {
        if constrained[row] {
            b.add(row, row, 1.0);
            continue;
        }
        for idx in matrix.row_ptr[row]..matrix.row_ptr[row + 1] {
            let col = matrix.col_idx[idx];
            if !constrained[col] {
                b.add(row, col, matrix.values[idx]);
            }
        }
    }
    b.build()
}

/// Applies the lifting `rhs ← rhs − A·g_D` on free rows and pins `rhs = g_D`
/// on constrained rows; `full` is the unconstrained operator.
pub fn lift_rhs(full: &SparseOperator, rhs: &mut [f64], dofs: &[usize], values: &[f64]) {
    debug_assert_eq!(dofs.len(), values.len());
    let mut bc = vec![0.0; full.ncols];
    let mut constrained = vec![false; full.nrows];
    for (&d, &v) in dofs.iter().zip(values) {
        bc[d] = v;
        constrained[d] = true;
    }
    let lift = full.matvec(&bc).expect("dimensions fixed at assembly");
    for row in 0..full.nrows {
        if !constrained[row] {
            rhs[row] -= lift[row];
        }
    }
    for (&d, &v) in dofs.iter().zip(values) {
        rhs[d] = v;
    }
}
