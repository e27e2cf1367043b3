//! Reference elements, quadrature, dof management and sparse assembly.

pub mod assemble;
pub mod dirichlet;
pub mod dofmap;
pub mod norms;
pub mod params;
pub mod reference;
pub mod sparse;

pub use assemble::{
    apply_trilinear, assemble_form, assemble_interface_tangential_load, assemble_load_head,
    assemble_load_velocity, boundary_flux, convection_matrix, interface_flux, FemError, FormId,
};
pub use dirichlet::{collect_constraints, eliminate, lift_rhs, BoundaryConstraint};
pub use dofmap::{DofMap, FieldKind, FieldVector, Spaces, Topology};
pub use norms::{
    exact_scalar_norm, scalar_error_norm, scalar_field_norm, time_l2, time_linf, vector_error_norm,
    vector_field_norm, NormError, NormKind,
};
pub use params::{ParamError, PhysicalParams};
pub use sparse::{axpy, dot, norm2, rhs_history, CooBuilder, SparseError, SparseOperator};
