//! 2D finite elements for the unsteady coupled Navier-Stokes-Darcy system.
//!
//! Free flow in `Ω_f` (Navier-Stokes, Taylor-Hood P2-P1) is coupled across an
//! interface `Γ` to Darcy flow in `Ω_p` (hydraulic head, P2), with mass
//! conservation, the Lions normal-stress balance and the Beavers-Joseph-Saffman
//! slip condition on `Γ`. Time stepping uses scalar-auxiliary-variable IMEX
//! schemes (backward Euler and BDF2) in which every nonlinear convective and
//! interface-coupling term is explicit: each step solves constant-coefficient
//! linear systems that are factorized once, and the free-flow and porous-media
//! subsystems decouple.
//!
//! Module map:
//! - [`mesh`]: conforming two-subdomain triangulations (structured rectangles
//!   and Gmsh MSH 2.2 import), interface edges with oriented fluid normals.
//! - [`fem`]: reference elements, quadrature, dof maps, sparse assembly of the
//!   weak-form operators, the trilinear convection form, Dirichlet
//!   elimination, norms.
//! - [`linsolve`]: sparse LU with a factor-once / solve-many contract.
//! - [`stepper`]: the first- and second-order SAV schemes via bar/tilde
//!   superposition, plus per-step discrete energy diagnostics.
//! - [`scenario`]: the manufactured convergence problem, the Y-shape aquifer,
//!   filtration and cavity experiments, a monolithic implicit (Picard)
//!   reference solver, and convergence tables.

pub mod fem;
pub mod geometry;
pub mod linsolve;
pub mod mesh;
pub mod scenario;
pub mod stepper;

pub use geometry::{Rect, Vec2};
pub use mesh::{Mesh, RegionMap, Subdomain};
pub use stepper::{Scheme, State, Stepper};
