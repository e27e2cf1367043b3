//! Experiment definitions: geometry, coefficients, boundary data, forcing and
//! (for convergence studies) the exact solution.

mod convergence;
mod manufactured;
mod presets;
mod reference;
mod velocity;

pub use convergence::{
    convergence_study, ConvergenceError, ConvergenceRow, ConvergenceTable, Coupling,
};
pub use manufactured::{manufactured, manufactured_default};
pub use presets::{cavity, decay, filtration, yshape};
pub use reference::{reference_implicit_solve, ImplicitRun, ReferenceError};
pub use velocity::{global_velocity, sample_global_velocity, GlobalVelocity, InterfaceSample};

use crate::fem::params::PhysicalParams;
use crate::geometry::{Rect, Vec2};
use crate::mesh::{build_rect_coupled, import_msh, Mesh, MeshError, RegionMap};
use std::path::PathBuf;
use std::sync::Arc;
use thiserror::Error;

pub type ScalarFn = Arc<dyn Fn(Vec2, f64) -> f64 + Send + Sync>;
pub type VectorFn = Arc<dyn Fn(Vec2, f64) -> Vec2 + Send + Sync>;
pub type MatrixFn = Arc<dyn Fn(Vec2, f64) -> [[f64; 2]; 2] + Send + Sync>;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("boundary segment {label:?} ({field}) has no boundary condition")]
    MissingBoundaryCondition { label: String, field: &'static str },
    #[error("boundary condition for {label:?} matches no mesh segment")]
    UnknownSegment { label: String },
    #[error("cannot read mesh file {path}: {source}")]
    MeshFile {
        path: String,
        source: std::io::Error,
    },
    #[error("{0}")]
    Invalid(String),
}

/// Geometry specification: a built-in rectangle pair (meshed at a requested
/// resolution) or an imported mesh file.
#[derive(Clone, Debug)]
pub enum Geometry {
    RectPair { fluid: Rect, porous: Rect },
    MshFile(PathBuf),
}

/// Dirichlet data or a natural zero-flux condition for the hydraulic head.
#[derive(Clone)]
pub enum HeadBc {
    Dirichlet(ScalarFn),
    ZeroFlux,
}

/// Exact solution with the derivative access the error study needs.
#[derive(Clone)]
pub struct ExactSolution {
    pub u: VectorFn,
    pub u_t: VectorFn,
    /// `[[∂u₁/∂x, ∂u₁/∂y], [∂u₂/∂x, ∂u₂/∂y]]`.
    pub grad_u: MatrixFn,
    pub p: ScalarFn,
    pub phi: ScalarFn,
    pub phi_t: ScalarFn,
    pub grad_phi: VectorFn,
}

/// A complete experiment definition.
#[derive(Clone)]
pub struct Scenario {
    pub name: String,
    pub geometry: Geometry,
    pub nu: f64,
    pub g: f64,
    pub s0: f64,
    pub alpha: f64,
    pub k_base: f64,
    /// Conductivity overrides inside axis-aligned blocks.
    pub low_k: Vec<(Rect, f64)>,
    /// Dirichlet velocity per fluid boundary label; every fluid outer segment
    /// must appear. At shared corner nodes, later entries win.
    pub velocity_bc: Vec<(String, VectorFn)>,
    /// Head condition per porous boundary label; every porous outer segment
    /// must appear.
    pub head_bc: Vec<(String, HeadBc)>,
    pub f1: VectorFn,
    pub f2: ScalarFn,
    pub u0: VectorFn,
    pub phi0: ScalarFn,
    pub exact: Option<ExactSolution>,
    /// Adds `∫_Γ [η (u_ex·τ) + ν τ·(∂u_ex/∂n_f)] (v·τ) ds` to the momentum
    /// right-hand side; needed whenever the exact solution violates the BJS
    /// condition on Γ (the manufactured solution does).
    pub bjs_compensation: bool,
    /// Canonical final time of the experiment; run setup may override it.
    pub default_final_time: f64,
    pub default_dt: f64,
    pub default_h: f64,
}

pub(crate) fn zero_scalar() -> ScalarFn {
    Arc::new(|_, _| 0.0)
}

pub(crate) fn zero_vector() -> VectorFn {
    Arc::new(|_, _| Vec2::ZERO)
}

impl Scenario {
    /// Builds the mesh at resolution `h` (cell size; ignored for imported
    /// meshes). Rectangle cell counts are rounded to the nearest integer per
    /// direction.
    pub fn build_mesh(&self, h: f64) -> Result<Mesh, ScenarioError> {
        match &self.geometry {
            Geometry::RectPair { fluid, porous } => {
                let nx = (fluid.width() / h).round().max(1.0) as usize;
                let ny_f = (fluid.height() / h).round().max(1.0) as usize;
                let ny_p = (porous.height() / h).round().max(1.0) as usize;
                Ok(build_rect_coupled(*fluid, *porous, nx, ny_f, ny_p)?)
            }
            Geometry::MshFile(path) => {
                let text =
                    std::fs::read_to_string(path).map_err(|source| ScenarioError::MeshFile {
                        path: path.display().to_string(),
                        source,
                    })?;
                Ok(import_msh(&text)?)
            }
        }
    }

    pub fn physical_params(&self, mesh: &Mesh) -> Result<PhysicalParams, ScenarioError> {
        let k = RegionMap::with_blocks(mesh, self.k_base, &self.low_k)?;
        PhysicalParams::new(self.nu, self.g, self.s0, self.alpha, k)
            .map_err(|e| ScenarioError::Invalid(e.to_string()))
    }

    /// Checks that every tagged boundary segment has exactly one condition.
    pub fn validate_bcs(&self, mesh: &Mesh) -> Result<(), ScenarioError> {
        use crate::mesh::Subdomain;
        let mut labels_fluid: Vec<&str> = Vec::new();
        let mut labels_porous: Vec<&str> = Vec::new();
        for e in &mesh.boundary_edges {
            let bucket = match mesh.subdomain[e.triangle] {
                Subdomain::Fluid => &mut labels_fluid,
                Subdomain::Porous => &mut labels_porous,
            };
            if !bucket.contains(&e.label.as_str()) {
                bucket.push(&e.label);
            }
        }
        for label in &labels_fluid {
            if !self.velocity_bc.iter().any(|(l, _)| l == label) {
                return Err(ScenarioError::MissingBoundaryCondition {
                    label: label.to_string(),
                    field: "velocity",
                });
            }
        }
        for label in &labels_porous {
            if !self.head_bc.iter().any(|(l, _)| l == label) {
                return Err(ScenarioError::MissingBoundaryCondition {
                    label: label.to_string(),
                    field: "head",
                });
            }
        }
        for (label, _) in &self.velocity_bc {
            if !labels_fluid.contains(&label.as_str()) {
                return Err(ScenarioError::UnknownSegment {
                    label: label.clone(),
                });
            }
        }
        for (label, _) in &self.head_bc {
            if !labels_porous.contains(&label.as_str()) {
                return Err(ScenarioError::UnknownSegment {
                    label: label.clone(),
                });
            }
        }
        if self.exact.is_none() && self.bjs_compensation {
            return Err(ScenarioError::Invalid(
                "BJS compensation requires an exact solution".into(),
            ));
        }
        Ok(())
    }

    /// The BJS compensation integrand `η (u_ex·τ) + ν τ·(∂u_ex/∂n_f)` at time
    /// `t` (`η` supplied per interface edge by the assembler), or `None` when
    /// compensation is off.
    pub fn compensation_integrand(
        &self,
        params: &PhysicalParams,
        t: f64,
    ) -> Option<impl Fn(Vec2, Vec2, Vec2, f64) -> f64> {
        if !self.bjs_compensation {
            return None;
        }
        let exact = self.exact.as_ref()?;
        let u = exact.u.clone();
        let grad_u = exact.grad_u.clone();
        let nu = params.nu;
        Some(move |x: Vec2, n_f: Vec2, tau: Vec2, eta: f64| {
            let uv = u(x, t);
            let g = grad_u(x, t);
            // ∂u/∂n_f = (∇u)·n_f, then its tangential component.
            let dudn = Vec2::new(
                g[0][0] * n_f.x + g[0][1] * n_f.y,
                g[1][0] * n_f.x + g[1][1] * n_f.y,
            );
            eta * uv.dot(tau) + nu * tau.dot(dudn)
        })
    }
}
