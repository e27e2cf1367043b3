//! JSON run report: parameters and per-step diagnostics, enough to re-derive
//! every headline number without re-running.

use crate::config::RunConfig;
use nsdarcy::stepper::{RunResult, Stepper};
use serde::Serialize;
use std::io::{self, Write};

#[derive(Serialize)]
pub struct StepRecord {
    pub n: usize,
    pub t: f64,
    /// Closure scalar S = r / exp(-t/T).
    pub s: f64,
    pub r: f64,
    pub closure_a: f64,
    pub closure_b: f64,
    pub fluid_residual: f64,
    pub porous_residual: f64,
    pub energy_lhs: f64,
    pub energy_rhs: f64,
    pub energy_residual: f64,
    /// Eⁿ = ‖uⁿ‖² + gS₀‖φⁿ‖² + |rⁿ|² after this step.
    pub energy: f64,
}

#[derive(Serialize)]
pub struct RunReport {
    pub scenario: String,
    pub scheme: String,
    pub dt: f64,
    pub n_steps: usize,
    pub final_time: f64,
    pub resolution: f64,
    pub nu: f64,
    pub g: f64,
    pub s0: f64,
    pub alpha: f64,
    pub k: f64,
    pub bjs_compensation: bool,
    pub factorizations: usize,
    pub vertices: usize,
    pub triangles: usize,
    pub velocity_dofs: usize,
    pub pressure_dofs: usize,
    pub head_dofs: usize,
    pub steps: Vec<StepRecord>,
    pub initial_energy: f64,
    pub stability_lhs: f64,
    pub stability_initial_bound: f64,
    pub max_energy_residual: f64,
}

impl RunReport {
    pub fn build(config: &RunConfig, stepper: &Stepper, result: &RunResult) -> Self {
        let steps = result
            .reports
            .iter()
            .enumerate()
            .map(|(i, rep)| StepRecord {
                n: i + 1,
                t: (i + 1) as f64 * stepper.dt,
                s: rep.s,
                r: rep.s * (-((i + 1) as f64 * stepper.dt) / stepper.t_final).exp(),
                closure_a: rep.closure_a,
                closure_b: rep.closure_b,
                fluid_residual: rep.fluid_residual,
                porous_residual: rep.porous_residual,
                energy_lhs: rep.energy.lhs,
                energy_rhs: rep.energy.rhs,
                energy_residual: rep.energy.residual,
                energy: result.stability.energy_history[i + 1],
            })
            .collect();
        RunReport {
            scenario: stepper.scenario.name.clone(),
            scheme: config.scheme.as_str().to_string(),
            dt: stepper.dt,
            n_steps: stepper.n_steps,
            final_time: stepper.t_final,
            resolution: config.resolution,
            nu: stepper.params.nu,
            g: stepper.params.g,
            s0: stepper.params.s0,
            alpha: stepper.params.alpha,
            k: stepper.scenario.k_base,
            bjs_compensation: stepper.scenario.bjs_compensation,
            factorizations: stepper.factorization_count,
            vertices: stepper.mesh.n_vertices(),
            triangles: stepper.mesh.n_triangles(),
            velocity_dofs: stepper.spaces.velocity.n_dofs,
            pressure_dofs: stepper.spaces.pressure.n_dofs,
            head_dofs: stepper.spaces.head.n_dofs,
            steps,
            initial_energy: result.stability.energy_history[0],
            stability_lhs: result
                .stability
                .stability_lhs(stepper, result.final_state()),
            stability_initial_bound: result.stability.initial_bound,
            max_energy_residual: result.stability.max_energy_residual,
        }
    }

    pub fn write(&self, path: &std::path::Path) -> io::Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(
            serde_json::to_string_pretty(self)
                .expect("serializable")
                .as_bytes(),
        )
    }
}
