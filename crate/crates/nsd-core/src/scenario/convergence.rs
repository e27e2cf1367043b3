//! Convergence tables for the manufactured problem.
//!
//! Errors are measured in the three reported norms: velocity in discrete
//! l²(H¹), pressure in l∞(L²), head in l²(H¹), with the time sums taken over
//! n = 1..N (the initial error is zero for the t⁴ solution). Rates between
//! consecutive rows are `log(e_prev/e_cur) / log(Δt_prev/Δt_cur)`.

use super::{Scenario, ScenarioError};
use crate::fem::{scalar_error_norm, time_l2, time_linf, vector_error_norm, NormKind};
use crate::geometry::Vec2;
use crate::mesh::Subdomain;
use crate::stepper::{Scheme, State, Stepper, StepperError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConvergenceError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Stepper(#[from] StepperError),
    #[error("scenario {0:?} has no exact solution")]
    NoExactSolution(String),
    #[error("dt list must be decreasing and positive")]
    BadDtList,
}

/// Space-time coupling of a study level.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coupling {
    /// `h² = Δt`: first-order scheme, so spatial O(h²) matches temporal O(Δt).
    H2EqDt,
    /// `h = Δt`: second-order scheme.
    HEqDt,
}

impl Coupling {
    pub fn h_for(self, dt: f64) -> f64 {
        match self {
            Coupling::H2EqDt => dt.sqrt(),
            Coupling::HEqDt => dt,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ConvergenceRow {
    pub dt: f64,
    pub h: f64,
    pub err_u: f64,
    pub err_p: f64,
    pub err_phi: f64,
}

#[derive(Clone, Debug, Default)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    /// Rates w.r.t. Δt per column: `[u, p, φ]`, `None` for the first row and
    /// wherever an error vanishes (c = 0 runs).
    pub fn rates(&self) -> Vec<[Option<f64>; 3]> {
        let mut out = vec![[None; 3]; self.rows.len()];
        for i in 1..self.rows.len() {
            let prev = &self.rows[i - 1];
            let cur = &self.rows[i];
            let ratio = (prev.dt / cur.dt).ln();
            let rate = |a: f64, b: f64| {
                if a > 0.0 && b > 0.0 {
                    Some((a / b).ln() / ratio)
                } else {
                    None
                }
            };
            out[i] = [
                rate(prev.err_u, cur.err_u),
                rate(prev.err_p, cur.err_p),
                rate(prev.err_phi, cur.err_phi),
            ];
        }
        out
    }
}

/// Error history of one run against the scenario's exact solution.
pub(crate) struct ErrorSamples {
    pub u_h1: Vec<f64>,
    pub p_l2: Vec<f64>,
    pub phi_h1: Vec<f64>,
}

pub(crate) fn measure_errors(
    stepper: &Stepper,
    states: &[State],
) -> Result<ErrorSamples, ConvergenceError> {
    let exact = stepper
        .scenario
        .exact
        .as_ref()
        .ok_or_else(|| ConvergenceError::NoExactSolution(stepper.scenario.name.clone()))?;
    let mut out = ErrorSamples {
        u_h1: Vec::new(),
        p_l2: Vec::new(),
        phi_h1: Vec::new(),
    };
    for state in states.iter().skip(1) {
        let t = state.t;
        let eu = exact.u.clone();
        let egu = exact.grad_u.clone();
        out.u_h1.push(
            vector_error_norm(
                NormKind::H1,
                &state.u.values,
                &stepper.spaces.velocity,
                &stepper.mesh,
                &stepper.spaces,
                &|x| eu(x, t),
                &|x| egu(x, t),
            )
            .expect("velocity space matches"),
        );
        let ep = exact.p.clone();
        out.p_l2.push(
            scalar_error_norm(
                NormKind::L2,
                &state.p.values,
                &stepper.spaces.pressure,
                &stepper.mesh,
                &stepper.spaces,
                Subdomain::Fluid,
                &|x| ep(x, t),
                &|_| Vec2::ZERO,
            )
            .expect("pressure space matches"),
        );
        let ephi = exact.phi.clone();
        let egphi = exact.grad_phi.clone();
        out.phi_h1.push(
            scalar_error_norm(
                NormKind::H1,
                &state.phi.values,
                &stepper.spaces.head,
                &stepper.mesh,
                &stepper.spaces,
                Subdomain::Porous,
                &|x| ephi(x, t),
                &|x| egphi(x, t),
            )
            .expect("head space matches"),
        );
    }
    Ok(out)
}

/// Runs the manufactured study over a decreasing Δt list with the given
/// coupling; every step of every level is kept for the time-composite norms.
pub fn convergence_study(
    scenario: &Scenario,
    scheme: Scheme,
    coupling: Coupling,
    dt_list: &[f64],
    t_final: f64,
) -> Result<ConvergenceTable, ConvergenceError> {
    if dt_list.is_empty() || dt_list.windows(2).any(|w| w[1] >= w[0]) || dt_list[0] <= 0.0 {
        return Err(ConvergenceError::BadDtList);
    }
    if scenario.exact.is_none() {
        return Err(ConvergenceError::NoExactSolution(scenario.name.clone()));
    }
    let mut table = ConvergenceTable::default();
    for &dt in dt_list {
        let h = coupling.h_for(dt);
        let n_steps = (t_final / dt).round() as usize;
        let mesh = scenario.build_mesh(h)?;
        let stepper = Stepper::new(scenario.clone(), mesh, dt, n_steps, scheme)?;
        let run = stepper.run(1)?;
        let errors = measure_errors(&stepper, &run.snapshots)?;
        table.rows.push(ConvergenceRow {
            dt,
            h,
            err_u: time_l2(dt, &errors.u_h1),
            err_p: time_linf(&errors.p_l2),
            err_phi: time_l2(dt, &errors.phi_h1),
        });
    }
    Ok(table)
}
