//! Monolithic implicit reference solver.
//!
//! Backward Euler with the trilinear and interface-coupling terms treated
//! implicitly: at each step the coupled (u, p, φ) system is solved with
//! Picard iteration on the convection field, refactorizing numerically on a
//! fixed sparsity pattern. No auxiliary variable is involved. This is the
//! comparator the cavity cross-validation runs against, kept deliberately
//! independent of the SAV stepper's superposition path.

use super::{HeadBc, Scenario, ScenarioError};
use crate::fem::{
    assemble_form, assemble_interface_tangential_load, assemble_load_head, assemble_load_velocity,
    collect_constraints, convection_matrix, dirichlet, norm2, rhs_history, CooBuilder, FieldKind,
    FieldVector, FormId, Spaces, SparseOperator,
};
use crate::linsolve::{factorize, Factorization, LinsolveError};
use crate::mesh::Mesh;
use crate::stepper::State;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReferenceError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Linsolve(#[from] LinsolveError),
    #[error(transparent)]
    Fem(#[from] crate::fem::FemError),
    #[error(
        "Picard iteration did not converge in {max} iterations at t = {t} (last relative change {change:e})"
    )]
    PicardDiverged { max: usize, t: f64, change: f64 },
}

/// Trajectory of the implicit reference; `states[0]` is the initial level.
/// The auxiliary variable slot of each state is filled with its continuous
/// value `exp(-t/T)` for interoperability.
pub struct ImplicitRun {
    pub states: Vec<State>,
    /// Picard iterations taken per step.
    pub iterations: Vec<usize>,
}

pub fn reference_implicit_solve(
    scenario: &Scenario,
    mesh: &Mesh,
    dt: f64,
    n_steps: usize,
    picard_tol: f64,
    picard_max: usize,
) -> Result<ImplicitRun, ReferenceError> {
    assert!(picard_tol > 0.0, "picard_tol must be positive");
    scenario.validate_bcs(mesh)?;
    let spaces = Spaces::build(mesh);
    let params = scenario.physical_params(mesh)?;
    let t_final = dt * n_steps as f64;

    let m_u = assemble_form(FormId::MassVelocity, mesh, &spaces, &params);
    let a_u = assemble_form(FormId::StiffnessVelocity, mesh, &spaces, &params);
    let t_gamma = assemble_form(FormId::InterfaceTangential, mesh, &spaces, &params);
    let b_div = assemble_form(FormId::Divergence, mesh, &spaces, &params);
    let m_phi = assemble_form(FormId::MassHead, mesh, &spaces, &params);
    let a_phi = assemble_form(FormId::StiffnessHead, mesh, &spaces, &params);
    let c_gamma = assemble_form(FormId::InterfaceCoupling, mesh, &spaces, &params);

    let n_u = spaces.velocity.n_dofs;
    let n_p = spaces.pressure.n_dofs;
    let n_h = spaces.head.n_dofs;

    let vel_labels: Vec<&str> = scenario
        .velocity_bc
        .iter()
        .map(|(l, _)| l.as_str())
        .collect();
    let vel_constraints = collect_constraints(mesh, &spaces.topo, &spaces.velocity, &vel_labels);
    let head_named: Vec<(&str, super::ScalarFn)> = scenario
        .head_bc
        .iter()
        .filter_map(|(l, bc)| match bc {
            HeadBc::Dirichlet(f) => Some((l.as_str(), f.clone())),
            HeadBc::ZeroFlux => None,
        })
        .collect();
    let head_labels: Vec<&str> = head_named.iter().map(|(l, _)| *l).collect();
    let head_constraints = collect_constraints(mesh, &spaces.topo, &spaces.head, &head_labels);

    // Block-global constrained dofs: velocity at offset 0, head after (u, p).
    let mut constrained: Vec<usize> = vel_constraints.iter().map(|c| c.dof).collect();
    constrained.extend(head_constraints.iter().map(|c| c.dof + n_u + n_p));

    let assemble_system = |conv: &SparseOperator| -> SparseOperator {
        let mut b = CooBuilder::new(n_u + n_p + n_h, n_u + n_p + n_h);
        b.add_block(0, 0, &m_u, 1.0 / dt, false);
        b.add_block(0, 0, &a_u, 1.0, false);
        b.add_block(0, 0, &t_gamma, 1.0, false);
        b.add_block(0, 0, conv, 1.0, false);
        b.add_block(0, n_u, &b_div, -1.0, true);
        b.add_block(n_u, 0, &b_div, -1.0, false);
        b.add_block(0, n_u + n_p, &c_gamma, 1.0, false);
        b.add_block(n_u + n_p, 0, &c_gamma, -1.0, true);
        b.add_block(n_u + n_p, n_u + n_p, &m_phi, 1.0 / dt, false);
        b.add_block(n_u + n_p, n_u + n_p, &a_phi, 1.0, false);
        b.build()
    };

    let u0fn = scenario.u0.clone();
    let phi0fn = scenario.phi0.clone();
    let mut u = spaces.velocity.interpolate_vector(|p| u0fn(p, 0.0));
    let mut phi = spaces.head.interpolate_scalar(|p| phi0fn(p, 0.0));
    let mut p = vec![0.0; n_p];

    let mk_state = |u: &[f64], p: &[f64], phi: &[f64], t: f64| State {
        u: FieldVector::new(FieldKind::Velocity, u.to_vec()).at_time(t),
        p: FieldVector::new(FieldKind::Pressure, p.to_vec()).at_time(t),
        phi: FieldVector::new(FieldKind::Head, phi.to_vec()).at_time(t),
        r: (-t / t_final).exp(),
        t,
    };

    let mut states = vec![mk_state(&u, &p, &phi, 0.0)];
    let mut iterations = Vec::with_capacity(n_steps);
    let mut fact: Option<Factorization> = None;

    for n in 0..n_steps {
        let t1 = (n + 1) as f64 * dt;

        let f1 = scenario.f1.clone();
        let mut forcing_u = assemble_load_velocity(mesh, &spaces, &|x, tt| f1(x, tt), t1);
        if let Some(q) = scenario.compensation_integrand(&params, t1) {
            let comp = assemble_interface_tangential_load(mesh, &spaces, &params, &q);
            for (o, c) in forcing_u.iter_mut().zip(&comp) {
                *o += c;
            }
        }
        let f2 = scenario.f2.clone();
        let forcing_phi = assemble_load_head(mesh, &spaces, &|x, tt| f2(x, tt), t1, params.g);

        let mut rhs = vec![0.0; n_u + n_p + n_h];
        rhs[..n_u].copy_from_slice(&forcing_u);
        let hist_u = rhs_history(&m_u, &u, 1.0 / dt, &[], 0.0);
        for i in 0..n_u {
            rhs[i] += hist_u[i];
        }
        let hist_phi = rhs_history(&m_phi, &phi, 1.0 / dt, &[], 0.0);
        for i in 0..n_h {
            rhs[n_u + n_p + i] = forcing_phi[i] + hist_phi[i];
        }

        let mut bc_values: Vec<f64> = vel_constraints
            .iter()
            .map(|c| {
                let v = (scenario.velocity_bc[c.segment].1)(c.position, t1);
                if c.component == 0 {
                    v.x
                } else {
                    v.y
                }
            })
            .collect();
        bc_values.extend(head_constraints.iter().map(|c| {
            match &scenario
                .head_bc
                .iter()
                .find(|(l, _)| l == head_labels[c.segment])
                .unwrap()
                .1
            {
                HeadBc::Dirichlet(f) => f(c.position, t1),
                HeadBc::ZeroFlux => unreachable!("only Dirichlet labels are collected"),
            }
        }));

        let mut picard_u = u.clone();
        let mut converged = None;
        let mut last_change = f64::INFINITY;
        for m in 0..picard_max {
            let conv = convection_matrix(
                &FieldVector::new(FieldKind::Velocity, picard_u.clone()),
                mesh,
                &spaces,
            )?;
            let system = assemble_system(&conv);
            let eliminated = dirichlet::eliminate(&system, &constrained);
            match fact.as_mut() {
                Some(f) => f.refactor(&eliminated)?,
                None => fact = Some(factorize(&eliminated)?),
            }
            let mut step_rhs = rhs.clone();
            dirichlet::lift_rhs(&system, &mut step_rhs, &constrained, &bc_values);
            let x = fact.as_ref().unwrap().solve(&step_rhs)?;

            let u_new = &x[..n_u];
            let phi_new = &x[n_u + n_p..];
            let du: f64 = u_new
                .iter()
                .zip(&picard_u)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            let scale = norm2(u_new).max(1e-14);
            last_change = du / scale;
            picard_u = u_new.to_vec();
            if last_change <= picard_tol {
                u = u_new.to_vec();
                p = x[n_u..n_u + n_p].to_vec();
                phi = phi_new.to_vec();
                converged = Some(m + 1);
                break;
            }
        }
        match converged {
            Some(iters) => iterations.push(iters),
            None => {
                return Err(ReferenceError::PicardDiverged {
                    max: picard_max,
                    t: t1,
                    change: last_change,
                })
            }
        }
        states.push(mk_state(&u, &p, &phi, t1));
    }

    Ok(ImplicitRun { states, iterations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::decay;

    #[test]
    fn zero_scenario_converges_in_one_iteration_per_step() {
        let s = decay();
        let mesh = s.build_mesh(0.25).unwrap();
        let run = reference_implicit_solve(&s, &mesh, 0.1, 3, 1e-10, 10).unwrap();
        assert_eq!(run.states.len(), 4);
        for (state, iters) in run.states.iter().skip(1).zip(&run.iterations) {
            assert_eq!(*iters, 1);
            assert!(norm2(&state.u.values) < 1e-12);
            assert!(norm2(&state.phi.values) < 1e-12);
        }
    }
}
