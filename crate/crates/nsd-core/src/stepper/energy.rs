//! Discrete energy identities and the cumulative stability ledger.
//!
//! Testing the first-order scheme with `(u¹, φ¹, r¹)` gives the exact
//! per-step identity (zero forcing):
//!
//! ```text
//! (1/2Δt)(‖u¹‖² - ‖u⁰‖² + ‖u¹-u⁰‖²) + ν‖∇u¹‖² + η∫_Γ(u¹·τ)²
//! + (gS₀/2Δt)(‖φ¹‖² - ‖φ⁰‖² + ‖φ¹-φ⁰‖²) + g‖√k ∇φ¹‖²
//! + (1/2Δt)(|r¹|² - |r⁰|² + |r¹-r⁰|²) + (1/T)|r¹|² = 0,
//! ```
//!
//! and for forced runs the right side is `(f₁, u¹)_f + g(f₂, φ¹)_p` (plus the
//! interface compensation when enabled). The BDF2 identity replaces each
//! time-difference group by the `(3a-4b+c, a)` expansion
//! `½(|a|² + |2a-b|² - |b|² - |2b-c|² + |a-2b+c|²)`. The explicit convection
//! and coupling terms cancel exactly against the r-equation, so the residual
//! is solver tolerance only.

use super::{State, Stepper};
use crate::fem::{dot, SparseOperator};

/// One evaluation of the per-step identity.
#[derive(Clone, Debug)]
pub struct EnergyBalance {
    /// Sum of the left-hand terms.
    pub lhs: f64,
    /// Forcing pairings moved to the right side.
    pub rhs: f64,
    /// `(lhs - rhs)` normalized by the sum of absolute values of all terms;
    /// zero when every term vanishes.
    pub residual: f64,
}

fn quad(m: &SparseOperator, x: &[f64]) -> f64 {
    m.pairing(x, x).expect("operator matches field")
}

fn diff(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn second_diff(a: &[f64], b: &[f64], c: &[f64]) -> Vec<f64> {
    a.iter()
        .zip(b)
        .zip(c)
        .map(|((x, y), z)| x - 2.0 * y + z)
        .collect()
}

fn extrap(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| 2.0 * x - y).collect()
}

impl Stepper {
    /// Evaluates the per-step identity for `next` following `cur` (and `prev`
    /// for a BDF2 step), with forcing vectors as assembled over all dofs.
    pub(super) fn energy_balance(
        &self,
        next: &State,
        cur: &State,
        prev: Option<&State>,
        forcing_u: &[f64],
        forcing_phi: &[f64],
    ) -> EnergyBalance {
        let dt = self.dt;
        let m_u = &self.ops.m_u;
        let m_phi = &self.ops.m_phi;
        let u1 = &next.u.values;
        let u0 = &cur.u.values;
        let phi1 = &next.phi.values;
        let phi0 = &cur.phi.values;

        let mut terms: Vec<f64> = Vec::with_capacity(10);
        match prev {
            None => {
                let c = 0.5 / dt;
                terms.push(c * (quad(m_u, u1) - quad(m_u, u0) + quad(m_u, &diff(u1, u0))));
                terms.push(quad(&self.ops.a_u, u1));
                terms.push(quad(&self.ops.t_gamma, u1));
                terms.push(
                    c * (quad(m_phi, phi1) - quad(m_phi, phi0) + quad(m_phi, &diff(phi1, phi0))),
                );
                terms.push(quad(&self.ops.a_phi, phi1));
                let (r1, r0) = (next.r, cur.r);
                terms.push(c * (r1 * r1 - r0 * r0 + (r1 - r0) * (r1 - r0)));
                terms.push(r1 * r1 / self.t_final);
            }
            Some(pv) => {
                let c = 0.25 / dt;
                let um = &pv.u.values;
                let phim = &pv.phi.values;
                terms.push(
                    c * (quad(m_u, u1) + quad(m_u, &extrap(u1, u0))
                        - quad(m_u, u0)
                        - quad(m_u, &extrap(u0, um))
                        + quad(m_u, &second_diff(u1, u0, um))),
                );
                terms.push(quad(&self.ops.a_u, u1));
                terms.push(quad(&self.ops.t_gamma, u1));
                terms.push(
                    c * (quad(m_phi, phi1) + quad(m_phi, &extrap(phi1, phi0))
                        - quad(m_phi, phi0)
                        - quad(m_phi, &extrap(phi0, phim))
                        + quad(m_phi, &second_diff(phi1, phi0, phim))),
                );
                terms.push(quad(&self.ops.a_phi, phi1));
                let (r1, r0, rm) = (next.r, cur.r, pv.r);
                let e2 = |x: f64| x * x;
                terms.push(
                    c * (e2(r1) + e2(2.0 * r1 - r0) - e2(r0) - e2(2.0 * r0 - rm)
                        + e2(r1 - 2.0 * r0 + rm)),
                );
                terms.push(e2(r1) / self.t_final);
            }
        }

        let rhs_u = dot(forcing_u, u1);
        let rhs_phi = dot(forcing_phi, phi1);
        let lhs: f64 = terms.iter().sum();
        let rhs = rhs_u + rhs_phi;
        let normalizer: f64 =
            terms.iter().map(|t| t.abs()).sum::<f64>() + rhs_u.abs() + rhs_phi.abs();
        let residual = if normalizer == 0.0 {
            0.0
        } else {
            (lhs - rhs) / normalizer
        };
        EnergyBalance { lhs, rhs, residual }
    }

    /// Public entry: re-assembles the forcing at `next.t` and evaluates the
    /// identity. Pass `prev` for a BDF2 step, `None` for first-order (or the
    /// BDF2 startup step).
    pub fn energy_identity_residual(
        &self,
        next: &State,
        cur: &State,
        prev: Option<&State>,
    ) -> EnergyBalance {
        let (forcing_u, forcing_phi) = self.forcing(next.t);
        self.energy_balance(next, cur, prev, &forcing_u, &forcing_phi)
    }
}

/// Cumulative sums matching the left side of the schemes' unconditional
/// stability bounds, plus the per-step energy history
/// `Eⁿ = ‖uⁿ‖² + gS₀‖φⁿ‖² + |rⁿ|²`.
#[derive(Clone, Debug)]
pub struct StabilityReport {
    pub energy_history: Vec<f64>,
    /// `Σₙ ‖uⁿ⁺¹-uⁿ‖²`
    pub sum_u_increments: f64,
    /// `νΔt Σₙ ‖∇uⁿ⁺¹‖²`
    pub sum_viscous: f64,
    /// `gS₀ Σₙ ‖φⁿ⁺¹-φⁿ‖²`
    pub sum_phi_increments: f64,
    /// `gΔt Σₙ ‖√k ∇φⁿ⁺¹‖²`
    pub sum_darcy: f64,
    /// `Σₙ |rⁿ⁺¹-rⁿ|²`
    pub sum_r_increments: f64,
    /// `(2Δt/T) Σₙ |rⁿ⁺¹|²`
    pub sum_r_damping: f64,
    /// Zero-forcing right side of the first-order bound:
    /// `‖u⁰‖² + ηΔt ∫_Γ (u⁰·τ)² + gS₀‖φ⁰‖² + |r⁰|²`.
    pub initial_bound: f64,
    pub max_energy_residual: f64,
}

impl StabilityReport {
    pub(super) fn new(stepper: &Stepper, initial: &State) -> Self {
        let u0 = &initial.u.values;
        let phi0 = &initial.phi.values;
        let initial_bound = quad(&stepper.ops.m_u, u0)
            + stepper.dt * quad(&stepper.ops.t_gamma, u0)
            + quad(&stepper.ops.m_phi, phi0)
            + initial.r * initial.r;
        StabilityReport {
            energy_history: vec![energy_of(stepper, initial)],
            sum_u_increments: 0.0,
            sum_viscous: 0.0,
            sum_phi_increments: 0.0,
            sum_darcy: 0.0,
            sum_r_increments: 0.0,
            sum_r_damping: 0.0,
            initial_bound,
            max_energy_residual: 0.0,
        }
    }

    pub(super) fn accumulate(
        &mut self,
        stepper: &Stepper,
        next: &State,
        cur: &State,
        report: &super::StepReport,
    ) {
        let dt = stepper.dt;
        self.energy_history.push(energy_of(stepper, next));
        self.sum_u_increments += quad(&stepper.ops.m_u, &diff(&next.u.values, &cur.u.values));
        self.sum_viscous += dt * quad(&stepper.ops.a_u, &next.u.values);
        self.sum_phi_increments +=
            quad(&stepper.ops.m_phi, &diff(&next.phi.values, &cur.phi.values));
        self.sum_darcy += dt * quad(&stepper.ops.a_phi, &next.phi.values);
        self.sum_r_increments += (next.r - cur.r) * (next.r - cur.r);
        self.sum_r_damping += 2.0 * dt / stepper.t_final * next.r * next.r;
        self.max_energy_residual = self.max_energy_residual.max(report.energy.residual.abs());
    }

    /// Left side of the first-order stability bound at the current end state.
    pub fn stability_lhs(&self, stepper: &Stepper, final_state: &State) -> f64 {
        quad(&stepper.ops.m_u, &final_state.u.values)
            + self.sum_u_increments
            + self.sum_viscous
            + stepper.dt * quad(&stepper.ops.t_gamma, &final_state.u.values)
            + quad(&stepper.ops.m_phi, &final_state.phi.values)
            + self.sum_phi_increments
            + self.sum_darcy
            + final_state.r * final_state.r
            + self.sum_r_increments
            + self.sum_r_damping
    }
}

fn energy_of(stepper: &Stepper, state: &State) -> f64 {
    quad(&stepper.ops.m_u, &state.u.values)
        + quad(&stepper.ops.m_phi, &state.phi.values)
        + state.r * state.r
}
