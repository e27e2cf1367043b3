//! Scheme-level integration tests: factorization-reuse equivalence, BDF2
//! energy monotonicity, the implicit-reference error comparison, and the
//! effect of the interface compensation on manufactured consistency.

mod common;

use common::TestRng;
use nsdarcy::fem::{norm2, time_l2, vector_error_norm, NormKind};
use nsdarcy::scenario::{
    convergence_study, manufactured, manufactured_default, reference_implicit_solve, Coupling,
};
use nsdarcy::stepper::{Scheme, Stepper};

#[test]
fn factor_once_matches_refactorizing_every_step() {
    // The system matrices are constant in time; reusing one factorization
    // across all steps must match rebuilding the stepper (and so the
    // factorization) before every step.
    let s = manufactured_default();
    let mesh = s.build_mesh(0.25).unwrap();
    let dt = 1.0 / 16.0;
    let n_steps = 8;
    let once = Stepper::new(s.clone(), mesh.clone(), dt, n_steps, Scheme::BeSav).unwrap();
    let run = once.run(0).unwrap();
    let reference = run.final_state();

    let mut state = once.init();
    for _ in 0..n_steps {
        let fresh = Stepper::new(s.clone(), mesh.clone(), dt, n_steps, Scheme::BeSav).unwrap();
        let (next, _) = fresh.step(&state, None).unwrap();
        state = next;
    }

    let scale = norm2(&reference.u.values).max(1e-30);
    let du: f64 = reference
        .u
        .values
        .iter()
        .zip(&state.u.values)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    assert!(
        du / scale <= 1e-12,
        "velocity trajectories differ by {}",
        du / scale
    );
    let dphi: f64 = reference
        .phi
        .values
        .iter()
        .zip(&state.phi.values)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    assert!(dphi / norm2(&reference.phi.values).max(1e-30) <= 1e-12);
    assert!((reference.r - state.r).abs() <= 1e-12);
}

#[test]
fn assembled_saddle_point_solve_meets_the_residual_contract() {
    // Factorize the assembled fluid saddle-point block of a 2x2-cell mesh
    // and check the relative residual of a random solve.
    let s = manufactured_default();
    let mesh = s.build_mesh(0.5).unwrap();
    let stepper = Stepper::new(s, mesh, 0.125, 8, Scheme::BeSav).unwrap();
    let n_u = stepper.spaces.velocity.n_dofs;
    let n_p = stepper.spaces.pressure.n_dofs;
    let mut b = nsdarcy::fem::CooBuilder::new(n_u + n_p, n_u + n_p);
    b.add_block(0, 0, &stepper.ops.m_u, 8.0, false);
    b.add_block(0, 0, &stepper.ops.a_u, 1.0, false);
    b.add_block(0, 0, &stepper.ops.t_gamma, 1.0, false);
    b.add_block(0, n_u, &stepper.ops.b_div, -1.0, true);
    b.add_block(n_u, 0, &stepper.ops.b_div, -1.0, false);
    let saddle = b.build();
    let fact = nsdarcy::linsolve::factorize(&saddle).unwrap();
    let mut rng = TestRng::new(0x5AD);
    let rhs = rng.vec(n_u + n_p, -1.0, 1.0);
    let (_, residual) = fact.solve_with_residual(&rhs).unwrap();
    assert!(residual <= 1e-10, "relative residual {residual:e}");

    // Concurrent solves against one factorization are race-free.
    fn assert_send_sync<T: Send + Sync>() {}
    assert_send_sync::<nsdarcy::linsolve::Factorization>();
}

#[test]
fn bdf2_g_energy_is_monotone_under_zero_forcing() {
    let s = nsdarcy::scenario::decay();
    let mesh = s.build_mesh(0.125).unwrap();
    let stepper = Stepper::new(s, mesh, 0.2, 12, Scheme::Bdf2Sav).unwrap();
    let mut rng = TestRng::new(0xB2F2);
    let u = rng.vec(stepper.spaces.velocity.n_dofs, -1.0, 1.0);
    let phi = rng.vec(stepper.spaces.head.n_dofs, -1.0, 1.0);
    let run = stepper.run_from(stepper.init_with(u, phi), 1).unwrap();

    // The BDF2 telescoping quantity: ‖uⁿ‖² + ‖2uⁿ-uⁿ⁻¹‖² (+ head and r
    // analogues), non-increasing from the first BDF2 level on.
    let g_energy = |cur: &nsdarcy::stepper::State, prev: &nsdarcy::stepper::State| -> f64 {
        let m_u = &stepper.ops.m_u;
        let m_phi = &stepper.ops.m_phi;
        let ext: Vec<f64> = cur
            .u
            .values
            .iter()
            .zip(&prev.u.values)
            .map(|(a, b)| 2.0 * a - b)
            .collect();
        let ext_phi: Vec<f64> = cur
            .phi
            .values
            .iter()
            .zip(&prev.phi.values)
            .map(|(a, b)| 2.0 * a - b)
            .collect();
        let rr = 2.0 * cur.r - prev.r;
        m_u.pairing(&cur.u.values, &cur.u.values).unwrap()
            + m_u.pairing(&ext, &ext).unwrap()
            + m_phi.pairing(&cur.phi.values, &cur.phi.values).unwrap()
            + m_phi.pairing(&ext_phi, &ext_phi).unwrap()
            + cur.r * cur.r
            + rr * rr
    };
    let snaps = &run.snapshots;
    let mut prev_g = g_energy(&snaps[1], &snaps[0]);
    for w in snaps[1..].windows(2) {
        let g = g_energy(&w[1], &w[0]);
        assert!(
            g <= prev_g * (1.0 + 1e-12),
            "G-energy grew: {prev_g} -> {g}"
        );
        prev_g = g;
    }
}

#[test]
fn implicit_reference_error_is_comparable_to_the_sav_scheme() {
    // Both time discretizations are first order; at Δt = 1/64 (h² = Δt) their velocity
    // errors agree within a factor of two.
    let s = manufactured_default();
    let dt = 1.0 / 64.0;
    let h = 0.125;
    let n_steps = 64;
    let mesh = s.build_mesh(h).unwrap();
    let stepper = Stepper::new(s.clone(), mesh.clone(), dt, n_steps, Scheme::BeSav).unwrap();
    let run = stepper.run(1).unwrap();
    let exact = s.exact.as_ref().unwrap();

    let velocity_error_history = |states: &[nsdarcy::stepper::State]| -> Vec<f64> {
        states
            .iter()
            .skip(1)
            .map(|st| {
                let t = st.t;
                let eu = exact.u.clone();
                let egu = exact.grad_u.clone();
                vector_error_norm(
                    NormKind::H1,
                    &st.u.values,
                    &stepper.spaces.velocity,
                    &stepper.mesh,
                    &stepper.spaces,
                    &|x| eu(x, t),
                    &|x| egu(x, t),
                )
                .unwrap()
            })
            .collect()
    };

    let err_sav = time_l2(dt, &velocity_error_history(&run.snapshots));
    let reference = reference_implicit_solve(&s, &mesh, dt, n_steps, 1e-9, 25).unwrap();
    let err_ref = time_l2(dt, &velocity_error_history(&reference.states));
    let ratio = err_ref / err_sav;
    assert!(
        (0.5..=2.0).contains(&ratio),
        "l2(H1) velocity errors: sav {err_sav:.4e}, implicit reference {err_ref:.4e}, ratio {ratio:.3}"
    );
}

#[test]
fn bjs_compensation_controls_manufactured_consistency() {
    // With the compensation the study converges cleanly; disabling it leaves
    // the interface inconsistency in place, which must visibly degrade the
    // finest-level velocity error.
    let with = manufactured_default();
    let without = {
        let mut s = manufactured_default();
        s.bjs_compensation = false;
        s
    };
    let dt_list = [0.25, 0.0625, 0.015625, 0.00390625];
    let table_with =
        convergence_study(&with, Scheme::BeSav, Coupling::H2EqDt, &dt_list, 1.0).unwrap();
    let table_without =
        convergence_study(&without, Scheme::BeSav, Coupling::H2EqDt, &dt_list, 1.0).unwrap();
    let e_with = table_with.rows.last().unwrap().err_u;
    let e_without = table_without.rows.last().unwrap().err_u;
    assert!(
        e_without > 1.5 * e_with,
        "expected the uncompensated study to stall: with {e_with:.4e}, without {e_without:.4e}"
    );
}

#[test]
fn bdf2_r_tracking_has_second_order_startup_behavior() {
    // With the backward-Euler startup the BDF2 drift max_n |r - exp(-t/T)|
    // still decays at observed order >= 1.7 over a Δt-halving sequence.
    let s = manufactured_default();
    let mesh = s.build_mesh(1.0 / 16.0).unwrap();
    let dts: [f64; 4] = [0.125, 0.0625, 0.03125, 0.015625];
    let mut drifts = Vec::new();
    for &dt in &dts {
        let n = (1.0 / dt).round() as usize;
        let stepper = Stepper::new(s.clone(), mesh.clone(), dt, n, Scheme::Bdf2Sav).unwrap();
        let run = stepper.run(1).unwrap();
        let drift = run
            .snapshots
            .iter()
            .map(|st| st.r_drift(stepper.t_final))
            .fold(0.0, f64::max);
        drifts.push(drift);
    }
    let xs: Vec<f64> = dts.iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = drifts.iter().map(|d| d.ln()).collect();
    let xm = xs.iter().sum::<f64>() / xs.len() as f64;
    let ym = ys.iter().sum::<f64>() / ys.len() as f64;
    let slope = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - xm) * (y - ym))
        .sum::<f64>()
        / xs.iter().map(|x| (x - xm) * (x - xm)).sum::<f64>();
    assert!(
        slope >= 1.7,
        "BDF2 r-drift order {slope:.3}, drifts {drifts:?}"
    );
}

#[test]
fn manufactured_load_pairing_matches_dense_oracle() {
    // (f₁, ·) at t = 1 paired with the exact-solution interpolant, against
    // the independent dense-quadrature oracle.
    use common::{eval_p2_vector, integrate_triangle};
    use nsdarcy::fem::assemble_load_velocity;
    use nsdarcy::mesh::Subdomain;

    let s = manufactured_default();
    let mesh = s.build_mesh(1.0 / 16.0).unwrap();
    let spaces = nsdarcy::fem::Spaces::build(&mesh);
    let t = 1.0;
    let f1 = s.f1.clone();
    let load = assemble_load_velocity(&mesh, &spaces, &|p, tt| f1(p, tt), t);
    let exact_u = s.exact.as_ref().unwrap().u.clone();
    let interp = spaces.velocity.interpolate_vector(|p| exact_u(p, t));
    let got = nsdarcy::fem::dot(&load, &interp);

    let mut oracle = 0.0;
    for tri in 0..mesh.n_triangles() {
        if mesh.subdomain[tri] != Subdomain::Fluid {
            continue;
        }
        let verts = mesh.triangle_vertices(tri);
        let nodes = spaces.velocity.tri_nodes(tri, &mesh, &spaces.topo);
        let mut local = [0.0; 12];
        for (l, &n) in nodes.iter().enumerate() {
            local[2 * l] = interp[2 * n];
            local[2 * l + 1] = interp[2 * n + 1];
        }
        oracle += integrate_triangle(verts, &mut |x| {
            f1(x, t).dot(eval_p2_vector(verts, &local, x))
        });
    }
    assert!(
        (got - oracle).abs() / oracle.abs() <= 1e-10,
        "load pairing {got:.12e} vs oracle {oracle:.12e}"
    );
}

#[test]
fn cavity_lid_dofs_carry_the_lid_velocity_exactly() {
    // Every constrained dof on [0,1] × {1} carries exactly (1, 0), corners
    // included (the lid is the last segment, so it wins corner conflicts).
    let s = nsdarcy::scenario::cavity();
    let mesh = s.build_mesh(0.125).unwrap();
    let stepper = Stepper::new(s, mesh, 0.01, 5, Scheme::BeSav).unwrap();
    let (vel_constraints, _) = stepper.constraints();
    let (values, _) = stepper.boundary_values(0.37);
    let mut lid_dofs = 0;
    for (c, &v) in vel_constraints.iter().zip(&values) {
        if (c.position.y - 1.0).abs() < 1e-14 {
            let expect = if c.component == 0 { 1.0 } else { 0.0 };
            assert_eq!(v, expect, "lid dof at {:?}", c.position);
            lid_dofs += 1;
        }
    }
    // 8 cells -> 9 vertices + 8 midpoints, two components each.
    assert_eq!(lid_dofs, 2 * 17);
    // And the solved state reproduces them exactly after a step.
    let (next, _) = stepper.step(&stepper.init(), None).unwrap();
    for c in vel_constraints {
        if (c.position.y - 1.0).abs() < 1e-14 {
            let expect = if c.component == 0 { 1.0 } else { 0.0 };
            assert_eq!(next.u.values[c.dof], expect);
        }
    }
}

#[test]
fn manufactured_interface_conditions_hold_on_gamma() {
    // Mass conservation and the Lions balance hold with both sides zero on
    // Γ = [0,1] × {0}.
    let s = manufactured(0.01, 1e-3, 0.1, 1.0, 1.0, 1.0, 1.0);
    let e = s.exact.as_ref().unwrap();
    let t = 0.83;
    for i in 0..=16 {
        let x = i as f64 / 16.0;
        let p = nsdarcy::geometry::Vec2::new(x, 0.0);
        // u·n_f with n_f = (0,-1).
        let un = -(e.u)(p, t).y;
        // u_p·n_p with n_p = (0,1): -k ∂φ/∂y.
        let upn = -s.k_base * (e.grad_phi)(p, t).y;
        assert!(
            un.abs() < 1e-15 && upn.abs() < 1e-15,
            "mass conservation at x={x}"
        );
        // Lions: p - ν n_f·∂u/∂n_f + ½u·u = gφ, both sides zero.
        let g = (e.grad_u)(p, t);
        // n_f·(∇u·n_f) = ∂u₂/∂y here.
        let normal_stress = (e.p)(p, t) - s.nu * g[1][1] + 0.5 * (e.u)(p, t).dot((e.u)(p, t));
        assert!(normal_stress.abs() < 1e-15);
        assert!((s.g * (e.phi)(p, t)).abs() < 1e-15);
    }
}
