//! Independent oracles for the acceptance suite.
//!
//! Everything here deliberately avoids the library's quadrature tables,
//! reference-element shape code and the bar/tilde stepping path:
//! - integration uses Gauss-Legendre nodes computed by Newton iteration and
//!   the Duffy transform (exact beyond total degree 10);
//! - basis functions are evaluated through physical barycentric coordinates,
//!   with gradients by central differences (exact for quadratics up to
//!   rounding);
//! - the monolithic oracle assembles the schemes' four discrete equations as
//!   one linear system and measures the residual of a superposed step.

#![allow(dead_code)]

use nsdarcy::fem::{dot, CooBuilder, SparseOperator};
use nsdarcy::geometry::{cross2, Vec2};
use nsdarcy::mesh::Mesh;
use nsdarcy::stepper::{Scheme, State, Stepper};

/// Gauss-Legendre nodes/weights on [0, 1], computed by Newton iteration on
/// the Legendre recurrence.
pub fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        // Starting guess (Chebyshev-like) on [-1, 1].
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes.push(0.5 * (1.0 - x));
        weights.push(0.5 * w);
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Integrates `f` over the triangle `(v0, v1, v2)` with a Duffy-collapsed
/// GL8 x GL8 rule (exact well beyond total degree 10).
pub fn integrate_triangle(verts: [Vec2; 3], f: &mut dyn FnMut(Vec2) -> f64) -> f64 {
    let (nodes, weights) = gauss_legendre_unit(8);
    let jac = cross2(verts[0], verts[1], verts[2]); // 2 * signed area
    let mut total = 0.0;
    for (i, &a) in nodes.iter().enumerate() {
        for (j, &b) in nodes.iter().enumerate() {
            // Duffy: (ξ, η) = (a, b(1-a)), weight (1-a).
            let xi = a;
            let eta = b * (1.0 - a);
            let x = verts[0] + (verts[1] - verts[0]) * xi + (verts[2] - verts[0]) * eta;
            total += weights[i] * weights[j] * (1.0 - a) * f(x);
        }
    }
    total * jac
}

/// Integrates `f` along the segment `a -> b` with GL8.
pub fn integrate_segment(a: Vec2, b: Vec2, f: &mut dyn FnMut(Vec2) -> f64) -> f64 {
    let (nodes, weights) = gauss_legendre_unit(8);
    let len = (b - a).norm();
    nodes
        .iter()
        .zip(&weights)
        .map(|(&s, &w)| w * f(a + (b - a) * s))
        .sum::<f64>()
        * len
}

/// P2 basis of a triangle evaluated at a physical point through barycentric
/// area ratios; node order matches the library convention (vertices then
/// midpoints opposite them).
pub fn p2_basis_physical(verts: [Vec2; 3], node: usize, x: Vec2) -> f64 {
    let area2 = cross2(verts[0], verts[1], verts[2]);
    let l = [
        cross2(x, verts[1], verts[2]) / area2,
        cross2(verts[0], x, verts[2]) / area2,
        cross2(verts[0], verts[1], x) / area2,
    ];
    match node {
        0..=2 => l[node] * (2.0 * l[node] - 1.0),
        3 => 4.0 * l[1] * l[2],
        4 => 4.0 * l[2] * l[0],
        5 => 4.0 * l[0] * l[1],
        _ => unreachable!(),
    }
}

pub fn p1_basis_physical(verts: [Vec2; 3], node: usize, x: Vec2) -> f64 {
    let area2 = cross2(verts[0], verts[1], verts[2]);
    match node {
        0 => cross2(x, verts[1], verts[2]) / area2,
        1 => cross2(verts[0], x, verts[2]) / area2,
        2 => cross2(verts[0], verts[1], x) / area2,
        _ => unreachable!(),
    }
}

/// Central-difference gradient; exact for polynomials of degree <= 2 up to
/// rounding.
pub fn fd_gradient(f: &dyn Fn(Vec2) -> f64, x: Vec2) -> Vec2 {
    let h = 5e-3;
    Vec2::new(
        (f(Vec2::new(x.x + h, x.y)) - f(Vec2::new(x.x - h, x.y))) / (2.0 * h),
        (f(Vec2::new(x.x, x.y + h)) - f(Vec2::new(x.x, x.y - h))) / (2.0 * h),
    )
}

/// Evaluates a P2 vector field (library dof layout) on a given triangle.
pub fn eval_p2_vector(verts: [Vec2; 3], coeffs: &[f64; 12], x: Vec2) -> Vec2 {
    let mut v = Vec2::ZERO;
    for n in 0..6 {
        let b = p2_basis_physical(verts, n, x);
        v = v + Vec2::new(coeffs[2 * n], coeffs[2 * n + 1]) * b;
    }
    v
}

/// Assembles the monolithic system of one first- or second-order SAV step
/// (unknowns `[u; p; φ; r]`, Dirichlet rows replaced by the identity) and
/// returns the relative residual of the given solution.
pub fn monolithic_step_residual(
    stepper: &Stepper,
    state: &State,
    prev: Option<&State>,
    next: &State,
) -> f64 {
    let n_u = stepper.spaces.velocity.n_dofs;
    let n_p = stepper.spaces.pressure.n_dofs;
    let n_h = stepper.spaces.head.n_dofs;
    let n = n_u + n_p + n_h + 1;
    let dt = stepper.dt;
    let t1 = state.t + dt;
    let bdf2 = stepper.scheme == Scheme::Bdf2Sav && prev.is_some();

    // Explicit fields and functionals.
    let (u_star, phi_star): (Vec<f64>, Vec<f64>) = if bdf2 {
        let pv = prev.unwrap();
        (
            state
                .u
                .values
                .iter()
                .zip(&pv.u.values)
                .map(|(a, b)| 2.0 * a - b)
                .collect(),
            state
                .phi
                .values
                .iter()
                .zip(&pv.phi.values)
                .map(|(a, b)| 2.0 * a - b)
                .collect(),
        )
    } else {
        (state.u.values.clone(), state.phi.values.clone())
    };
    let u_star_fv =
        nsdarcy::fem::FieldVector::new(nsdarcy::fem::FieldKind::Velocity, u_star.clone());
    let (n_vec, c_to_vel, c_to_head) = stepper
        .explicit_functionals(&u_star_fv, &phi_star)
        .expect("functionals");

    let e1 = (-t1 / stepper.t_final).exp();
    let (kappa, kappa_r, rho) = if bdf2 {
        let pv = prev.unwrap();
        (
            1.5 / dt,
            1.5 / dt + 1.0 / stepper.t_final,
            (4.0 * state.r - pv.r) / (2.0 * dt),
        )
    } else {
        (1.0 / dt, 1.0 / dt + 1.0 / stepper.t_final, state.r / dt)
    };

    let ops = &stepper.ops;
    let mut k = CooBuilder::new(n, n);
    k.add_block(0, 0, &ops.m_u, kappa, false);
    k.add_block(0, 0, &ops.a_u, 1.0, false);
    k.add_block(0, 0, &ops.t_gamma, 1.0, false);
    k.add_block(0, n_u, &ops.b_div, -1.0, true);
    k.add_block(n_u, 0, &ops.b_div, -1.0, false);
    k.add_block(n_u + n_p, n_u + n_p, &ops.m_phi, kappa, false);
    k.add_block(n_u + n_p, n_u + n_p, &ops.a_phi, 1.0, false);
    // r-column couplings: + (a_N(u*,u*,·) + c_Γ(·,φ*)) / e1 in the momentum
    // rows, − c_Γ(u*,·) / e1 in the head rows.
    for i in 0..n_u {
        let v = (n_vec[i] + c_to_vel[i]) / e1;
        if v != 0.0 {
            k.add(i, n - 1, v);
        }
    }
    for i in 0..n_h {
        let v = -c_to_head[i] / e1;
        if v != 0.0 {
            k.add(n_u + n_p + i, n - 1, v);
        }
    }
    // r-row: (κ_r) r − [(n_vec + Cφ*)ᵀ u − (Cᵀu*)ᵀ φ]/e1 = ρ.
    for i in 0..n_u {
        let v = -(n_vec[i] + c_to_vel[i]) / e1;
        if v != 0.0 {
            k.add(n - 1, i, v);
        }
    }
    for i in 0..n_h {
        let v = c_to_head[i] / e1;
        if v != 0.0 {
            k.add(n - 1, n_u + n_p + i, v);
        }
    }
    k.add(n - 1, n - 1, kappa_r);

    let (forcing_u, forcing_phi) = stepper.forcing(t1);
    let mut rhs = vec![0.0; n];
    rhs[..n_u].copy_from_slice(&forcing_u);
    let hist_u = if bdf2 {
        let pv = prev.unwrap();
        let combo: Vec<f64> = state
            .u
            .values
            .iter()
            .zip(&pv.u.values)
            .map(|(a, b)| (2.0 * a - 0.5 * b) / dt)
            .collect();
        ops.m_u.matvec(&combo).unwrap()
    } else {
        let combo: Vec<f64> = state.u.values.iter().map(|a| a / dt).collect();
        ops.m_u.matvec(&combo).unwrap()
    };
    for i in 0..n_u {
        rhs[i] += hist_u[i];
    }
    let hist_phi = if bdf2 {
        let pv = prev.unwrap();
        let combo: Vec<f64> = state
            .phi
            .values
            .iter()
            .zip(&pv.phi.values)
            .map(|(a, b)| (2.0 * a - 0.5 * b) / dt)
            .collect();
        ops.m_phi.matvec(&combo).unwrap()
    } else {
        let combo: Vec<f64> = state.phi.values.iter().map(|a| a / dt).collect();
        ops.m_phi.matvec(&combo).unwrap()
    };
    for i in 0..n_h {
        rhs[n_u + n_p + i] = forcing_phi[i] + hist_phi[i];
    }
    rhs[n - 1] = rho;

    // Dirichlet rows: identity with the boundary values at t¹.
    let (vel_bc, head_bc) = stepper.constraints();
    let (vel_values, head_values) = stepper.boundary_values(t1);
    let matrix = k.build();
    let mut matrix =
        replace_rows_with_identity(&matrix, &vel_bc.iter().map(|c| c.dof).collect::<Vec<_>>());
    for (c, &v) in vel_bc.iter().zip(&vel_values) {
        rhs[c.dof] = v;
    }
    matrix = replace_rows_with_identity(
        &matrix,
        &head_bc
            .iter()
            .map(|c| c.dof + n_u + n_p)
            .collect::<Vec<_>>(),
    );
    for (c, &v) in head_bc.iter().zip(&head_values) {
        rhs[c.dof + n_u + n_p] = v;
    }

    let mut x = Vec::with_capacity(n);
    x.extend_from_slice(&next.u.values);
    x.extend_from_slice(&next.p.values);
    x.extend_from_slice(&next.phi.values);
    x.push(next.r);

    let kx = matrix.matvec(&x).expect("square system");
    let res2: f64 = kx.iter().zip(&rhs).map(|(a, b)| (a - b) * (a - b)).sum();
    let rhs2: f64 = dot(&rhs, &rhs);
    (res2 / rhs2.max(1e-300)).sqrt()
}

fn replace_rows_with_identity(op: &SparseOperator, rows: &[usize]) -> SparseOperator {
    let mut flag = vec![false; op.nrows];
    for &r in rows {
        flag[r] = true;
    }
    let mut b = CooBuilder::new(op.nrows, op.ncols);
    for row in 0..op.nrows {
        if flag[row] {
            b.add(row, row, 1.0);
            continue;
        }
        for idx in op.row_ptr[row]..op.row_ptr[row + 1] {
            b.add(row, op.col_idx[idx], op.values[idx]);
        }
    }
    b.build()
}

/// Deterministic pseudo-random stream for test inputs.
pub struct TestRng(u64);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        TestRng(seed)
    }

    pub fn next_f64(&mut self) -> f64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform in [lo, hi).
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    pub fn vec(&mut self, n: usize, lo: f64, hi: f64) -> Vec<f64> {
        (0..n).map(|_| self.range(lo, hi)).collect()
    }
}

/// A random well-shaped triangle inside [lo, hi]².
pub fn random_triangle(rng: &mut TestRng, lo: f64, hi: f64) -> [Vec2; 3] {
    loop {
        let v = [
            Vec2::new(rng.range(lo, hi), rng.range(lo, hi)),
            Vec2::new(rng.range(lo, hi), rng.range(lo, hi)),
            Vec2::new(rng.range(lo, hi), rng.range(lo, hi)),
        ];
        let area = 0.5 * cross2(v[0], v[1], v[2]);
        let scale = hi - lo;
        if area > 0.05 * scale * scale {
            return v;
        }
    }
}

/// Single-triangle mesh of the given subdomain (no interface, three boundary
/// facets).
pub fn one_triangle_mesh(verts: [Vec2; 3], sd: nsdarcy::mesh::Subdomain) -> Mesh {
    Mesh::from_parts(
        verts.to_vec(),
        vec![[0, 1, 2]],
        vec![sd],
        Default::default(),
    )
    .expect("valid one-triangle mesh")
}

/// Two triangles sharing the edge (a, b): fluid above with apex `c_f`,
/// porous below with apex `c_p`; the shared edge becomes the interface.
pub fn two_triangle_interface_mesh(a: Vec2, b: Vec2, c_f: Vec2, c_p: Vec2) -> Mesh {
    Mesh::from_parts(
        vec![a, b, c_f, c_p],
        vec![[0, 1, 2], [0, 3, 1]],
        vec![
            nsdarcy::mesh::Subdomain::Fluid,
            nsdarcy::mesh::Subdomain::Porous,
        ],
        Default::default(),
    )
    .expect("valid two-triangle mesh")
}
