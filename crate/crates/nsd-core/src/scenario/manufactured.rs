//! Manufactured convergence problem on `Ω_f = [0,1]²`, `Ω_p = [0,1]×[−1,0]`.
//!
//! Exact solution
//! ```text
//! u = ( c sin²(πx) sin(2πy) t⁴, −c sin(2πx) sin²(πy) t⁴ )
//! p = c y cos(πx) t⁴
//! φ = c sin(πx) sin²(πy) t⁴
//! ```
//! is divergence-free, satisfies interface mass conservation and the Lions
//! balance with both sides zero on Γ, and vanishes on all outer boundaries.
//! It violates the BJS condition (`u·τ = 0` on Γ while
//! `ν ∂u₁/∂y = 2πνc sin²(πx) t⁴ ≠ 0`), so the scenario enables the interface
//! compensation functional by default; the forcing below is
//! `f₁ = ∂ₜu − νΔu + (u·∇)u + ∇p` and `f₂ = S₀ ∂ₜφ − k Δφ` in closed form.

use super::{ExactSolution, Geometry, HeadBc, Scenario};
use crate::geometry::{Rect, Vec2};
use std::f64::consts::PI;
use std::sync::Arc;

struct Fields {
    c: f64,
}

impl Fields {
    fn u(&self, p: Vec2, t: f64) -> Vec2 {
        let t4 = t.powi(4);
        Vec2::new(
            self.c * (PI * p.x).sin().powi(2) * (2.0 * PI * p.y).sin() * t4,
            -self.c * (2.0 * PI * p.x).sin() * (PI * p.y).sin().powi(2) * t4,
        )
    }

    fn u_t(&self, p: Vec2, t: f64) -> Vec2 {
        if t == 0.0 {
            return Vec2::ZERO;
        }
        self.u(p, t) * (4.0 / t)
    }

    fn grad_u(&self, p: Vec2, t: f64) -> [[f64; 2]; 2] {
        let t4 = t.powi(4);
        let (sx, s2x, c2x) = (
            (PI * p.x).sin(),
            (2.0 * PI * p.x).sin(),
            (2.0 * PI * p.x).cos(),
        );
        let (sy, s2y, c2y) = (
            (PI * p.y).sin(),
            (2.0 * PI * p.y).sin(),
            (2.0 * PI * p.y).cos(),
        );
        [
            [
                PI * self.c * s2x * s2y * t4,
                2.0 * PI * self.c * sx * sx * c2y * t4,
            ],
            [
                -2.0 * PI * self.c * c2x * sy * sy * t4,
                -PI * self.c * s2x * s2y * t4,
            ],
        ]
    }

    fn lap_u(&self, p: Vec2, t: f64) -> Vec2 {
        let t4 = t.powi(4);
        let (sx, s2x, c2x) = (
            (PI * p.x).sin(),
            (2.0 * PI * p.x).sin(),
            (2.0 * PI * p.x).cos(),
        );
        let (sy, s2y, c2y) = (
            (PI * p.y).sin(),
            (2.0 * PI * p.y).sin(),
            (2.0 * PI * p.y).cos(),
        );
        let pi2 = PI * PI;
        Vec2::new(
            2.0 * pi2 * self.c * (c2x * s2y - 2.0 * sx * sx * s2y) * t4,
            2.0 * pi2 * self.c * (2.0 * s2x * sy * sy - s2x * c2y) * t4,
        )
    }

    fn pressure(&self, p: Vec2, t: f64) -> f64 {
        self.c * p.y * (PI * p.x).cos() * t.powi(4)
    }

    fn grad_p(&self, p: Vec2, t: f64) -> Vec2 {
        let t4 = t.powi(4);
        Vec2::new(
            -PI * self.c * p.y * (PI * p.x).sin() * t4,
            self.c * (PI * p.x).cos() * t4,
        )
    }

    fn phi(&self, p: Vec2, t: f64) -> f64 {
        self.c * (PI * p.x).sin() * (PI * p.y).sin().powi(2) * t.powi(4)
    }

    fn phi_t(&self, p: Vec2, t: f64) -> f64 {
        if t == 0.0 {
            return 0.0;
        }
        4.0 * self.phi(p, t) / t
    }

    fn grad_phi(&self, p: Vec2, t: f64) -> Vec2 {
        let t4 = t.powi(4);
        Vec2::new(
            PI * self.c * (PI * p.x).cos() * (PI * p.y).sin().powi(2) * t4,
            PI * self.c * (PI * p.x).sin() * (2.0 * PI * p.y).sin() * t4,
        )
    }

    fn lap_phi(&self, p: Vec2, t: f64) -> f64 {
        let t4 = t.powi(4);
        let pi2 = PI * PI;
        let sx = (PI * p.x).sin();
        pi2 * self.c * sx * (2.0 * (2.0 * PI * p.y).cos() - (PI * p.y).sin().powi(2)) * t4
    }

    fn f1(&self, p: Vec2, t: f64, nu: f64) -> Vec2 {
        let u = self.u(p, t);
        let g = self.grad_u(p, t);
        let conv = Vec2::new(u.x * g[0][0] + u.y * g[0][1], u.x * g[1][0] + u.y * g[1][1]);
        self.u_t(p, t) - self.lap_u(p, t) * nu + conv + self.grad_p(p, t)
    }

    fn f2(&self, p: Vec2, t: f64, s0: f64, k: f64) -> f64 {
        s0 * self.phi_t(p, t) - k * self.lap_phi(p, t)
    }
}

/// The convergence scenario; the canonical parameter set is
/// `T = 1, α = 1, S₀ = 1, g = 1, ν = 10⁻³, k = 0.1, c = 0.01`.
pub fn manufactured(
    c: f64,
    nu: f64,
    k: f64,
    alpha: f64,
    s0: f64,
    g: f64,
    t_final: f64,
) -> Scenario {
    let fl = Arc::new(Fields { c });

    let f = fl.clone();
    let u = Arc::new(move |p, t| f.u(p, t));
    let f = fl.clone();
    let u_t = Arc::new(move |p, t| f.u_t(p, t));
    let f = fl.clone();
    let grad_u = Arc::new(move |p, t| f.grad_u(p, t));
    let f = fl.clone();
    let pressure = Arc::new(move |p, t| f.pressure(p, t));
    let f = fl.clone();
    let phi = Arc::new(move |p, t| f.phi(p, t));
    let f = fl.clone();
    let phi_t = Arc::new(move |p, t| f.phi_t(p, t));
    let f = fl.clone();
    let grad_phi = Arc::new(move |p, t| f.grad_phi(p, t));
    let f = fl.clone();
    let f1 = Arc::new(move |p, t| f.f1(p, t, nu));
    let f = fl.clone();
    let f2 = Arc::new(move |p, t| f.f2(p, t, s0, k));
    let f = fl.clone();
    let u0 = Arc::new(move |p, t| f.u(p, t));
    let f = fl.clone();
    let phi0 = Arc::new(move |p, t| f.phi(p, t));

    let exact = ExactSolution {
        u: u.clone(),
        u_t,
        grad_u,
        p: pressure,
        phi: phi.clone(),
        phi_t,
        grad_phi,
    };

    // Outer boundary data taken from the exact solution (identically zero for
    // this solution, evaluated anyway).
    let velocity_bc = ["fluid_left", "fluid_right", "fluid_top"]
        .into_iter()
        .map(|l| (l.to_string(), u.clone() as super::VectorFn))
        .collect();
    let head_bc = ["porous_left", "porous_right", "porous_bottom"]
        .into_iter()
        .map(|l| {
            (
                l.to_string(),
                HeadBc::Dirichlet(phi.clone() as super::ScalarFn),
            )
        })
        .collect();

    Scenario {
        name: "manufactured".to_string(),
        geometry: Geometry::RectPair {
            fluid: Rect::new(0.0, 0.0, 1.0, 1.0),
            porous: Rect::new(0.0, -1.0, 1.0, 0.0),
        },
        nu,
        g,
        s0,
        alpha,
        k_base: k,
        low_k: Vec::new(),
        velocity_bc,
        head_bc,
        f1,
        f2,
        u0,
        phi0,
        exact: Some(exact),
        bjs_compensation: true,
        default_final_time: t_final,
        default_dt: 0.25,
        default_h: 0.5,
    }
}

/// The canonical convergence-study parameter set.
pub fn manufactured_default() -> Scenario {
    manufactured(0.01, 1e-3, 0.1, 1.0, 1.0, 1.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_at_t0() {
        let s = manufactured_default();
        let e = s.exact.as_ref().unwrap();
        let p = Vec2::new(0.3, 0.7);
        assert_eq!((e.u)(p, 0.0), Vec2::ZERO);
        assert_eq!((e.phi)(Vec2::new(0.3, -0.4), 0.0), 0.0);
    }

    #[test]
    fn divergence_free_analytically() {
        let s = manufactured_default();
        let e = s.exact.as_ref().unwrap();
        for &(x, y) in &[(0.13, 0.57), (0.71, 0.29), (0.5, 0.5), (0.95, 0.08)] {
            let g = (e.grad_u)(Vec2::new(x, y), 0.8);
            assert!((g[0][0] + g[1][1]).abs() < 1e-15, "div u != 0 at ({x},{y})");
        }
    }

    #[test]
    fn forcing_matches_finite_differences() {
        // f₁ and f₂ against central finite differences of the defining PDEs
        // at random space-time points, 1e-6 relative.
        let s = manufactured_default();
        let e = s.exact.as_ref().unwrap();
        let (nu, s0, k) = (s.nu, s.s0, s.k_base);
        let h = 1e-5;

        let mut state = 0x12345678u64;
        let mut rng = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };

        for _ in 0..20 {
            let x = 0.05 + 0.9 * rng();
            let yf = 0.05 + 0.9 * rng();
            let yp = -0.05 - 0.9 * rng();
            let t = 0.2 + 0.7 * rng();
            let pf = Vec2::new(x, yf);
            let pp = Vec2::new(x, yp);

            // f1 via FD: u_t - nu lap u + (u·grad)u + grad p.
            let u = |p: Vec2, t: f64| (e.u)(p, t);
            let ut = (u(pf, t + h) - u(pf, t - h)) * (0.5 / h);
            let lap = (u(Vec2::new(pf.x + h, pf.y), t)
                + u(Vec2::new(pf.x - h, pf.y), t)
                + u(Vec2::new(pf.x, pf.y + h), t)
                + u(Vec2::new(pf.x, pf.y - h), t)
                - u(pf, t) * 4.0)
                * (1.0 / (h * h));
            let dux =
                (u(Vec2::new(pf.x + h, pf.y), t) - u(Vec2::new(pf.x - h, pf.y), t)) * (0.5 / h);
            let duy =
                (u(Vec2::new(pf.x, pf.y + h), t) - u(Vec2::new(pf.x, pf.y - h), t)) * (0.5 / h);
            let uv = u(pf, t);
            let conv = Vec2::new(uv.x * dux.x + uv.y * duy.x, uv.x * dux.y + uv.y * duy.y);
            let pr = |p: Vec2| (e.p)(p, t);
            let gp = Vec2::new(
                (pr(Vec2::new(pf.x + h, pf.y)) - pr(Vec2::new(pf.x - h, pf.y))) / (2.0 * h),
                (pr(Vec2::new(pf.x, pf.y + h)) - pr(Vec2::new(pf.x, pf.y - h))) / (2.0 * h),
            );
            let fd = ut - lap * nu + conv + gp;
            let cf = (s.f1)(pf, t);
            let scale = fd.norm().max(1e-12);
            assert!(
                (fd - cf).norm() / scale < 1e-6,
                "f1 mismatch at {pf:?} t={t}: fd={fd:?} closed={cf:?}"
            );

            // f2 via FD: s0 phi_t - k lap phi.
            let ph = |p: Vec2, t: f64| (e.phi)(p, t);
            let pt = (ph(pp, t + h) - ph(pp, t - h)) / (2.0 * h);
            let lp = (ph(Vec2::new(pp.x + h, pp.y), t)
                + ph(Vec2::new(pp.x - h, pp.y), t)
                + ph(Vec2::new(pp.x, pp.y + h), t)
                + ph(Vec2::new(pp.x, pp.y - h), t)
                - 4.0 * ph(pp, t))
                / (h * h);
            let fd2 = s0 * pt - k * lp;
            let cf2 = (s.f2)(pp, t);
            // The FD Laplacian carries cancellation noise of order eps/h², so
            // scale by the term magnitudes rather than the (possibly tiny)
            // result.
            let scale2 = (s0 * pt).abs() + (k * lp).abs();
            assert!(
                (fd2 - cf2).abs() / scale2.max(1e-12) < 1e-6,
                "f2 mismatch at {pp:?} t={t}: fd={fd2} closed={cf2}"
            );
        }
    }

    #[test]
    fn boundary_data_vanishes_on_outer_boundaries() {
        let s = manufactured_default();
        let e = s.exact.as_ref().unwrap();
        for i in 0..=10 {
            let s01 = i as f64 / 10.0;
            for p in [
                Vec2::new(0.0, s01),
                Vec2::new(1.0, s01),
                Vec2::new(s01, 1.0),
            ] {
                assert!((e.u)(p, 0.77).norm() < 1e-15);
            }
            for p in [
                Vec2::new(0.0, -s01),
                Vec2::new(1.0, -s01),
                Vec2::new(s01, -1.0),
            ] {
                assert!((e.phi)(p, 0.77).abs() < 1e-15);
            }
        }
    }
}
