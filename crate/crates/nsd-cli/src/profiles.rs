//! Centerline velocity profiles for the scheme-vs-reference comparison:
//! `U₁(0.5, y)` for y ∈ [-1, 1] and `U₂(x, 0.5)` for x ∈ [0, 1] (scaled to
//! the scenario's actual boxes).

use nsdarcy::fem::{PhysicalParams, Spaces};
use nsdarcy::geometry::Vec2;
use nsdarcy::mesh::Mesh;
use nsdarcy::scenario::sample_global_velocity;
use nsdarcy::stepper::State;
use std::io::{self, Write};

pub struct Profile {
    /// Varying coordinate.
    pub coord: Vec<f64>,
    pub sav: Vec<f64>,
    pub reference: Vec<f64>,
}

impl Profile {
    pub fn max_deviation(&self) -> f64 {
        self.sav
            .iter()
            .zip(&self.reference)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_magnitude(&self) -> f64 {
        self.sav
            .iter()
            .chain(&self.reference)
            .map(|v| v.abs())
            .fold(0.0, f64::max)
    }
}

/// `U₁` along the vertical line `x = x_fixed`, `y` spanning both subdomains.
pub fn vertical_profile(
    sav: &State,
    reference: &State,
    mesh: &Mesh,
    spaces: &Spaces,
    params: &PhysicalParams,
    x_fixed: f64,
    y_range: (f64, f64),
    samples: usize,
) -> Profile {
    let mut out = Profile {
        coord: Vec::with_capacity(samples + 1),
        sav: Vec::with_capacity(samples + 1),
        reference: Vec::with_capacity(samples + 1),
    };
    for i in 0..=samples {
        let y = y_range.0 + (y_range.1 - y_range.0) * i as f64 / samples as f64;
        let p = Vec2::new(x_fixed, y);
        let a = sample_global_velocity(sav, mesh, spaces, params, p);
        let b = sample_global_velocity(reference, mesh, spaces, params, p);
        if let (Some(a), Some(b)) = (a, b) {
            out.coord.push(y);
            out.sav.push(a.x);
            out.reference.push(b.x);
        }
    }
    out
}

/// `U₂` along the horizontal line `y = y_fixed`.
pub fn horizontal_profile(
    sav: &State,
    reference: &State,
    mesh: &Mesh,
    spaces: &Spaces,
    params: &PhysicalParams,
    y_fixed: f64,
    x_range: (f64, f64),
    samples: usize,
) -> Profile {
    let mut out = Profile {
        coord: Vec::with_capacity(samples + 1),
        sav: Vec::with_capacity(samples + 1),
        reference: Vec::with_capacity(samples + 1),
    };
    for i in 0..=samples {
        let x = x_range.0 + (x_range.1 - x_range.0) * i as f64 / samples as f64;
        let p = Vec2::new(x, y_fixed);
        let a = sample_global_velocity(sav, mesh, spaces, params, p);
        let b = sample_global_velocity(reference, mesh, spaces, params, p);
        if let (Some(a), Some(b)) = (a, b) {
            out.coord.push(x);
            out.sav.push(a.y);
            out.reference.push(b.y);
        }
    }
    out
}

pub fn write_profile_csv(
    path: &std::path::Path,
    coord_name: &str,
    component: &str,
    profile: &Profile,
) -> io::Result<()> {
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "{coord_name},{component}_sav,{component}_ref")?;
    for i in 0..profile.coord.len() {
        writeln!(
            f,
            "{},{},{}",
            profile.coord[i], profile.sav[i], profile.reference[i]
        )?;
    }
    Ok(())
}
