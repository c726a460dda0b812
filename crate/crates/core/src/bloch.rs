//! Bloch-ball coordinates and the state samples drawn from them.

use std::f64::consts::PI;

use thiserror::Error;

use crate::linalg::{paulis, ComplexMatrix, C64};

const BALL_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BlochError {
    #[error("point ({x}, {y}, {z}) lies outside the Bloch ball")]
    OutsideBall { x: f64, y: f64, z: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochPoint {
    pub const ORIGIN: BlochPoint = BlochPoint { x: 0.0, y: 0.0, z: 0.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        BlochPoint { x, y, z }
    }

    pub fn from_spherical(r: f64, theta: f64, phi: f64) -> Self {
        BlochPoint {
            x: r * theta.sin() * phi.cos(),
            y: r * theta.sin() * phi.sin(),
            z: r * theta.cos(),
        }
    }

    pub fn radius(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// `x,y,z` with full round-trip precision.
    pub fn csv_row(&self) -> String {
        format!("{},{},{}", self.x, self.y, self.z)
    }

    /// Bloch vector `(tr ρX, tr ρY, tr ρZ)` of a single-qubit state.
    pub fn from_density(rho: &ComplexMatrix) -> Self {
        BlochPoint {
            x: (rho * &paulis::x()).trace().re,
            y: (rho * &paulis::y()).trace().re,
            z: (rho * &paulis::z()).trace().re,
        }
    }
}

/// `ρ = ½[[1+z, x−iy], [x+iy, 1−z]]`.
pub fn density_from_point(p: BlochPoint) -> Result<ComplexMatrix, BlochError> {
    if !(p.radius() <= 1.0 + BALL_TOL) {
        return Err(BlochError::OutsideBall { x: p.x, y: p.y, z: p.z });
    }
    Ok(ComplexMatrix::mat2(
        C64::new(0.5 * (1.0 + p.z), 0.0),
        C64::new(0.5 * p.x, -0.5 * p.y),
        C64::new(0.5 * p.x, 0.5 * p.y),
        C64::new(0.5 * (1.0 - p.z), 0.0),
    ))
}

/// Truncated spherical region plus the number of evenly spaced values
/// taken along each coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochGridSpec {
    pub r_t: f64,
    pub theta_t: f64,
    pub phi_t: f64,
    pub n_r: usize,
    pub n_theta: usize,
    pub n_phi: usize,
}

impl Default for BlochGridSpec {
    fn default() -> Self {
        BlochGridSpec { r_t: 1.0, theta_t: PI, phi_t: 2.0 * PI, n_r: 11, n_theta: 11, n_phi: 11 }
    }
}

impl BlochGridSpec {
    /// Full angular range with truncation radius `r_t`.
    pub fn with_radius(r_t: f64) -> Self {
        BlochGridSpec { r_t, ..Default::default() }
    }

    pub fn validate(&self) -> Result<(), BlochError> {
        let bad = |msg: String| Err(BlochError::InvalidGrid(msg));
        if !(0.0..=1.0).contains(&self.r_t) {
            return bad(format!("r_t = {} is outside [0, 1]", self.r_t));
        }
        if !(0.0..=PI + 1e-12).contains(&self.theta_t) {
            return bad(format!("theta_t = {} is outside [0, pi]", self.theta_t));
        }
        if !(0.0..=2.0 * PI + 1e-12).contains(&self.phi_t) {
            return bad(format!("phi_t = {} is outside [0, 2pi]", self.phi_t));
        }
        if self.n_r < 2 || self.n_theta < 2 || self.n_phi < 2 {
            return bad("every axis needs at least 2 points".into());
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n_r * self.n_theta * self.n_phi
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `n` evenly spaced values over `[0, end]`, both endpoints included.
fn inclusive_steps(end: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| end * i as f64 / (n - 1) as f64)
}

/// Every `(r, θ, φ)` combination of the grid axes, `r` outermost and `φ`
/// innermost. Duplicates (all of `r = 0`, both ends of a full `φ` turn)
/// are kept.
pub fn spherical_grid(spec: &BlochGridSpec) -> Result<Vec<BlochPoint>, BlochError> {
    spec.validate()?;
    let mut out = Vec::with_capacity(spec.len());
    for r in inclusive_steps(spec.r_t, spec.n_r) {
        for theta in inclusive_steps(spec.theta_t, spec.n_theta) {
            for phi in inclusive_steps(spec.phi_t, spec.n_phi) {
                out.push(BlochPoint::from_spherical(r, theta, phi));
            }
        }
    }
    Ok(out)
}

/// The `n³` lattice over `[−1, 1]³` restricted to the closed unit ball,
/// in `x`-major order.
pub fn cube_grid(n: usize) -> Result<Vec<BlochPoint>, BlochError> {
    if n < 2 {
        return Err(BlochError::InvalidGrid(format!("cube grid needs n >= 2, got {n}")));
    }
    let axis: Vec<f64> = (0..n).map(|i| -1.0 + 2.0 * i as f64 / (n - 1) as f64).collect();
    let mut out = Vec::new();
    for &x in &axis {
        for &y in &axis {
            for &z in &axis {
                let p = BlochPoint::new(x, y, z);
                if p.radius() <= 1.0 {
                    out.push(p);
                }
            }
        }
    }
    Ok(out)
}
