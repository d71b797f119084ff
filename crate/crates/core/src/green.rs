//! Green function of the unit ball by a Kelvin image charge.
//!
//! `G(x, xi) = Gamma(|x - xi|) - H(x, xi)` with `Gamma(d) = d^{2-N} / ((N-2) omega_N)`
//! and the regular part
//! `H(x, xi) = Gamma(sqrt(|x|^2 |xi|^2 - 2 x.xi + 1))`, which is harmonic in `x`
//! and symmetric in its arguments.

use crate::constants::sphere_measure_unchecked;
use crate::error::{Error, Result};

/// The unit ball in `R^N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallGeometry {
    pub dim: usize,
    pub radius: f64,
}

impl BallGeometry {
    pub fn unit(dim: usize) -> Result<Self> {
        if dim < 3 {
            return Err(Error::Domain(format!("ball geometry needs N >= 3, got {dim}")));
        }
        Ok(Self { dim, radius: 1.0 })
    }

    fn fundamental(&self, d: f64) -> f64 {
        let n = self.dim as f64;
        d.powf(2.0 - n) / ((n - 2.0) * sphere_measure_unchecked(self.dim))
    }

    fn check_point(&self, p: &[f64], what: &str) -> Result<f64> {
        if p.len() != self.dim {
            return Err(Error::Domain(format!(
                "{what} has {} coordinates, expected {}",
                p.len(),
                self.dim
            )));
        }
        let r2: f64 = p.iter().map(|v| v * v).sum();
        if !(r2 < 1.0) {
            return Err(Error::Domain(format!("{what} must lie in the open unit ball, |{what}|^2 = {r2}")));
        }
        Ok(r2)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Regular part `H(x, xi)`; `x` may also lie on the sphere.
pub fn regular_part(g: &BallGeometry, x: &[f64], xi: &[f64]) -> Result<f64> {
    if x.len() != g.dim {
        return Err(Error::Domain(format!("x has {} coordinates, expected {}", x.len(), g.dim)));
    }
    let x2: f64 = x.iter().map(|v| v * v).sum();
    if x2 > 1.0 + 1e-12 {
        return Err(Error::Domain(format!("x lies outside the closed unit ball, |x|^2 = {x2}")));
    }
    let xi2 = g.check_point(xi, "xi")?;
    let q = x2 * xi2 - 2.0 * dot(x, xi) + 1.0;
    Ok(g.fundamental(q.sqrt()))
}

/// `G(x, xi)`; both points in the open ball, or `x` on the sphere.
pub fn green_ball(g: &BallGeometry, x: &[f64], xi: &[f64]) -> Result<f64> {
    if x.len() != g.dim {
        return Err(Error::Domain(format!("x has {} coordinates, expected {}", x.len(), g.dim)));
    }
    g.check_point(xi, "xi")?;
    let x2: f64 = x.iter().map(|v| v * v).sum();
    if x2 > 1.0 + 1e-12 {
        return Err(Error::Domain(format!("x lies outside the closed unit ball, |x|^2 = {x2}")));
    }
    let d2: f64 = x.iter().zip(xi).map(|(a, b)| (a - b) * (a - b)).sum();
    let d = d2.sqrt();
    if d < 1e-12 {
        return Err(Error::Singularity(format!("|x - xi| = {d} below 1e-12")));
    }
    let xi2: f64 = xi.iter().map(|v| v * v).sum();
    // |x|^2 |xi|^2 - 2 x.xi + 1 = |x - xi|^2 + (1 - |x|^2)(1 - |xi|^2)
    let q = d2 + (1.0 - x2) * (1.0 - xi2);
    Ok(g.fundamental(d) - g.fundamental(q.sqrt()))
}

/// Robin function `H(xi, xi) = Gamma(1 - |xi|^2)`.
pub fn robin_ball(g: &BallGeometry, xi: &[f64]) -> Result<f64> {
    let xi2 = g.check_point(xi, "xi")?;
    Ok(g.fundamental(1.0 - xi2))
}
