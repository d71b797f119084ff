//! Angular reduction of the Riesz kernel for radial densities.
//!
//! For `|x| = r` the sphere average of `|x - s w|^{-mu}` only depends on
//! `rho = min(r, s) / max(r, s)` after pulling out `max^{-mu}`. Away from
//! `rho = 1` the reduced integrand is analytic in `cos(theta)` and a single
//! Gauss-Jacobi rule with the `sin^{N-2}` weight is spectrally accurate. Near
//! the diagonal the integrand peaks at `theta = 0` on the scale
//! `theta* = (1 - rho) / sqrt(rho)`, so the interval is cut into dyadic panels
//! towards zero.

use std::f64::consts::PI;

use crate::constants::sphere_measure_unchecked;
use crate::error::{Error, Result};
use crate::quadrature::{gauss_jacobi, gauss_legendre, integrate_rule};

use super::QuadSpec;

/// Relative change between the two panel resolutions that is still accepted.
const PANEL_TOL: f64 = 1e-8;

/// Sphere integral `int_{S^{N-1}} |r e_1 - s w|^{-mu} dsigma(w)`.
pub fn angular_kernel(dim: usize, mu: f64, r: f64, s: f64) -> Result<f64> {
    angular_kernel_with(dim, mu, r, s, &QuadSpec::default())
}

/// [`angular_kernel`] with explicit quadrature resolution.
pub fn angular_kernel_with(dim: usize, mu: f64, r: f64, s: f64, q: &QuadSpec) -> Result<f64> {
    check_args(dim, mu)?;
    if !(r >= 0.0 && s >= 0.0 && r.is_finite() && s.is_finite()) {
        return Err(Error::Domain(format!(
            "radii must be finite and non-negative, got r = {r}, s = {s}"
        )));
    }
    let big = r.max(s);
    if big == 0.0 {
        return Err(Error::Domain("angular kernel undefined at r = s = 0".into()));
    }
    let omega = sphere_measure_unchecked(dim);
    if mu == 0.0 {
        return Ok(omega);
    }
    let rho = r.min(s) / big;
    let scale = big.powf(-mu);
    if rho == 0.0 {
        return Ok(omega * scale);
    }
    Ok(scale * reduced_kernel(dim, mu, rho, q)?)
}

pub(crate) fn check_args(dim: usize, mu: f64) -> Result<()> {
    if dim < 3 {
        return Err(Error::Domain(format!("angular kernel needs N >= 3, got {dim}")));
    }
    let n = dim as f64;
    if !(mu >= 0.0 && mu < n - 1.0) {
        return Err(Error::Domain(format!(
            "angular reduction needs 0 <= mu < N - 1 = {}, got {mu}",
            n - 1.0
        )));
    }
    Ok(())
}

/// `k(rho) = omega_{N-1} int_0^pi (1 + rho^2 - 2 rho cos t)^{-mu/2} sin^{N-2} t dt`
/// for `0 < rho <= 1`.
pub(crate) fn reduced_kernel(dim: usize, mu: f64, rho: f64, q: &QuadSpec) -> Result<f64> {
    let n = dim as f64;
    let omega_sub = sphere_measure_unchecked(dim - 1);
    let gap = 1.0 - rho;
    let theta_star = gap / rho.sqrt();

    // Bernstein-ellipse estimate for the Jacobi rule in x = cos(theta); the
    // nearest singularity sits at x0 = 1 + theta*^2 / 2.
    let x0 = 1.0 + 0.5 * theta_star * theta_star;
    let ellipse = x0 + (x0 * x0 - 1.0).sqrt();
    let nodes = q.angular_nodes + q.angular_nodes % 2;
    if 2.0 * nodes as f64 * ellipse.ln() > 36.0 {
        let ab = 0.5 * (n - 3.0);
        let rule = gauss_jacobi(nodes, ab, ab)?;
        let mut acc = 0.0;
        for &(x, w) in rule.iter() {
            let d = gap * gap + 2.0 * rho * (1.0 - x);
            acc += w * d.powf(-0.5 * mu);
        }
        return Ok(omega_sub * acc);
    }

    let fine = (q.angular_nodes / 8).max(8);
    let fine = fine + fine % 2;
    let coarse = fine / 2 + (fine / 2) % 2;
    let a = panel_sum(dim, mu, rho, theta_star, fine, q.refinement_levels)?;
    let b = panel_sum(dim, mu, rho, theta_star, coarse, q.refinement_levels)?;
    if (a - b).abs() > PANEL_TOL * a.abs() {
        return Err(Error::Quadrature(format!(
            "angular panels disagree at rho = {rho}: {a} vs {b}"
        )));
    }
    Ok(omega_sub * a)
}

fn panel_sum(dim: usize, mu: f64, rho: f64, theta_star: f64, m: usize, levels: usize) -> Result<f64> {
    let n = dim as f64;
    let gap = 1.0 - rho;
    let integrand = |t: f64| {
        let h = (0.5 * t).sin();
        let d = gap * gap + 4.0 * rho * h * h;
        d.powf(-0.5 * mu) * t.sin().powi(dim as i32 - 2)
    };
    let gl = gauss_legendre(m);
    let mut acc = 0.0;
    let mut hi = PI;
    let mut level = 0;
    loop {
        let lo = 0.5 * hi;
        acc += integrate_rule(&gl, lo, hi, integrand);
        hi = lo;
        level += 1;
        if hi <= 0.25 * theta_star {
            acc += integrate_rule(&gl, 0.0, hi, integrand);
            return Ok(acc);
        }
        if level >= levels {
            break;
        }
    }
    // Innermost panel: peel off theta^{N-2-mu}, the shape of the integrand
    // when rho = 1.
    let beta = n - 2.0 - mu;
    let gj = gauss_jacobi(m, 0.0, beta)?;
    let half = 0.5 * hi;
    let mut inner = 0.0;
    for &(x, w) in gj.iter() {
        let t = half * (1.0 + x);
        inner += w * integrand(t) * t.powf(-beta);
    }
    Ok(acc + inner * half.powf(beta + 1.0))
}
