//! Aubin-Talenti bubbles `U_{lambda,xi}(x) = lambda^{(N-2)/2} (1 + lambda^2 |x - xi|^2)^{-(N-2)/2}`,
//! their derivative fields and the first-order projection onto the pierced ball.

use std::sync::Arc;

use crate::constants::{sphere_measure_unchecked, ProblemParams};
use crate::error::{domain, Error, Result};
use crate::green::{regular_part, BallGeometry};
use crate::riesz::{QuadSpec, RadialField, RadialGrid, RieszQuadrature};

/// Concentration and centre of one bubble.
#[derive(Debug, Clone, PartialEq)]
pub struct BubbleParams {
    pub lambda: f64,
    pub xi: Vec<f64>,
    /// Rescaled centre, `xi = tau / lambda`, when the bubble comes from the ansatz.
    pub tau: Option<Vec<f64>>,
}

impl BubbleParams {
    pub fn new(lambda: f64, xi: Vec<f64>) -> Result<Self> {
        let p = Self { lambda, xi, tau: None };
        p.validate()?;
        Ok(p)
    }

    pub fn centered(dim: usize, lambda: f64) -> Result<Self> {
        Self::new(lambda, vec![0.0; dim])
    }

    /// Bubble centred at `tau / lambda`.
    pub fn with_tau(lambda: f64, tau: Vec<f64>) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return domain(format!("lambda must be positive, got {lambda}"));
        }
        let xi = tau.iter().map(|t| t / lambda).collect();
        let p = Self { lambda, xi, tau: Some(tau) };
        p.validate()?;
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.xi.len()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return domain(format!("lambda must be positive, got {}", self.lambda));
        }
        if self.xi.is_empty() || self.xi.iter().any(|v| !v.is_finite()) {
            return domain("xi must be a finite point");
        }
        if let Some(tau) = &self.tau {
            if tau.len() != self.xi.len() {
                return domain("tau and xi differ in dimension");
            }
            for (t, x) in tau.iter().zip(&self.xi) {
                if (x * self.lambda - t).abs() > 1e-12 * t.abs().max(1.0) {
                    return domain(format!("xi * lambda = {} does not match tau = {t}", x * self.lambda));
                }
            }
        }
        Ok(())
    }

    /// `tau = lambda xi`, from the stored value when present.
    pub fn tau(&self) -> Vec<f64> {
        self.tau
            .clone()
            .unwrap_or_else(|| self.xi.iter().map(|x| x * self.lambda).collect())
    }

    fn offset2(&self, x: &[f64]) -> Result<f64> {
        self.validate()?;
        if x.len() != self.dim() {
            return domain(format!("point has {} coordinates, bubble lives in R^{}", x.len(), self.dim()));
        }
        Ok(x.iter().zip(&self.xi).map(|(a, b)| (a - b) * (a - b)).sum())
    }
}

/// The pierced unit ball `B_1 \ B_eps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainSpec {
    pub outer_radius: f64,
    pub hole_radius: f64,
}

impl DomainSpec {
    pub fn pierced_unit_ball(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return domain(format!("hole radius must lie in (0, 1), got {eps}"));
        }
        Ok(Self { outer_radius: 1.0, hole_radius: eps })
    }

    pub fn validate(&self) -> Result<()> {
        if self.outer_radius != 1.0 {
            return domain("only the unit ball is supported");
        }
        if !(self.hole_radius > 0.0 && self.hole_radius < self.outer_radius) {
            return domain(format!("hole radius must lie in (0, 1), got {}", self.hole_radius));
        }
        Ok(())
    }

    fn contains(&self, r: f64) -> bool {
        let slack = 1e-12;
        r >= self.hole_radius * (1.0 - slack) && r <= self.outer_radius * (1.0 + slack)
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// `U_{lambda,xi}(x)`.
pub fn bubble_eval(p: &BubbleParams, x: &[f64]) -> Result<f64> {
    let d2 = p.offset2(x)?;
    Ok(bubble_profile(p.dim(), p.lambda, d2))
}

fn bubble_profile(dim: usize, lambda: f64, d2: f64) -> f64 {
    let a = 0.5 * (dim as f64 - 2.0);
    lambda.powf(a) * (1.0 + lambda * lambda * d2).powf(-a)
}

/// Radial profile of the centred bubble.
pub fn bubble_radial(dim: usize, lambda: f64, r: f64) -> f64 {
    bubble_profile(dim, lambda, r * r)
}

/// `Z^0 = dU/dlambda` for `h = 0`, `Z^j = dU/dxi_j` for `h = j`.
pub fn z_field(p: &BubbleParams, x: &[f64], h: usize) -> Result<f64> {
    let dim = p.dim();
    if h > dim {
        return Err(Error::Index { index: h, max: dim });
    }
    let d2 = p.offset2(x)?;
    let n = dim as f64;
    let l = p.lambda;
    let q = 1.0 + l * l * d2;
    if h == 0 {
        Ok(0.5 * (n - 2.0) * l.powf(0.5 * (n - 4.0)) * (1.0 - l * l * d2) * q.powf(-0.5 * n))
    } else {
        Ok((n - 2.0) * l.powf(0.5 * (n + 2.0)) * (x[h - 1] - p.xi[h - 1]) * q.powf(-0.5 * n))
    }
}

/// Radial `Z^0` of the centred bubble.
pub fn z0_radial(dim: usize, lambda: f64, r: f64) -> f64 {
    let n = dim as f64;
    let s = lambda * lambda * r * r;
    0.5 * (n - 2.0) * lambda.powf(0.5 * (n - 4.0)) * (1.0 - s) * (1.0 + s).powf(-0.5 * n)
}

/// `-Delta U` in closed form: `N(N-2) lambda^{(N+2)/2} (1 + lambda^2 |x-xi|^2)^{-(N+2)/2}`.
pub fn bubble_laplacian(p: &BubbleParams, x: &[f64]) -> Result<f64> {
    let d2 = p.offset2(x)?;
    let n = p.dim() as f64;
    let l = p.lambda;
    Ok(n * (n - 2.0) * l.powf(0.5 * (n + 2.0)) * (1.0 + l * l * d2).powf(-0.5 * (n + 2.0)))
}

/// `U - (N-2) omega_N lambda^{-(N-2)/2} H(x, xi) - lambda^{(N-2)/2} (1+|tau|^2)^{-(N-2)/2} eps^{N-2} |x|^{2-N}`.
pub fn projected_bubble_first_order(p: &BubbleParams, d: &DomainSpec, x: &[f64]) -> Result<f64> {
    d.validate()?;
    let u = bubble_eval(p, x)?;
    let r = norm(x);
    if !d.contains(r) {
        return domain(format!("|x| = {r} outside the annulus [{}, 1]", d.hole_radius));
    }
    let dim = p.dim();
    let n = dim as f64;
    let half = 0.5 * (n - 2.0);
    let ball = BallGeometry::unit(dim)?;
    let h = regular_part(&ball, x, &p.xi)?;
    let tau2: f64 = p.tau().iter().map(|t| t * t).sum();
    let hole = p.lambda.powf(half) * (1.0 + tau2).powf(-half) * (d.hole_radius / r).powf(n - 2.0);
    Ok(u - (n - 2.0) * sphere_measure_unchecked(dim) * p.lambda.powf(-half) * h - hole)
}

/// Exact projection of the centred bubble onto the pierced ball:
/// `U - a - b r^{2-N}` vanishing at `r = eps` and `r = 1`.
pub fn projected_bubble_radial(dim: usize, lambda: f64, eps: f64, r: f64) -> Result<f64> {
    if dim < 3 || !(lambda > 0.0) {
        return domain(format!("need N >= 3 and lambda > 0, got N = {dim}, lambda = {lambda}"));
    }
    let d = DomainSpec::pierced_unit_ball(eps)?;
    if !d.contains(r) {
        return domain(format!("r = {r} outside the annulus [{eps}, 1]"));
    }
    let p = 2.0 - dim as f64;
    let (u0, u1) = (bubble_radial(dim, lambda, eps), bubble_radial(dim, lambda, 1.0));
    // a + b eps^p = u0, a + b = u1
    let b = (u0 - u1) / (eps.powf(p) - 1.0);
    let a = u1 - b;
    Ok(bubble_radial(dim, lambda, r) - a - b * r.powf(p))
}

/// `lambda^{-(N-2)/2} [eps^{N-2} (1 + eps lambda^{N-1}) / |x|^{N-2} + lambda^{-2} + (eps lambda)^{N-2}]`.
pub fn remainder_bound(p: &BubbleParams, d: &DomainSpec, x: &[f64]) -> Result<f64> {
    d.validate()?;
    p.offset2(x)?;
    let n = p.dim() as f64;
    let (l, e) = (p.lambda, d.hole_radius);
    let r = norm(x);
    let bracket = e.powf(n - 2.0) * (1.0 + e * l.powf(n - 1.0)) / r.powf(n - 2.0)
        + l.powf(-2.0)
        + (e * l).powf(n - 2.0);
    Ok(l.powf(-0.5 * (n - 2.0)) * bracket)
}

/// The two sides of the limit equation at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualTerms {
    /// `-Delta U`.
    pub laplacian: f64,
    /// `A (|.|^{-mu} * U^{2 mu*}) U^{2 mu* - 1}`.
    pub nonlocal: f64,
}

impl ResidualTerms {
    pub fn residual(&self) -> f64 {
        self.laplacian - self.nonlocal
    }

    /// Residual relative to the larger of the two terms.
    pub fn relative(&self) -> f64 {
        self.residual().abs() / self.laplacian.abs().max(self.nonlocal.abs())
    }
}

/// `-Delta U - A (|.|^{-mu} * U^{2 mu*}) U^{2 mu* - 1}` at `x`, centred bubbles only.
pub fn bubble_residual(params: &ProblemParams, p: &BubbleParams, x: &[f64], q: &QuadSpec) -> Result<f64> {
    Ok(bubble_residual_terms(params, p, x, q)?.residual())
}

/// Both terms of [`bubble_residual`]. The convolution runs on a free-space
/// grid from `1e-3 / lambda` to `truncation_radius / lambda`.
pub fn bubble_residual_terms(
    params: &ProblemParams,
    p: &BubbleParams,
    x: &[f64],
    q: &QuadSpec,
) -> Result<ResidualTerms> {
    if p.dim() != params.dim {
        return domain(format!("bubble in R^{} but problem in R^{}", p.dim(), params.dim));
    }
    if p.xi.iter().any(|&v| v != 0.0) {
        return domain("the residual is only available for bubbles centred at the origin");
    }
    q.validate()?;
    let laplacian = bubble_laplacian(p, x)?;
    let r = norm(x);
    let l = p.lambda;
    let grid = Arc::new(RadialGrid::free_space(params.dim, 1e-3 / l, q.truncation_radius / l, q.radial_nodes)?);
    let density = RadialField::from_fn(grid, |s| bubble_radial(params.dim, l, s).powf(params.two_mu_star))?;
    let conv = RieszQuadrature::potential_once(&density, params.mu, q, r)?;
    let u = bubble_radial(params.dim, l, r);
    Ok(ResidualTerms { laplacian, nonlocal: params.a_hl() * conv * u.powf(params.two_mu_star - 1.0) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn plug_in_values() {
        let p = BubbleParams::centered(5, 1.0).unwrap();
        assert_eq!(bubble_eval(&p, &[0.0; 5]).unwrap(), 1.0);
        assert_relative_eq!(bubble_eval(&p, &[0.0, 0.0, 1.0, 0.0, 0.0]).unwrap(), 2f64.powf(-1.5), max_relative = 1e-15);
        let p = BubbleParams::new(4.0, vec![0.1, 0.2, 0.0, 0.0, -0.1]).unwrap();
        assert_relative_eq!(bubble_eval(&p, &p.xi.clone()).unwrap(), 8.0, max_relative = 1e-15);
        assert_eq!(z_field(&p, &p.xi.clone(), 3).unwrap(), 0.0);
        let p = BubbleParams::centered(5, 1.0).unwrap();
        assert_eq!(z_field(&p, &[0.0; 5], 0).unwrap(), 1.5);
    }

    #[test]
    fn invalid_params() {
        assert!(BubbleParams::centered(5, 0.0).is_err());
        assert!(BubbleParams::centered(5, f64::NAN).is_err());
        let p = BubbleParams::centered(5, 1.0).unwrap();
        assert!(matches!(z_field(&p, &[0.0; 5], 6), Err(Error::Index { index: 6, max: 5 })));
        assert!(bubble_eval(&p, &[0.0; 4]).is_err());
        let bad = BubbleParams { lambda: 2.0, xi: vec![0.1; 5], tau: Some(vec![0.1; 5]) };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn with_tau_sets_centre() {
        let p = BubbleParams::with_tau(10.0, vec![0.5, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert_relative_eq!(p.xi[0], 0.05, max_relative = 1e-15);
        assert_eq!(p.tau()[0], 0.5);
    }

    #[test]
    fn remainder_bound_plug_in() {
        let p = BubbleParams::centered(5, 10.0).unwrap();
        let d = DomainSpec::pierced_unit_ball(0.01).unwrap();
        let got = remainder_bound(&p, &d, &[0.5, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let want = 10f64.powf(-1.5) * (1e-6 * (1.0 + 0.01 * 1e4) / 0.125 + 0.01 + 1e-3);
        assert_relative_eq!(got, want, max_relative = 1e-14);
    }

    #[test]
    fn exact_projection_vanishes_on_both_spheres() {
        for r in [0.05, 1.0] {
            assert!(projected_bubble_radial(5, 4.5, 0.05, r).unwrap().abs() < 1e-14);
        }
        assert!(projected_bubble_radial(5, 4.5, 0.05, 0.01).is_err());
    }

    #[test]
    fn first_order_projection_outside_annulus_fails() {
        let p = BubbleParams::centered(5, 4.0).unwrap();
        let d = DomainSpec::pierced_unit_ball(0.05).unwrap();
        assert!(projected_bubble_first_order(&p, &d, &[0.01, 0.0, 0.0, 0.0, 0.0]).is_err());
        assert!(projected_bubble_first_order(&p, &d, &[1.1, 0.0, 0.0, 0.0, 0.0]).is_err());
    }
}
