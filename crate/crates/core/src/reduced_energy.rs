//! Reduced energy of one bubble in the pierced unit ball.
//!
//! `Psi(tau, lambda) = m lambda^{2-N} + g(tau) lambda^{N-2}` with
//! `m = (N-2) omega_N B_N H(0,0)` and `g(tau) = M(tau) (1+|tau|^2)^{-(N-2)/2}`,
//! `M(tau) = int |z|^{2-N} (1 + |z - tau|^2)^{-(N+2)/2} dz`. In the variable
//! `mu = lambda^{-(N-2)/2}` this is `Psi* = m mu^2 + g(tau) / mu^2`.

use std::collections::HashMap;

use nalgebra::DMatrix;

use crate::constants::{bubble_mass_a, bubble_mass_b, sphere_measure_unchecked, ProblemParams};
use crate::error::{domain, Result};
use crate::green::{robin_ball, BallGeometry};
use crate::riesz::{riesz_function, QuadSpec};

/// Default bound on `|det Hess_tau Psi*| / g0^N` below which a critical point
/// is reported as degenerate.
pub const DEGENERACY_THRESHOLD: f64 = 1e-8;

/// Finite-difference step in `tau`.
const TAU_STEP: f64 = 1e-3;

fn norm2(tau: &[f64]) -> f64 {
    tau.iter().map(|t| t * t).sum()
}

/// `M(tau)`, the Newtonian potential of `(1+s^2)^{-(N+2)/2}` at distance `|tau|`.
pub fn m_integral(params: &ProblemParams, tau: &[f64], q: &QuadSpec) -> Result<f64> {
    check_tau(params, tau)?;
    m_radial(params.dim, norm2(tau).sqrt(), q)
}

fn m_radial(dim: usize, t: f64, q: &QuadSpec) -> Result<f64> {
    let e = -0.5 * (dim as f64 + 2.0);
    riesz_function(dim, dim as f64 - 2.0, |s| (1.0 + s * s).powf(e), t, q)
}

fn check_tau(params: &ProblemParams, tau: &[f64]) -> Result<()> {
    if tau.len() != params.dim {
        return domain(format!("tau has {} coordinates, expected {}", tau.len(), params.dim));
    }
    if tau.iter().any(|t| !t.is_finite()) {
        return domain("tau must be finite");
    }
    Ok(())
}

/// `g(tau) = M(tau) (1 + |tau|^2)^{-(N-2)/2}`.
pub fn g_of_tau(params: &ProblemParams, tau: &[f64], q: &QuadSpec) -> Result<f64> {
    let m = m_integral(params, tau, q)?;
    Ok(m * (1.0 + norm2(tau)).powf(-0.5 * (params.n() - 2.0)))
}

/// `m` and `g(0)` for the unit ball, plus an overall scale used to test
/// argmin invariance.
#[derive(Debug, Clone)]
pub struct ReducedEnergyModel {
    pub params: ProblemParams,
    pub m: f64,
    pub g0: f64,
    /// Multiplies both `m` and every `g(tau)`.
    pub scale: f64,
    pub domain: BallGeometry,
    pub q: QuadSpec,
}

impl ReducedEnergyModel {
    pub fn unit_ball(params: ProblemParams, q: QuadSpec) -> Result<Self> {
        q.validate()?;
        let domain = BallGeometry::unit(params.dim)?;
        let dim = params.dim;
        let h00 = robin_ball(&domain, &vec![0.0; dim])?;
        let m = (params.n() - 2.0) * sphere_measure_unchecked(dim) * bubble_mass_b(dim)? * h00;
        let g0 = m_radial(dim, 0.0, &q)?;
        Ok(Self { params, m, g0, scale: 1.0, domain, q })
    }

    /// The same model with `(m, g)` replaced by `(c m, c g)`.
    pub fn rescaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return domain(format!("scale must be positive, got {c}"));
        }
        Ok(Self { m: self.m * c, g0: self.g0 * c, scale: self.scale * c, ..self.clone() })
    }

    /// `g(tau)` including the model scale.
    pub fn g(&self, tau: &[f64]) -> Result<f64> {
        if norm2(tau) == 0.0 {
            check_tau(&self.params, tau)?;
            return Ok(self.g0);
        }
        Ok(self.scale * g_of_tau(&self.params, tau, &self.q)?)
    }

    fn g_radial(&self, t2: f64) -> Result<f64> {
        if t2 == 0.0 {
            return Ok(self.g0);
        }
        let m = m_radial(self.params.dim, t2.sqrt(), &self.q)?;
        Ok(self.scale * m * (1.0 + t2).powf(-0.5 * (self.params.n() - 2.0)))
    }
}

/// `Psi(tau, lambda) = m lambda^{2-N} + g(tau) lambda^{N-2}`.
pub fn psi(model: &ReducedEnergyModel, tau: &[f64], lambda: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return domain(format!("lambda must be positive, got {lambda}"));
    }
    let p = model.params.n() - 2.0;
    Ok(model.m * lambda.powf(-p) + model.g(tau)? * lambda.powf(p))
}

/// `Psi*(tau, mu) = m mu^2 + g(tau) / mu^2`.
pub fn psi_star(model: &ReducedEnergyModel, tau: &[f64], mu_var: f64) -> Result<f64> {
    if !(mu_var > 0.0 && mu_var.is_finite()) {
        return domain(format!("mu must be positive, got {mu_var}"));
    }
    let m2 = mu_var * mu_var;
    Ok(model.m * m2 + model.g(tau)? / m2)
}

/// Critical point of `Psi*` at `tau = 0` and its Hessian.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalPointCertificate {
    pub tau_bar: Vec<f64>,
    pub mu_bar: f64,
    pub lambda_bar: f64,
    /// `2m + 6 g0 / mu_bar^4`.
    pub hessian_mu: f64,
    pub hessian_tau: DMatrix<f64>,
    /// `d^2 Psi* / dtau_i dmu` at the critical point.
    pub hessian_mixed: Vec<f64>,
    /// `|grad_tau Psi*|` at the critical point.
    pub gradient_tau: f64,
    /// `det(hessian_tau) / g0^N`, dimensionless.
    pub normalized_determinant: f64,
    pub nondegenerate: bool,
}

pub fn critical_point(model: &ReducedEnergyModel) -> Result<CriticalPointCertificate> {
    critical_point_with_threshold(model, DEGENERACY_THRESHOLD)
}

/// Hessian in `tau` by central differences at `h = 1e-3` and `h/2`
/// combined by Richardson extrapolation.
pub fn critical_point_with_threshold(model: &ReducedEnergyModel, threshold: f64) -> Result<CriticalPointCertificate> {
    let dim = model.params.dim;
    let n = model.params.n();
    if !(model.m > 0.0 && model.g0 > 0.0) {
        return domain("reduced energy needs m > 0 and g0 > 0");
    }
    let mu_bar = (model.g0 / model.m).powf(0.25);
    let lambda_bar = mu_bar.powf(-2.0 / (n - 2.0));
    let hessian_mu = 2.0 * model.m + 6.0 * model.g0 / mu_bar.powi(4);

    // g depends on tau through |tau|^2 only, so values are cached by that key.
    let mut cache: HashMap<u64, f64> = HashMap::new();
    let mut g_at = |tau: &[f64]| -> Result<f64> {
        let t2 = norm2(tau);
        if let Some(v) = cache.get(&t2.to_bits()) {
            return Ok(*v);
        }
        let v = model.g_radial(t2)?;
        cache.insert(t2.to_bits(), v);
        Ok(v)
    };
    let mut shifted = |pairs: &[(usize, f64)]| -> Result<f64> {
        let mut tau = vec![0.0; dim];
        for &(i, d) in pairs {
            tau[i] += d;
        }
        g_at(&tau)
    };

    let mu2 = mu_bar * mu_bar;
    let mut hess = DMatrix::zeros(dim, dim);
    let mut grad = vec![0.0; dim];
    let g0 = model.g0;
    for i in 0..dim {
        for j in i..dim {
            let mut d = [0.0; 2];
            for (k, h) in [TAU_STEP, 0.5 * TAU_STEP].into_iter().enumerate() {
                d[k] = if i == j {
                    (shifted(&[(i, h)])? - 2.0 * g0 + shifted(&[(i, -h)])?) / (h * h)
                } else {
                    (shifted(&[(i, h), (j, h)])? - shifted(&[(i, h), (j, -h)])? - shifted(&[(i, -h), (j, h)])?
                        + shifted(&[(i, -h), (j, -h)])?)
                        / (4.0 * h * h)
                };
            }
            let v = (4.0 * d[1] - d[0]) / 3.0 / mu2;
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
        let h = TAU_STEP;
        grad[i] = (shifted(&[(i, h)])? - shifted(&[(i, -h)])?) / (2.0 * h);
    }
    // d/dmu (g / mu^2) = -2 g / mu^3
    let hessian_mixed: Vec<f64> = grad.iter().map(|g| -2.0 * g / (mu2 * mu_bar)).collect();
    let gradient_tau = grad.iter().map(|g| g * g).sum::<f64>().sqrt() / mu2;
    let normalized_determinant = (hess.clone() * (1.0 / g0)).determinant();
    let nondegenerate = normalized_determinant.abs() > threshold && hessian_mu > 0.0;
    Ok(CriticalPointCertificate {
        tau_bar: vec![0.0; dim],
        mu_bar,
        lambda_bar,
        hessian_mu,
        hessian_tau: hess,
        hessian_mixed,
        gradient_tau,
        normalized_determinant,
        nondegenerate,
    })
}

/// `N(N-2) / (2 A)`, the energy of the bubble family per unit of `Psi`.
pub fn energy_unit(params: &ProblemParams) -> f64 {
    params.n() * (params.n() - 2.0) / (2.0 * params.a_hl())
}

/// Limit energy `c_inf = (1 - 1/(2 mu*)) N(N-2)/(2A) A_N`.
pub fn c_infinity(params: &ProblemParams) -> Result<f64> {
    Ok((1.0 - 1.0 / params.two_mu_star) * energy_unit(params) * bubble_mass_a(params.dim)?)
}

/// `c_inf + N(N-2)/(2A) Psi(tau, lambda) eps^{(N-2)/2}`.
pub fn energy_expansion(model: &ReducedEnergyModel, eps: f64, lambda: f64, tau: &[f64]) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return domain(format!("eps must lie in (0, 1), got {eps}"));
    }
    let p = &model.params;
    Ok(c_infinity(p)? + energy_unit(p) * psi(model, tau, lambda)? * eps.powf(0.5 * (p.n() - 2.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::critical_exponents;
    use approx::assert_relative_eq;

    fn model() -> ReducedEnergyModel {
        ReducedEnergyModel::unit_ball(critical_exponents(5, 0.5).unwrap(), QuadSpec::default()).unwrap()
    }

    #[test]
    fn unit_ball_cancellations() {
        let m = model();
        let b = bubble_mass_b(5).unwrap();
        assert_relative_eq!(m.m, b, max_relative = 1e-14);
        assert_relative_eq!(m.g0, b, max_relative = 1e-9);
        assert_relative_eq!(psi(&m, &[0.0; 5], 1.0).unwrap(), 2.0 * b, max_relative = 1e-9);
        assert_relative_eq!(psi_star(&m, &[0.0; 5], 1.0).unwrap(), 2.0 * b, max_relative = 1e-9);
    }

    #[test]
    fn expansion_constants() {
        let p = critical_exponents(5, 0.5).unwrap();
        assert_relative_eq!(c_infinity(&p).unwrap(), 0.39611209619858079643, max_relative = 1e-12);
        let m = model();
        assert_relative_eq!(
            energy_unit(&p) * psi(&m, &[0.0; 5], 1.0).unwrap(),
            6.290094680964245404,
            max_relative = 1e-9
        );
    }

    #[test]
    fn domain_errors() {
        let m = model();
        assert!(psi(&m, &[0.0; 5], 0.0).is_err());
        assert!(psi_star(&m, &[0.0; 5], -1.0).is_err());
        assert!(m.rescaled(0.0).is_err());
        assert!(energy_expansion(&m, 1.0, 1.0, &[0.0; 5]).is_err());
        assert!(m_integral(&m.params, &[0.0; 4], &m.q).is_err());
    }
}
