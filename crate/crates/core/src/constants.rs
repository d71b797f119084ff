//! Closed-form dimensional constants.
//!
//! Everything here is a pure function of the dimension `N` and the Riesz
//! exponent `mu`. Gamma and Beta values come from `statrs` (Lanczos
//! approximation, roughly 15 significant digits). `mu = 0` is accepted
//! throughout so that the local (Sobolev) limits can be evaluated.

use std::f64::consts::PI;

use statrs::function::beta::beta;
use statrs::function::gamma::{gamma, ln_gamma};

use crate::error::{domain, Result};

/// Dimension, Riesz exponent and the two critical exponents derived from them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemParams {
    pub dim: usize,
    pub mu: f64,
    /// Sobolev exponent `2N/(N-2)`.
    pub two_star: f64,
    /// Upper HLS-critical exponent `(2N-mu)/(N-2)`.
    pub two_mu_star: f64,
}

impl ProblemParams {
    pub fn new(dim: usize, mu: f64) -> Result<Self> {
        critical_exponents(dim, mu)
    }

    /// Checks the stricter regime required by the solver-facing operations:
    /// `N >= 5` and `0 < mu < 4`.
    pub fn require_solver_regime(&self) -> Result<()> {
        if self.dim < 5 {
            return domain(format!("solver requires N >= 5, got N = {}", self.dim));
        }
        if !(self.mu > 0.0 && self.mu < 4.0) {
            return domain(format!("solver requires 0 < mu < 4, got mu = {}", self.mu));
        }
        Ok(())
    }

    pub fn n(&self) -> f64 {
        self.dim as f64
    }

    pub fn sphere_measure(&self) -> f64 {
        sphere_measure_unchecked(self.dim)
    }

    pub fn a_hl(&self) -> f64 {
        a_hl_unchecked(self.dim, self.mu)
    }
}

pub fn critical_exponents(dim: usize, mu: f64) -> Result<ProblemParams> {
    if dim < 3 {
        return domain(format!("N must be at least 3, got {dim}"));
    }
    let n = dim as f64;
    if !(mu >= 0.0 && mu < n) {
        return domain(format!("mu must lie in [0, N) = [0, {n}), got {mu}"));
    }
    Ok(ProblemParams {
        dim,
        mu,
        two_star: 2.0 * n / (n - 2.0),
        two_mu_star: (2.0 * n - mu) / (n - 2.0),
    })
}

/// Surface measure of the unit sphere `S^{N-1}`, `2 pi^{N/2} / Gamma(N/2)`.
pub fn sphere_measure(dim: usize) -> Result<f64> {
    if dim < 2 {
        return domain(format!("sphere measure needs N >= 2, got {dim}"));
    }
    Ok(sphere_measure_unchecked(dim))
}

pub(crate) fn sphere_measure_unchecked(dim: usize) -> f64 {
    let n = dim as f64;
    2.0 * PI.powf(0.5 * n) / gamma(0.5 * n)
}

/// Sharp Hardy-Littlewood-Sobolev constant `C(N, mu)`.
pub fn hls_sharp_constant(dim: usize, mu: f64) -> Result<f64> {
    let p = critical_exponents(dim, mu)?;
    Ok(hls_unchecked(p.dim, p.mu))
}

fn hls_unchecked(dim: usize, mu: f64) -> f64 {
    let n = dim as f64;
    let log_ratio = ln_gamma(n) - ln_gamma(0.5 * n);
    let log_c = 0.5 * mu * PI.ln() + ln_gamma(0.5 * (n - mu)) - ln_gamma(n - 0.5 * mu)
        + log_ratio * (n - mu) / n;
    log_c.exp()
}

/// Aubin-Talenti value of the best Sobolev constant,
/// `S = N(N-2) pi (Gamma(N/2)/Gamma(N))^{2/N}`.
pub fn sobolev_constant(dim: usize) -> Result<f64> {
    if dim < 3 {
        return domain(format!("Sobolev constant needs N >= 3, got {dim}"));
    }
    Ok(sobolev_unchecked(dim))
}

fn sobolev_unchecked(dim: usize) -> f64 {
    let n = dim as f64;
    n * (n - 2.0) * PI * ((ln_gamma(0.5 * n) - ln_gamma(n)) * 2.0 / n).exp()
}

/// `A_{H,L} = (N(N-2))^{(N-mu+2)/2} S^{(mu-N)/2} / C(N, mu)`, the constant that
/// makes the unnormalized bubble solve the nonlocal limit equation.
pub fn a_hl(dim: usize, mu: f64) -> Result<f64> {
    let p = critical_exponents(dim, mu)?;
    Ok(a_hl_unchecked(p.dim, p.mu))
}

fn a_hl_unchecked(dim: usize, mu: f64) -> f64 {
    let n = dim as f64;
    let nn2 = n * (n - 2.0);
    let log_a = 0.5 * (n - mu + 2.0) * nn2.ln() + 0.5 * (mu - n) * sobolev_unchecked(dim).ln()
        - hls_unchecked(dim, mu).ln();
    log_a.exp()
}

/// `A_N = int U_{1,0}^{2*}`, closed form `omega_N B(N/2, N/2) / 2`.
pub fn bubble_mass_a(dim: usize) -> Result<f64> {
    if dim < 3 {
        return domain(format!("A_N needs N >= 3, got {dim}"));
    }
    let n = dim as f64;
    Ok(sphere_measure_unchecked(dim) * 0.5 * beta(0.5 * n, 0.5 * n))
}

/// `B_N = int U_{1,0}^{2*-1}`, closed form `omega_N / N`.
pub fn bubble_mass_b(dim: usize) -> Result<f64> {
    if dim < 3 {
        return domain(format!("B_N needs N >= 3, got {dim}"));
    }
    Ok(sphere_measure_unchecked(dim) / dim as f64)
}
