//! Discrete radial problem on the pierced ball.
//!
//! Unknowns are nodal values on an annulus grid with `u = 0` at both end
//! nodes. The Riesz potential is the Nystrom sum
//! `V_i = sum_j c_j K(r_i, r_j) p_j` with the hat-exact cell masses `c_j`, so
//! the double integral `sum_i c_i p_i V_i` is an exactly symmetric form and
//! the discrete equation is the exact gradient of the discrete energy:
//! `dE/du_k = (m_k / A) F_k` with `m_k = omega_N c_k`.

use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::bubble::DomainSpec;
use crate::constants::ProblemParams;
use crate::error::{domain, Error, Result};
use crate::riesz::{angular_kernel_with, riesz_radial, QuadSpec, RadialField, RadialGrid};

use super::laplacian::{assemble_radial_laplacian, RadialLaplacian};

/// `A riesz_radial(u^{2 mu*}) u^{2 mu* - 1}` on the grid of `u`, integrating
/// over the grid span only.
pub fn nonlocal_force(u: &RadialField, params: &ProblemParams, q: &QuadSpec) -> Result<RadialField> {
    check_nonnegative(&u.values)?;
    let qs = params.two_mu_star;
    let density = u.map(|v| v.powf(qs))?;
    let pot = riesz_radial(&density, params.mu, q)?;
    let values = pot
        .values
        .iter()
        .zip(&u.values)
        .map(|(v, w)| params.a_hl() * v * w.powf(qs - 1.0))
        .collect();
    RadialField::new(u.grid.clone(), values)
}

fn check_nonnegative(values: &[f64]) -> Result<()> {
    if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
        return Err(Error::NegativeInput(format!("u = {v} at node {i}")));
    }
    Ok(())
}

/// Operators of the radial problem on one annulus grid.
#[derive(Debug, Clone)]
pub struct DiscreteProblem {
    pub params: ProblemParams,
    pub domain: DomainSpec,
    grid: Arc<RadialGrid>,
    lap: RadialLaplacian,
    /// `K(r_i, r_j) c_j`, row-major.
    kc: DMatrix<f64>,
}

impl DiscreteProblem {
    /// Log-spaced annulus grid on `[eps, 1]` with `q.radial_nodes` nodes.
    pub fn new(domain: &DomainSpec, params: &ProblemParams, q: &QuadSpec) -> Result<Self> {
        domain.validate()?;
        q.validate()?;
        let grid = Arc::new(RadialGrid::annulus(params.dim, domain.hole_radius, domain.outer_radius, q.radial_nodes)?);
        Self::on_grid(domain, params, grid, q)
    }

    pub fn on_grid(d: &DomainSpec, params: &ProblemParams, grid: Arc<RadialGrid>, q: &QuadSpec) -> Result<Self> {
        params.require_solver_regime()?;
        d.validate()?;
        if grid.has_core() || grid.is_unbounded() || grid.dim() != params.dim {
            return domain("solver needs an annulus grid in the problem dimension");
        }
        let tol = 1e-12;
        if (grid.inner() - d.hole_radius).abs() > tol * d.hole_radius || (grid.outer() - d.outer_radius).abs() > tol
        {
            return domain(format!(
                "grid spans [{}, {}] but the domain is [{}, {}]",
                grid.inner(),
                grid.outer(),
                d.hole_radius,
                d.outer_radius
            ));
        }
        let lap = assemble_radial_laplacian(&grid)?;
        let n = grid.len();
        let nodes = grid.nodes();
        let cells = grid.cells();
        let dim = params.dim;
        let mu = params.mu;
        // Upper triangle of K, then mirrored.
        let upper: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|i| (i..n).map(|j| angular_kernel_with(dim, mu, nodes[i], nodes[j], q)).collect())
            .collect::<Result<_>>()?;
        let mut kc = DMatrix::zeros(n, n);
        for (i, row) in upper.iter().enumerate() {
            for (k, &v) in row.iter().enumerate() {
                let j = i + k;
                kc[(i, j)] = v * cells[j];
                kc[(j, i)] = v * cells[i];
            }
        }
        Ok(Self { params: *params, domain: *d, grid, lap, kc })
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn laplacian(&self) -> &RadialLaplacian {
        &self.lap
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    fn check(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.len() {
            return domain(format!("field has {} values, grid {}", u.len(), self.len()));
        }
        Ok(())
    }

    /// `V = K C p` with `p = u_+^{2 mu*}`.
    pub fn potential(&self, u: &[f64]) -> Vec<f64> {
        let qs = self.params.two_mu_star;
        let p: Vec<f64> = u.iter().map(|v| v.max(0.0).powf(qs)).collect();
        (&self.kc * nalgebra::DVector::from_vec(p)).data.into()
    }

    /// `F(u) = -Delta_h u - A V u_+^{2 mu* - 1}` at every node; end entries are 0.
    pub fn residual(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.check(u)?;
        let n = self.len();
        let qs = self.params.two_mu_star;
        let a = self.params.a_hl();
        let v = self.potential(u);
        let lap = self.lap.apply_interior(u);
        let mut f = vec![0.0; n];
        for i in 1..n - 1 {
            f[i] = lap[i - 1] - a * v[i] * u[i].max(0.0).powf(qs - 1.0);
        }
        Ok(f)
    }

    /// `sqrt(sum m_i F_i^2)` over interior nodes.
    pub fn residual_norm(&self, f: &[f64]) -> f64 {
        f.iter().zip(self.lap.mass()).map(|(v, m)| m * v * v).sum::<f64>().sqrt()
    }

    /// Jacobian of `F` restricted to interior nodes.
    pub fn jacobian(&self, u: &[f64]) -> Result<DMatrix<f64>> {
        self.check(u)?;
        let n = self.len();
        let m = n - 2;
        let qs = self.params.two_mu_star;
        let a = self.params.a_hl();
        let v = self.potential(u);
        let mass = self.lap.mass();
        let edges = self.lap.edges();
        let up: Vec<f64> = u.iter().map(|x| x.max(0.0)).collect();
        let mut j = DMatrix::zeros(m, m);
        for k in 0..m {
            let i = k + 1;
            let left = a * up[i].powf(qs - 1.0);
            for l in 0..m {
                let s = l + 1;
                j[(k, l)] = -left * self.kc[(i, s)] * qs * up[s].powf(qs - 1.0);
            }
            j[(k, k)] += (edges[i - 1] + edges[i]) / mass[i] - a * (qs - 1.0) * up[i].powf(qs - 2.0) * v[i];
            if k > 0 {
                j[(k, k - 1)] -= edges[i - 1] / mass[i];
            }
            if k + 1 < m {
                j[(k, k + 1)] -= edges[i] / mass[i];
            }
        }
        Ok(j)
    }

    /// `(1/A) [ u^T S u / 2 - A / (2 2mu*) sum_i m_i p_i V_i ]`.
    pub fn energy(&self, u: &[f64]) -> Result<f64> {
        self.check(u)?;
        let qs = self.params.two_mu_star;
        let a = self.params.a_hl();
        let v = self.potential(u);
        let pair: f64 = u
            .iter()
            .zip(&v)
            .zip(self.lap.mass())
            .map(|((x, w), m)| m * x.max(0.0).powf(qs) * w)
            .sum();
        Ok((0.5 * self.lap.dirichlet_energy(u) - a / (2.0 * qs) * pair) / a)
    }

    /// `sum_k dE/du_k v_k = (1/A) sum_k m_k F_k v_k`; `v` must vanish at the end nodes.
    pub fn energy_derivative(&self, u: &[f64], dir: &[f64]) -> Result<f64> {
        self.check(dir)?;
        let f = self.residual(u)?;
        Ok(f.iter().zip(dir).zip(self.lap.mass()).map(|((a, b), m)| m * a * b).sum::<f64>() / self.params.a_hl())
    }
}

/// Discrete energy of `u` on its own annulus grid.
pub fn energy_of(u: &RadialField, params: &ProblemParams, q: &QuadSpec) -> Result<f64> {
    let g = &u.grid;
    let d = DomainSpec { outer_radius: g.outer(), hole_radius: g.inner() };
    let n = u.len();
    let scale = u.values.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
    if u.values[0].abs() > 1e-14 * scale || u.values[n - 1].abs() > 1e-14 * scale {
        return Err(Error::BoundaryCondition("energy needs u = 0 at both end nodes".into()));
    }
    if u.values.iter().all(|&v| v == 0.0) {
        return Ok(0.0);
    }
    DiscreteProblem::on_grid(&d, params, g.clone(), q)?.energy(&u.values)
}
