//! Radial Laplacian on log-spaced grids.
//!
//! Piecewise-linear elements in `t = ln r` with the exact `r^{N-2}` stiffness
//! weight and lumped mass. On a uniform `t` grid this is the conservative
//! three-point scheme, second order, and `S` is symmetric so `M^{-1} S` is
//! self-adjoint in the lumped-mass inner product.

use std::sync::Arc;

use crate::constants::sphere_measure_unchecked;
use crate::error::{Error, Result};
use crate::riesz::RadialGrid;

#[derive(Debug, Clone)]
pub struct RadialLaplacian {
    grid: Arc<RadialGrid>,
    /// `S_{i,i+1}` coupling of edge `i`, stored positive: `omega int e^{(N-2)t} dt / h^2`.
    edges: Vec<f64>,
    /// Lumped mass `omega_N c_i`.
    mass: Vec<f64>,
}

/// Builds the discrete `-Delta` with Dirichlet rows at both end nodes.
pub fn assemble_radial_laplacian(grid: &Arc<RadialGrid>) -> Result<RadialLaplacian> {
    let n = grid.len();
    let h = grid.log_step();
    if n < 3 || !(h > 0.0 && h.is_finite()) {
        return Err(Error::Assembly(format!("degenerate grid: {n} nodes, log step {h}")));
    }
    let dim = grid.dim();
    let omega = sphere_measure_unchecked(dim);
    let p = dim as f64 - 2.0;
    let factor = ((p * h).exp() - 1.0) / p;
    let edges = grid.nodes()[..n - 1]
        .iter()
        .map(|r| omega * r.powf(p) * factor / (h * h))
        .collect();
    let mass: Vec<f64> = grid.cells().iter().map(|c| omega * c).collect();
    if mass.iter().any(|&m| !(m > 0.0)) {
        return Err(Error::Assembly("non-positive lumped mass".into()));
    }
    Ok(RadialLaplacian { grid: grid.clone(), edges, mass })
}

impl RadialLaplacian {
    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    /// `(S u)_i` at interior nodes `1..n-1`, boundary values taken as given.
    pub fn stiffness_interior(&self, u: &[f64]) -> Vec<f64> {
        let n = self.len();
        (1..n - 1)
            .map(|i| self.edges[i - 1] * (u[i] - u[i - 1]) + self.edges[i] * (u[i] - u[i + 1]))
            .collect()
    }

    /// `-Delta_h u` at interior nodes without checking boundary data.
    pub fn apply_interior(&self, u: &[f64]) -> Vec<f64> {
        self.stiffness_interior(u)
            .into_iter()
            .zip(&self.mass[1..])
            .map(|(s, m)| s / m)
            .collect()
    }

    /// `-Delta_h u` at interior nodes for `u` with homogeneous Dirichlet data.
    pub fn apply(&self, u: &[f64]) -> Result<Vec<f64>> {
        let n = self.len();
        if u.len() != n {
            return Err(Error::Domain(format!("field has {} values, grid {n}", u.len())));
        }
        let scale = u.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
        for (i, v) in [(0, u[0]), (n - 1, u[n - 1])] {
            if v.abs() > 1e-14 * scale {
                return Err(Error::BoundaryCondition(format!(
                    "u = {v} at boundary node {i}, expected 0"
                )));
            }
        }
        Ok(self.apply_interior(u))
    }

    /// Dirichlet energy `int |u'|^2 dx = u^T S u`.
    pub fn dirichlet_energy(&self, u: &[f64]) -> f64 {
        self.edges
            .iter()
            .enumerate()
            .map(|(i, a)| a * (u[i + 1] - u[i]).powi(2))
            .sum()
    }

    /// Solves `-Delta_h v = f` at interior nodes with `v = left, right` at
    /// the two ends. `f` holds one value per node; its end entries are unused.
    pub fn solve_dirichlet(&self, f: &[f64], left: f64, right: f64) -> Result<Vec<f64>> {
        let n = self.len();
        let m = n - 2;
        let mut diag = vec![0.0; m];
        let mut off = vec![0.0; m.saturating_sub(1)];
        let mut rhs = vec![0.0; m];
        for k in 0..m {
            let i = k + 1;
            diag[k] = self.edges[i - 1] + self.edges[i];
            rhs[k] = self.mass[i] * f[i];
            if k + 1 < m {
                off[k] = -self.edges[i];
            }
        }
        rhs[0] += self.edges[0] * left;
        rhs[m - 1] += self.edges[n - 2] * right;
        let inner = thomas(&off, &diag, &off, &rhs)?;
        let mut v = Vec::with_capacity(n);
        v.push(left);
        v.extend(inner);
        v.push(right);
        Ok(v)
    }
}

/// Tridiagonal solve with sub-diagonal `a`, diagonal `b`, super-diagonal `c`.
pub(crate) fn thomas(a: &[f64], b: &[f64], c: &[f64], d: &[f64]) -> Result<Vec<f64>> {
    let m = b.len();
    let mut cp = vec![0.0; m];
    let mut dp = vec![0.0; m];
    let mut denom = b[0];
    for k in 0..m {
        if k > 0 {
            denom = b[k] - a[k - 1] * cp[k - 1];
        }
        if denom.abs() < 1e-300 || !denom.is_finite() {
            return Err(Error::LinearSolve(format!("zero pivot at row {k}")));
        }
        cp[k] = if k + 1 < m { c[k] / denom } else { 0.0 };
        dp[k] = (d[k] - if k > 0 { a[k - 1] * dp[k - 1] } else { 0.0 }) / denom;
    }
    for k in (0..m.saturating_sub(1)).rev() {
        dp[k] -= cp[k] * dp[k + 1];
    }
    Ok(dp)
}

/// Fourth-order `-Delta u` at nodes `2..n-2` of a log grid:
/// `-e^{-2t} (u_tt + (N-2) u_t)` with five-point central stencils.
pub fn laplacian_fourth_order(grid: &RadialGrid, u: &[f64]) -> Vec<f64> {
    let n = grid.len();
    let h = grid.log_step();
    let p = grid.dim() as f64 - 2.0;
    (2..n - 2)
        .map(|i| {
            let utt = (-u[i - 2] + 16.0 * u[i - 1] - 30.0 * u[i] + 16.0 * u[i + 1] - u[i + 2]) / (12.0 * h * h);
            let ut = (u[i - 2] - 8.0 * u[i - 1] + 8.0 * u[i + 1] - u[i + 2]) / (12.0 * h);
            -(utt + p * ut) / (grid.nodes()[i] * grid.nodes()[i])
        })
        .collect()
}
