use std::sync::Arc;

use crate::bubble::{projected_bubble_first_order, BubbleParams, DomainSpec};
use crate::constants::ProblemParams;
use crate::error::{domain, Error, Result};
use crate::riesz::{QuadSpec, RadialField, RadialGrid};

use super::discrete::DiscreteProblem;
use super::fit::fit_lambda;

/// Tolerances and discretization of one solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub quad: QuadSpec,
    /// Target for the mass-weighted residual norm.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { quad: QuadSpec::default(), tol: 1e-9, max_iter: 50 }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        self.quad.validate()?;
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return domain(format!("tol must be positive, got {}", self.tol));
        }
        if self.max_iter == 0 {
            return domain("max_iter must be at least 1");
        }
        Ok(())
    }
}

/// Outcome of one Newton solve.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub eps: f64,
    /// `None` when the solution has no bubble to fit, e.g. `u = 0`.
    pub lambda_fit: Option<f64>,
    /// `lambda_fit * sqrt(eps)`.
    pub lambda_fit_scaled: Option<f64>,
    pub energy: f64,
    pub residual_norm: f64,
    pub newton_iterations: usize,
    pub converged: bool,
    /// `|u - PU|` in the Dirichlet norm, `PU` the first-order projection at `lambda_fit`.
    pub phi_norm: Option<f64>,
    pub max_u: f64,
    pub solution: RadialField,
}

/// First-order projected bubble sampled on an annulus grid, clipped at zero
/// and set to zero on the end nodes.
pub fn ansatz(grid: &Arc<RadialGrid>, d: &DomainSpec, lambda: f64) -> Result<RadialField> {
    let dim = grid.dim();
    let p = BubbleParams::centered(dim, lambda)?;
    let n = grid.len();
    let mut x = vec![0.0; dim];
    let mut values = Vec::with_capacity(n);
    for (i, &r) in grid.nodes().iter().enumerate() {
        if i == 0 || i == n - 1 {
            values.push(0.0);
            continue;
        }
        x[0] = r;
        values.push(projected_bubble_first_order(&p, d, &x)?.max(0.0));
    }
    RadialField::new(grid.clone(), values)
}

/// Damped Newton on `F(u) = -Delta_h u - A V(u) u^{2mu*-1}` from `init`,
/// discretized on the grid of `init`.
pub fn newton_solve(d: &DomainSpec, params: &ProblemParams, init: &RadialField, cfg: &SolverConfig) -> Result<SolveReport> {
    cfg.validate()?;
    let problem = DiscreteProblem::on_grid(d, params, init.grid.clone(), &cfg.quad)?;
    solve_on(&problem, init, cfg)
}

/// [`newton_solve`] with prebuilt operators.
pub fn solve_on(problem: &DiscreteProblem, init: &RadialField, cfg: &SolverConfig) -> Result<SolveReport> {
    let n = problem.len();
    if init.len() != n {
        return domain(format!("initial field has {} values, grid {n}", init.len()));
    }
    let scale = init.values.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
    if init.values[0].abs() > 1e-14 * scale || init.values[n - 1].abs() > 1e-14 * scale {
        return Err(Error::BoundaryCondition("initial field must vanish on both end nodes".into()));
    }
    let mut u = init.values.clone();
    u[0] = 0.0;
    u[n - 1] = 0.0;
    let mut f = problem.residual(&u)?;
    let mut norm = problem.residual_norm(&f);
    let mut iterations = 0;
    let mut stalled = false;
    while norm > cfg.tol && iterations < cfg.max_iter && norm.is_finite() {
        let jac = problem.jacobian(&u)?;
        let rhs = nalgebra::DVector::from_iterator(n - 2, f[1..n - 1].iter().map(|v| -v));
        let step = jac
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::LinearSolve(format!("singular Jacobian at iteration {iterations}")))?;
        iterations += 1;
        let mut alpha = 1.0;
        loop {
            let mut trial = u.clone();
            for (k, s) in step.iter().enumerate() {
                trial[k + 1] += alpha * s;
            }
            let ft = problem.residual(&trial)?;
            let nt = problem.residual_norm(&ft);
            if nt <= (1.0 - 1e-4 * alpha) * norm {
                u = trial;
                f = ft;
                norm = nt;
                break;
            }
            alpha *= 0.5;
            if alpha < 1e-6 {
                stalled = true;
                break;
            }
        }
        if stalled {
            break;
        }
    }
    let converged = norm <= cfg.tol;
    report(problem, u, norm, iterations, converged)
}

fn report(problem: &DiscreteProblem, u: Vec<f64>, norm: f64, iterations: usize, converged: bool) -> Result<SolveReport> {
    let eps = problem.domain.hole_radius;
    let energy = problem.energy(&u)?;
    let solution = RadialField::new(problem.grid().clone(), u)?;
    let max_u = solution.max();
    let lambda_fit = fit_lambda(&solution, &problem.params).ok();
    let phi_norm = match lambda_fit {
        Some(l) => {
            let pu = ansatz(problem.grid(), &problem.domain, l)?;
            let phi: Vec<f64> = solution.values.iter().zip(&pu.values).map(|(a, b)| a - b).collect();
            Some(problem.laplacian().dirichlet_energy(&phi).sqrt())
        }
        None => None,
    };
    Ok(SolveReport {
        eps,
        lambda_fit,
        lambda_fit_scaled: lambda_fit.map(|l| l * eps.sqrt()),
        energy,
        residual_norm: norm,
        newton_iterations: iterations,
        converged,
        phi_norm,
        max_u,
        solution,
    })
}

/// Solve at one hole radius from the first-order ansatz at `lambda`
/// (`eps^{-1/2}` when `None`).
pub fn solve_from_ansatz(eps: f64, params: &ProblemParams, lambda: Option<f64>, cfg: &SolverConfig) -> Result<SolveReport> {
    cfg.validate()?;
    let d = DomainSpec::pierced_unit_ball(eps)?;
    let problem = DiscreteProblem::new(&d, params, &cfg.quad)?;
    let init = ansatz(problem.grid(), &d, lambda.unwrap_or(eps.powf(-0.5)))?;
    solve_on(&problem, &init, cfg)
}

/// `kappa^{(N-2)/2} u(kappa r)` on `grid`, linear in `ln r`, zero outside the
/// old span and on the end nodes.
pub fn rescale(u: &RadialField, grid: &Arc<RadialGrid>, kappa: f64) -> Result<RadialField> {
    let half = 0.5 * (grid.dim() as f64 - 2.0);
    let n = grid.len();
    let values = grid
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            if i == 0 || i == n - 1 {
                0.0
            } else {
                kappa.powf(half) * u.grid.interpolate_linear(&u.values, kappa * r)
            }
        })
        .collect();
    RadialField::new(grid.clone(), values)
}

/// Solves along a strictly decreasing schedule of hole radii. The first step
/// starts from the ansatz at `eps^{-1/2}`; each later one from the previous
/// solution rescaled by `sqrt(eps_prev / eps_next)`. Stops after the first
/// step that fails to converge, which is the last report returned.
pub fn continuation(schedule: &[f64], params: &ProblemParams, cfg: &SolverConfig) -> Result<Vec<SolveReport>> {
    check_schedule(schedule)?;
    cfg.validate()?;
    params.require_solver_regime()?;
    let mut out: Vec<SolveReport> = Vec::with_capacity(schedule.len());
    for &eps in schedule {
        let d = DomainSpec::pierced_unit_ball(eps)?;
        let problem = DiscreteProblem::new(&d, params, &cfg.quad)?;
        let init = match out.last() {
            None => ansatz(problem.grid(), &d, eps.powf(-0.5))?,
            Some(prev) => rescale(&prev.solution, problem.grid(), (prev.eps / eps).sqrt())?,
        };
        let rep = solve_on(&problem, &init, cfg)?;
        let ok = rep.converged;
        out.push(rep);
        if !ok {
            break;
        }
    }
    Ok(out)
}

pub fn check_schedule(schedule: &[f64]) -> Result<()> {
    if schedule.is_empty() {
        return Err(Error::Precondition("empty eps schedule".into()));
    }
    for w in schedule.windows(2) {
        if !(w[1] < w[0]) {
            return Err(Error::Precondition(format!("eps schedule must strictly decrease: {} then {}", w[0], w[1])));
        }
    }
    if let Some(e) = schedule.iter().find(|e| !(**e > 0.0 && **e < 1.0)) {
        return Err(Error::Precondition(format!("eps = {e} outside (0, 1)")));
    }
    Ok(())
}
