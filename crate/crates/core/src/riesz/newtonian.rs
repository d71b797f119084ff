//! Independent route to the `mu = N - 2` potential through the radial ODE.

use std::sync::Arc;

use crate::constants::sphere_measure_unchecked;
use crate::error::{Error, Result};
use crate::solver::laplacian::assemble_radial_laplacian;

use super::convolve::power_tail;
use super::{RadialField, RadialGrid};

/// Solves `-Delta v = (N-2) omega_N f` on the grid span.
///
/// Dirichlet values at the two end nodes come from the shell theorem applied
/// to the same support model the Riesz engine uses (core ball, annulus, or
/// power-law tail). The interior is solved with the three-point scheme on
/// grids refined 4x and 8x in `ln r`, then Richardson-extrapolated.
pub fn newtonian_crosscheck(f: &RadialField) -> Result<RadialField> {
    let grid = &f.grid;
    let dim = grid.dim();
    if dim < 3 {
        return Err(Error::Domain(format!("Newtonian potential needs N >= 3, got {dim}")));
    }
    let n = grid.len();
    let nodes = grid.nodes();
    let (r0, rn) = (nodes[0], nodes[n - 1]);
    let left = shell_potential(f, 0)?;
    let right = shell_potential(f, n - 1)?;
    let scale = (dim as f64 - 2.0) * sphere_measure_unchecked(dim);

    let solve = |k: usize| -> Result<Vec<f64>> {
        let fine = Arc::new(RadialGrid::annulus(dim, r0, rn, k * (n - 1) + 1)?);
        let lap = assemble_radial_laplacian(&fine)?;
        let src: Vec<f64> = fine
            .nodes()
            .iter()
            .map(|&r| scale * grid.interpolate(&f.values, r))
            .collect();
        let v = lap.solve_dirichlet(&src, left, right)?;
        Ok((0..n).map(|i| v[k * i]).collect())
    };
    let v4 = solve(4)?;
    let v8 = solve(8)?;
    let values = v4.iter().zip(&v8).map(|(a, b)| b + (b - a) / 3.0).collect();
    RadialField::new(grid.clone(), values)
}

/// `omega_N [r^{2-N} int_0^r f s^{N-1} ds + int_r^inf f s ds]` at node `i`,
/// which must be the first or last node.
fn shell_potential(f: &RadialField, i: usize) -> Result<f64> {
    let grid = &f.grid;
    let dim = grid.dim();
    let nf = dim as f64;
    let r = grid.nodes()[i];
    let core = if grid.has_core() {
        f.values[0] * grid.nodes()[0].powi(dim as i32) / nf
    } else {
        0.0
    };
    let dot = |w: Vec<f64>| -> f64 { w.iter().zip(&f.values).map(|(a, b)| a * b).sum() };
    let mut outside = 0.0;
    if let Some((amp, p)) = power_tail(grid, &f.values)? {
        if p <= 2.0 {
            return Err(Error::Quadrature(format!(
                "field decays like r^-{p:.3}; Newtonian tail diverges"
            )));
        }
        outside += amp * grid.outer().powf(2.0 - p) / (p - 2.0);
    }
    let inside = if i == 0 {
        outside += dot(grid.moment_weights(2.0));
        core
    } else {
        core + dot(grid.moment_weights(nf))
    };
    Ok(sphere_measure_unchecked(dim) * (r.powf(2.0 - nf) * inside + outside))
}
