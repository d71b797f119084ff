use std::sync::Arc;

use crate::bubble::{bubble_radial, z0_radial};
use crate::constants::ProblemParams;
use crate::error::{domain, Result};
use crate::riesz::{QuadSpec, RadialField, RadialGrid, RieszQuadrature};

use super::laplacian::laplacian_fourth_order;

/// Linearized operator at `U_{lambda,0}` applied to `Z^0` and to `U`.
#[derive(Debug, Clone)]
pub struct KernelCheck {
    pub lambda: f64,
    /// `|L Z^0| / |Z^0|` in the volume `L^2` norm over the evaluation nodes.
    pub relative_residual: f64,
    /// `|L U| / |U|`, the negative control.
    pub control_residual: f64,
    pub radii: Vec<f64>,
    /// `L Z^0` at `radii`.
    pub lz: Vec<f64>,
}

/// Applies `L phi = -Delta phi - A [(2mu*-1) (|.|^-mu * U^{2mu*}) U^{2mu*-2} phi
/// plus 2mu* (|.|^-mu * (U^{2mu*-1} phi)) U^{2mu*-1}]` on a free-space grid from
/// `1e-3 / lambda` to `truncation_radius / lambda`, with the fourth-order
/// radial Laplacian and the grid Riesz quadrature.
pub fn linearization_kernel_check(params: &ProblemParams, lambda: f64, q: &QuadSpec) -> Result<KernelCheck> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return domain(format!("lambda must be positive, got {lambda}"));
    }
    q.validate()?;
    let dim = params.dim;
    let qs = params.two_mu_star;
    let a = params.a_hl();
    let grid = Arc::new(RadialGrid::free_space(dim, 1e-3 / lambda, q.truncation_radius / lambda, q.radial_nodes)?);
    let riesz = RieszQuadrature::new(grid.clone(), params.mu, q)?;
    let u = RadialField::from_fn(grid.clone(), |r| bubble_radial(dim, lambda, r))?;
    let z = RadialField::from_fn(grid.clone(), |r| z0_radial(dim, lambda, r))?;
    let vu = riesz.apply(&u.map(|v| v.powf(qs))?)?;

    let apply = |phi: &RadialField| -> Result<Vec<f64>> {
        let src: Vec<f64> = u.values.iter().zip(&phi.values).map(|(w, p)| w.powf(qs - 1.0) * p).collect();
        let vphi = riesz.apply(&RadialField::new(grid.clone(), src)?)?;
        let lap = laplacian_fourth_order(&grid, &phi.values);
        Ok((2..grid.len() - 2)
            .zip(lap)
            .map(|(i, l)| {
                let w = u.values[i];
                l - a * ((qs - 1.0) * vu.values[i] * w.powf(qs - 2.0) * phi.values[i]
                    + qs * vphi.values[i] * w.powf(qs - 1.0))
            })
            .collect())
    };
    let cells = &grid.cells()[2..grid.len() - 2];
    let norm = |v: &[f64]| v.iter().zip(cells).map(|(x, c)| c * x * x).sum::<f64>().sqrt();
    let lz = apply(&z)?;
    let lu = apply(&u)?;
    let inner = 2..grid.len() - 2;
    Ok(KernelCheck {
        lambda,
        relative_residual: norm(&lz) / norm(&z.values[inner.clone()]),
        control_residual: norm(&lu) / norm(&u.values[inner.clone()]),
        radii: grid.nodes()[inner].to_vec(),
        lz,
    })
}
