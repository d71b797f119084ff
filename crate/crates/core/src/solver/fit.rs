use crate::bubble::{bubble_radial, z0_radial};
use crate::constants::ProblemParams;
use crate::error::{Error, Result};
use crate::riesz::RadialField;

/// Concentration of the centred bubble closest to `u`.
///
/// Least squares over the nodes with `u >= max(u) / 2`, weighted by the grid
/// cell volumes, by Gauss-Newton from the peak-height value
/// `lambda_0 = max(u)^{2/(N-2)}`.
pub fn fit_lambda(u: &RadialField, params: &ProblemParams) -> Result<f64> {
    let dim = params.dim;
    let top = u.max();
    if !(top > 0.0 && top.is_finite()) {
        return Err(Error::Fit(format!("field has no positive maximum (max = {top})")));
    }
    let window: Vec<(f64, f64, f64)> = u
        .grid
        .nodes()
        .iter()
        .zip(u.grid.cells())
        .zip(&u.values)
        .filter(|(_, &v)| v >= 0.5 * top)
        .map(|((&r, &c), &v)| (r, c, v))
        .collect();
    if window.len() < 5 {
        return Err(Error::Fit(format!("only {} nodes above half maximum, need 5", window.len())));
    }
    let mut lambda = top.powf(2.0 / (params.n() - 2.0));
    for _ in 0..100 {
        let (mut num, mut den) = (0.0, 0.0);
        for &(r, c, v) in &window {
            let z = z0_radial(dim, lambda, r);
            num += c * z * (v - bubble_radial(dim, lambda, r));
            den += c * z * z;
        }
        if !(den > 0.0) {
            return Err(Error::Fit("degenerate normal equation".into()));
        }
        let mut step = num / den;
        // keep lambda positive
        while lambda + step <= 0.0 {
            step *= 0.5;
        }
        lambda += step;
        if step.abs() <= 1e-15 * lambda {
            return Ok(lambda);
        }
    }
    if lambda.is_finite() && lambda > 0.0 {
        Ok(lambda)
    } else {
        Err(Error::Fit("Gauss-Newton iteration diverged".into()))
    }
}
