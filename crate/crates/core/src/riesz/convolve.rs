//! Radial Riesz potentials `g(r) = int f(s) s^{N-1} K(r, s) ds`.
//!
//! Grid fields use product integration: the field is replaced by its
//! local quintic interpolant in `t = ln s` and each interval is integrated
//! against the exact kernel with Gauss points, splitting at the target so the
//! diagonal kink never sits inside a Gauss panel. The map `f -> g` is
//! therefore a fixed matrix per grid plus, on unbounded grids, an analytic
//! power-law tail fitted to the last two samples.

use std::sync::Arc;

use rayon::prelude::*;

use crate::constants::sphere_measure_unchecked;
use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;

use super::kernel::{angular_kernel_with, check_args};
use super::{QuadSpec, RadialField, RadialGrid};

const SUBPOINTS: usize = 6;

/// Precomputed product-integration weights for one grid and exponent.
#[derive(Debug, Clone)]
pub struct RieszQuadrature {
    grid: Arc<RadialGrid>,
    mu: f64,
    spec: QuadSpec,
    rows: Vec<Vec<f64>>,
}

impl RieszQuadrature {
    pub fn new(grid: Arc<RadialGrid>, mu: f64, q: &QuadSpec) -> Result<Self> {
        check_args(grid.dim(), mu)?;
        q.validate()?;
        let rows = grid
            .nodes()
            .par_iter()
            .map(|&r| weight_row(&grid, mu, q, r))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { grid, mu, spec: *q, rows })
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Potential at every grid node.
    pub fn apply(&self, f: &RadialField) -> Result<RadialField> {
        self.check_field(f)?;
        let tail = self.tail_model(&f.values)?;
        let values = self
            .rows
            .iter()
            .zip(self.grid.nodes())
            .map(|(row, &r)| dot(row, &f.values) + tail.map_or(0.0, |t| t.at(r)))
            .collect();
        RadialField::new(self.grid.clone(), values)
    }

    /// Potential at an arbitrary radius `r >= 0`.
    pub fn potential_at(&self, f: &RadialField, r: f64) -> Result<f64> {
        self.check_field(f)?;
        if !(r >= 0.0 && r.is_finite()) {
            return Err(Error::Domain(format!("target radius must be >= 0, got {r}")));
        }
        if self.grid.is_unbounded() && r > self.grid.outer() {
            return Err(Error::Domain(format!(
                "target radius {r} beyond truncation radius {}",
                self.grid.outer()
            )));
        }
        let row = weight_row(&self.grid, self.mu, &self.spec, r)?;
        let tail = self.tail_model(&f.values)?;
        Ok(dot(&row, &f.values) + tail.map_or(0.0, |t| t.at(r)))
    }

    /// [`Self::potential_at`] without building the node rows first.
    pub fn potential_once(f: &RadialField, mu: f64, q: &QuadSpec, r: f64) -> Result<f64> {
        check_args(f.grid.dim(), mu)?;
        q.validate()?;
        let shell = Self { grid: f.grid.clone(), mu, spec: *q, rows: Vec::new() };
        shell.potential_at(f, r)
    }

    fn check_field(&self, f: &RadialField) -> Result<()> {
        if !Arc::ptr_eq(&f.grid, &self.grid) && *f.grid != *self.grid {
            return Err(Error::Domain("field lives on a different grid".into()));
        }
        Ok(())
    }

    fn tail_model(&self, values: &[f64]) -> Result<Option<Tail>> {
        let Some((amp, p)) = power_tail(&self.grid, values)? else {
            return Ok(None);
        };
        let n = self.grid.dim() as f64;
        let e1 = p + self.mu - n;
        if e1 <= 0.0 {
            return Err(Error::Quadrature(format!(
                "field decays like r^-{p:.3}, too slowly for a convergent tail"
            )));
        }
        let mu = self.mu;
        Ok(Some(Tail {
            omega_amp: sphere_measure_unchecked(self.grid.dim()) * amp,
            big_r: self.grid.outer(),
            e1,
            kappa: 0.5 * mu * (0.5 * mu - 0.5 * n + 1.0) / (0.5 * n),
        }))
    }
}

/// `int_R^inf A s^{-p} s^{N-1} K(r, s) ds` with the kernel expanded to second
/// order in `r / s`.
#[derive(Debug, Clone, Copy)]
struct Tail {
    omega_amp: f64,
    big_r: f64,
    e1: f64,
    kappa: f64,
}

impl Tail {
    fn at(&self, r: f64) -> f64 {
        let lead = self.big_r.powf(-self.e1) / self.e1;
        let next = self.kappa * r * r * self.big_r.powf(-self.e1 - 2.0) / (self.e1 + 2.0);
        self.omega_amp * (lead + next)
    }
}

/// Amplitude and exponent of `A s^{-p}` through the last two samples of an
/// unbounded grid. `None` when the grid is bounded or the field ends at zero.
pub(crate) fn power_tail(grid: &RadialGrid, values: &[f64]) -> Result<Option<(f64, f64)>> {
    if !grid.is_unbounded() {
        return Ok(None);
    }
    let n = values.len();
    let (a, b) = (values[n - 2], values[n - 1]);
    if b == 0.0 {
        return Ok(None);
    }
    if a == 0.0 || a.signum() != b.signum() {
        return Err(Error::Quadrature(
            "field changes sign at the truncation radius; tail cannot be extrapolated".into(),
        ));
    }
    let p = (a / b).ln() / grid.log_step();
    Ok(Some((b * grid.outer().powf(p), p)))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn weight_row(grid: &RadialGrid, mu: f64, q: &QuadSpec, r: f64) -> Result<Vec<f64>> {
    let dim = grid.dim();
    let nf = dim as f64;
    let mut row = vec![0.0; grid.len()];
    let split = (r > 0.0).then(|| r.ln());
    let mut failure = None;
    grid.for_each_subpoint(split, SUBPOINTS, |t, w, k0, basis| {
        if failure.is_some() {
            return;
        }
        match angular_kernel_with(dim, mu, r, t.exp(), q) {
            Ok(k) => {
                let m = w * (nf * t).exp() * k;
                for (j, b) in basis.iter().enumerate() {
                    row[k0 + j] += m * b;
                }
            }
            Err(e) => failure = Some(e),
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    if grid.has_core() {
        // The field is taken constant on the core ball.
        let r0 = grid.nodes()[0];
        let rule = gauss_legendre(8);
        let mut pieces = vec![(0.0, r0)];
        if r > 0.0 && r < r0 {
            pieces = vec![(0.0, r), (r, r0)];
        }
        for (a, b) in pieces {
            let half = 0.5 * (b - a);
            for &(x, w) in rule.iter() {
                let s = a + half * (1.0 + x);
                row[0] += w * half * s.powi(dim as i32 - 1) * angular_kernel_with(dim, mu, r, s, q)?;
            }
        }
    }
    Ok(row)
}

/// Riesz potential `|.|^{-mu} * f` of a radial field, sampled on its grid.
///
/// Annulus grids integrate over the annulus only. Grids with a core include
/// the ball below the first node; unbounded grids add the power-law tail.
pub fn riesz_radial(f: &RadialField, mu: f64, q: &QuadSpec) -> Result<RadialField> {
    RieszQuadrature::new(f.grid.clone(), mu, q)?.apply(f)
}

/// Riesz potential at radius `r` of a radial density given as a function on
/// all of `R^N`.
///
/// Integrates in `ln s` on panels of width at most 1/4 split at `r`, below
/// `1e-4 min(1, r)` in `s` and beyond `q.truncation_radius` in `1/s`. The
/// density must decay faster than `s^{mu - N}`. Two Gauss orders are compared
/// and a quadrature error is returned when they disagree by more than 1e-9.
pub fn riesz_function(
    dim: usize,
    mu: f64,
    f: impl Fn(f64) -> f64,
    r: f64,
    q: &QuadSpec,
) -> Result<f64> {
    check_args(dim, mu)?;
    q.validate()?;
    if !(r >= 0.0 && r < q.truncation_radius) {
        return Err(Error::Domain(format!(
            "target radius must lie in [0, {}), got {r}",
            q.truncation_radius
        )));
    }
    let fine = function_sum(dim, mu, &f, r, q, 24)?;
    let coarse = function_sum(dim, mu, &f, r, q, 16)?;
    if (fine - coarse).abs() > 1e-9 * fine.abs().max(1e-300) {
        return Err(Error::Quadrature(format!(
            "function quadrature unresolved at r = {r}: {fine} vs {coarse}"
        )));
    }
    Ok(fine)
}

fn function_sum(dim: usize, mu: f64, f: &dyn Fn(f64) -> f64, r: f64, q: &QuadSpec, m: usize) -> Result<f64> {
    let rule = gauss_legendre(m);
    let nf = dim as f64;
    let big = q.truncation_radius;
    let s_lo = 1e-4 * if r > 0.0 { r.min(1.0) } else { 1.0 };
    let mut acc = 0.0;

    let add_s = |a: f64, b: f64, acc: &mut f64| -> Result<()> {
        let half = 0.5 * (b - a);
        for &(x, w) in rule.iter() {
            let s = a + half * (1.0 + x);
            *acc += w * half * f(s) * s.powi(dim as i32 - 1) * angular_kernel_with(dim, mu, r, s, q)?;
        }
        Ok(())
    };
    add_s(0.0, s_lo, &mut acc)?;

    let mut breaks = vec![s_lo.ln(), big.ln()];
    if r > s_lo {
        breaks.insert(1, r.ln());
    }
    for pair in breaks.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let panels = ((b - a) / 0.25).ceil().max(1.0) as usize;
        let width = (b - a) / panels as f64;
        for p in 0..panels {
            let lo = a + p as f64 * width;
            let half = 0.5 * width;
            for &(x, w) in rule.iter() {
                let t = lo + half * (1.0 + x);
                let s = t.exp();
                acc += w * half * f(s) * (nf * t).exp() * angular_kernel_with(dim, mu, r, s, q)?;
            }
        }
    }

    // s = big / u on (0, 1]
    for (a, b) in [(0.0, 0.5), (0.5, 1.0)] {
        let half = 0.5 * (b - a);
        for &(x, w) in rule.iter() {
            let u: f64 = a + half * (1.0 + x);
            let s = big / u;
            acc += w * half * f(s) * s.powi(dim as i32 - 1) * angular_kernel_with(dim, mu, r, s, q)? * big
                / (u * u);
        }
    }
    Ok(acc)
}
