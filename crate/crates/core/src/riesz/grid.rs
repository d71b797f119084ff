use std::sync::Arc;

use crate::constants::sphere_measure_unchecked;
use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;

/// Points in the local Lagrange interpolant used for high-order integrals.
pub(crate) const STENCIL: usize = 6;

/// Log-spaced radial grid.
///
/// Nodes are uniform in `t = ln r` and include both ends of `[nodes[0],
/// nodes[n-1]]`. `inner = 0` marks a grid whose first node stands in for the
/// ball `|x| < nodes[0]` (the field is extended by its first value there).
/// `unbounded` grids model fields on all of `R^N` that continue past the last
/// node with a power-law tail.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    dim: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    cells: Vec<f64>,
    inner: f64,
    outer: f64,
    log_start: f64,
    log_step: f64,
    unbounded: bool,
}

impl RadialGrid {
    /// Annulus `inner <= r <= outer` with the boundary radii as end nodes.
    pub fn annulus(dim: usize, inner: f64, outer: f64, n: usize) -> Result<Self> {
        if !(inner > 0.0 && outer > inner && outer.is_finite()) {
            return Err(Error::Domain(format!(
                "annulus needs 0 < inner < outer, got [{inner}, {outer}]"
            )));
        }
        Self::build(dim, inner, outer, n, inner, false)
    }

    /// Ball `r <= outer`; the core `r < r_min` is lumped into the first node.
    pub fn ball(dim: usize, r_min: f64, outer: f64, n: usize) -> Result<Self> {
        if !(r_min > 0.0 && outer > r_min && outer.is_finite()) {
            return Err(Error::Domain(format!(
                "ball grid needs 0 < r_min < outer, got r_min = {r_min}, outer = {outer}"
            )));
        }
        Self::build(dim, r_min, outer, n, 0.0, false)
    }

    /// All of `R^N`, resolved on `[r_min, truncation]`.
    pub fn free_space(dim: usize, r_min: f64, truncation: f64, n: usize) -> Result<Self> {
        let mut g = Self::ball(dim, r_min, truncation, n)?;
        g.unbounded = true;
        Ok(g)
    }

    fn build(dim: usize, first: f64, last: f64, n: usize, inner: f64, unbounded: bool) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Domain(format!("grid dimension must be >= 2, got {dim}")));
        }
        if n < STENCIL {
            return Err(Error::Domain(format!("grid needs at least {STENCIL} nodes, got {n}")));
        }
        let t0 = first.ln();
        let h = (last.ln() - t0) / (n - 1) as f64;
        let mut nodes: Vec<f64> = (0..n).map(|i| (t0 + i as f64 * h).exp()).collect();
        nodes[0] = first;
        nodes[n - 1] = last;

        // c_i = int hat_i(t) e^{N t} dt, the exact r^{N-1} dr mass of the hat
        // function in t.
        let nf = dim as f64;
        let e = (nf * h).exp();
        let right = (e * (nf * h - 1.0) + 1.0) / (nf * nf * h);
        let whole = (e - 1.0) / nf;
        let left = whole - right;
        let mut cells = vec![0.0; n];
        for i in 0..n - 1 {
            let base = nodes[i].powi(dim as i32);
            cells[i] += base * left;
            cells[i + 1] += base * right;
        }
        if inner == 0.0 {
            cells[0] += first.powi(dim as i32) / nf;
        }
        let weights = cells
            .iter()
            .zip(&nodes)
            .map(|(c, r)| c / r.powi(dim as i32 - 1))
            .collect();
        Ok(Self {
            dim,
            nodes,
            weights,
            cells,
            inner,
            outer: last,
            log_start: t0,
            log_step: h,
            unbounded,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// `dr` weights: `sum w_i r_i^{N-1} f_i` approximates `int f r^{N-1} dr`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `w_i r_i^{N-1}`, the radial mass of each node.
    pub fn cells(&self) -> &[f64] {
        &self.cells
    }

    pub fn inner(&self) -> f64 {
        self.inner
    }

    pub fn outer(&self) -> f64 {
        self.outer
    }

    pub fn has_core(&self) -> bool {
        self.inner == 0.0
    }

    pub fn is_unbounded(&self) -> bool {
        self.unbounded
    }

    pub fn log_step(&self) -> f64 {
        self.log_step
    }

    pub fn log_start(&self) -> f64 {
        self.log_start
    }

    /// Volume covered by the grid, `omega_N (outer^N - inner^N) / N`.
    pub fn volume(&self) -> f64 {
        let n = self.dim as f64;
        sphere_measure_unchecked(self.dim) * (self.outer.powf(n) - self.inner.powf(n)) / n
    }

    /// Second-order volume integral of a radial field.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        let s: f64 = self.cells.iter().zip(values).map(|(c, v)| c * v).sum();
        sphere_measure_unchecked(self.dim) * s
    }

    /// High-order volume integral using the local interpolant in `t`.
    pub fn integrate_smooth(&self, values: &[f64]) -> f64 {
        let q = self.moment_weights(self.dim as f64);
        let mut s: f64 = q.iter().zip(values).map(|(c, v)| c * v).sum();
        if self.has_core() {
            s += values[0] * self.nodes[0].powi(self.dim as i32) / self.dim as f64;
        }
        sphere_measure_unchecked(self.dim) * s
    }

    /// `q_k = int L_k(t) e^{p t} dt` over the grid span, with `L_k` the local
    /// Lagrange cardinal functions; `sum q_k f_k ~ int f(r) r^{p-1} dr`.
    pub fn moment_weights(&self, power: f64) -> Vec<f64> {
        let mut q = vec![0.0; self.len()];
        self.for_each_subpoint(None, 8, |t, w, k0, basis| {
            let m = w * (power * t).exp();
            for (j, b) in basis.iter().enumerate() {
                q[k0 + j] += m * b;
            }
        });
        q
    }

    /// Start index and Lagrange weights of the local interpolation stencil
    /// around `t`, centred on the containing interval.
    pub(crate) fn stencil(&self, t: f64) -> (usize, [f64; STENCIL]) {
        let n = self.len();
        let x = (t - self.log_start) / self.log_step;
        let j = (x.floor().max(0.0) as usize).min(n - 2);
        let k0 = j.saturating_sub(STENCIL / 2 - 1).min(n - STENCIL);
        let xi = x - k0 as f64;
        let mut basis = [1.0; STENCIL];
        for (m, b) in basis.iter_mut().enumerate() {
            for k in 0..STENCIL {
                if k != m {
                    *b *= (xi - k as f64) / (m as f64 - k as f64);
                }
            }
        }
        (k0, basis)
    }

    /// Visits Gauss points of every grid interval in `t`, splitting the
    /// interval that contains `split` so integrands with a kink there stay
    /// piecewise smooth. The callback receives `(t, dt weight, k0, basis)`.
    pub(crate) fn for_each_subpoint(
        &self,
        split: Option<f64>,
        points: usize,
        mut f: impl FnMut(f64, f64, usize, [f64; STENCIL]),
    ) {
        let rule = gauss_legendre(points);
        let h = self.log_step;
        let mut visit = |a: f64, b: f64| {
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            for &(x, w) in rule.iter() {
                let t = mid + half * x;
                let (k0, basis) = self.stencil(t);
                f(t, w * half, k0, basis);
            }
        };
        for i in 0..self.len() - 1 {
            let a = self.log_start + i as f64 * h;
            let b = a + h;
            match split {
                Some(s) if s > a + 1e-12 * h && s < b - 1e-12 * h => {
                    visit(a, s);
                    visit(s, b);
                }
                _ => visit(a, b),
            }
        }
    }

    /// Local polynomial interpolation in `ln r`; `r` must lie in the node span.
    pub fn interpolate(&self, values: &[f64], r: f64) -> f64 {
        let (k0, basis) = self.stencil(r.ln());
        basis.iter().enumerate().map(|(j, b)| b * values[k0 + j]).sum()
    }

    /// Piecewise-linear interpolation in `ln r`, zero outside the node span.
    pub fn interpolate_linear(&self, values: &[f64], r: f64) -> f64 {
        let n = self.len();
        if !(r >= self.nodes[0] && r <= self.nodes[n - 1]) {
            return 0.0;
        }
        let x = (r.ln() - self.log_start) / self.log_step;
        let j = (x.floor().max(0.0) as usize).min(n - 2);
        let w = (x - j as f64).clamp(0.0, 1.0);
        (1.0 - w) * values[j] + w * values[j + 1]
    }
}

/// Samples of a radial function on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialField {
    pub grid: Arc<RadialGrid>,
    pub values: Vec<f64>,
}

impl RadialField {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Domain(format!(
                "field has {} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("field value at node {i} is not finite")));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Arc<RadialGrid>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.nodes().iter().map(|&r| f(r)).collect();
        Self::new(grid, values)
    }

    pub fn zeros(grid: Arc<RadialGrid>) -> Self {
        let values = vec![0.0; grid.len()];
        Self { grid, values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.grid.clone(), self.values.iter().map(|&v| f(v)).collect())
    }
}
