//! Riesz potentials of radial densities.

mod convolve;
mod grid;
mod kernel;
mod newtonian;

pub use convolve::{riesz_function, riesz_radial, RieszQuadrature};
pub use grid::{RadialField, RadialGrid};
pub use kernel::{angular_kernel, angular_kernel_with};
pub use newtonian::newtonian_crosscheck;

use crate::error::{Error, Result};

/// Resolution of the radial and angular quadratures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSpec {
    pub radial_nodes: usize,
    pub angular_nodes: usize,
    /// Outer radius for integrals over `R^N`, in bubble units.
    pub truncation_radius: f64,
    /// Maximum number of dyadic panels towards the diagonal singularity.
    pub refinement_levels: usize,
}

impl Default for QuadSpec {
    fn default() -> Self {
        Self {
            radial_nodes: 256,
            angular_nodes: 128,
            truncation_radius: 100.0,
            refinement_levels: 40,
        }
    }
}

impl QuadSpec {
    pub fn validate(&self) -> Result<()> {
        if self.radial_nodes < 8 || self.angular_nodes < 8 || self.refinement_levels < 1 {
            return Err(Error::Domain(format!(
                "quadrature counts must be >= 8 (refinement levels >= 1), got {self:?}"
            )));
        }
        if !(self.truncation_radius >= 50.0 && self.truncation_radius.is_finite()) {
            return Err(Error::Domain(format!(
                "truncation radius must be >= 50, got {}",
                self.truncation_radius
            )));
        }
        Ok(())
    }
}
