//! Numerical laboratory for the critical Hartree equation on a pierced ball.
//!
//! The crate builds the Aubin-Talenti bubble family, evaluates Riesz
//! potentials of radial fields, assembles the finite-dimensional reduced
//! energy for the unit ball and solves the full radial problem by damped
//! Newton iteration with continuation in the hole radius.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod bubble;
pub mod constants;
pub mod error;
pub mod green;
pub mod quadrature;
pub mod reduced_energy;
pub mod riesz;
pub mod solver;

pub use bubble::{BubbleParams, DomainSpec};
pub use constants::ProblemParams;
pub use error::{Error, Result};
pub use green::BallGeometry;
pub use riesz::{QuadSpec, RadialField, RadialGrid};
pub use reduced_energy::{CriticalPointCertificate, ReducedEnergyModel};
pub use solver::{SolveReport, SolverConfig};
