//! Radial solver for the full problem on the pierced unit ball.

mod discrete;
mod fit;
mod kernel_check;
pub mod laplacian;
mod newton;

pub use discrete::{energy_of, nonlocal_force, DiscreteProblem};
pub use fit::fit_lambda;
pub use kernel_check::{linearization_kernel_check, KernelCheck};
pub use laplacian::{assemble_radial_laplacian, laplacian_fourth_order, RadialLaplacian};
pub use newton::{
    ansatz, check_schedule, continuation, newton_solve, rescale, solve_from_ansatz, solve_on, SolveReport,
    SolverConfig,
};
