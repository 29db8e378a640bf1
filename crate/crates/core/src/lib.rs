//! Variable-exponent Lebesgue/Sobolev calculus on P1 meshes, a regularized
//! Newton solver for the Dirichlet problem of the p(x)-Laplacian, and a
//! harness that measures how solutions move when the exponent converges
//! monotonically to a limit.

pub mod checks;
pub mod cli;
pub mod config;
pub mod error;
pub mod exponent;
pub mod expr;
pub mod mesh;
pub mod modular;
pub mod report;
pub mod solver;
pub mod stability;

pub use error::{Error, Result};
pub use exponent::{
    log_holder_constant, make_schedule, Direction, ExponentField, ExponentSchedule,
};
pub use mesh::{CellVectorField, Domain, Mesh, ScalarField};
pub use modular::{
    conjugate, embedding_constant, epsilon_bound_gap, holder_gap, luxemburg_norm, modular,
    norm_modular_gap, sobolev_norm, GapReport, NormResult,
};
pub use solver::{
    energy, energy_gradient, solve_dirichlet, weak_residual, DirichletProblem, SolveResult,
    SolverOptions,
};
pub use stability::{diagnostics_row, run_stability, StabilityReport, StabilityRow};
