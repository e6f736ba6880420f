//! Structured-grid discretization of the unit square and the linear algebra
//! the optimizers are built on.
//!
//! Fields live on the interior nodes of a uniform grid; the boundary carries
//! homogeneous Dirichlet data and is never stored. Integrals use the lumped
//! mass rule `∫ f g ≈ h² Σ f g` and gradients the five-point stencil, so that
//! `zᵀKz` with the stiffness matrix `K` approximates `∫ |∇z|²`.

mod field;
mod grid;
mod solver;
mod sparse;

pub use field::{l2_inner, ScalarField};
pub use grid::{build_grid, Grid};
pub use solver::{
    conjugate_gradient, h1_seminorm_sq, solve_spd, BandedCholesky, CgInfo, LinearSolver, Stiffness, DEFAULT_CG_TOL,
};
pub use sparse::{assemble_stiffness, CsrMatrix};

pub(crate) use field::dot;
