//! Optimal control of semilinear elliptic equations with a defect penalty.
//!
//! Instead of enforcing the state law `-Δu + φ(u) = v` exactly, the state
//! `u` and control `v` are free and the failure to satisfy the law is
//! absorbed by a defect `w` with `-Δ(u + w) + φ(u) = v`, `w = 0` on the
//! boundary. The cost
//!
//! ```text
//! ½‖u - ū‖² + μ/2 ‖v‖² + λ/2 ‖∇w‖²
//! ```
//!
//! is minimized by steepest descent where every direction comes from linear
//! Dirichlet solves ([`descent`]). Pointwise constraints `u ≤ 0`,
//! `v₋ ≤ v ≤ v₊` are handled by exponential barriers with multiplicative
//! multiplier updates ([`barrier`]), and [`study`] follows the optimum as
//! `λ → ∞` against the exact-law reference.
//!
//! Everything lives on the interior nodes of a uniform grid on the unit
//! square ([`numerics`]).
//!
//! ```
//! use defect_control::descent::{run_descent, DescentOptions};
//! use defect_control::model::{FieldSource, Nonlinearity, ProblemSpec};
//! use defect_control::numerics::build_grid;
//!
//! let grid = build_grid(16)?;
//! let target = FieldSource::MinX.build(grid)?;
//! let spec = ProblemSpec::new(target, Nonlinearity::affine(-1.0, 0.0), 1e-2, 1.0)?;
//! let out = run_descent(&spec, &DescentOptions::default(), None)?;
//! assert!(out.report.status.is_converged());
//! # Ok::<(), defect_control::Error>(())
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod barrier;
pub mod cli;
pub mod descent;
pub mod error;
pub mod model;
pub mod numerics;
pub mod report;
pub mod study;

pub use error::{Error, Result};
