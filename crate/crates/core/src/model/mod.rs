//! Problem definition and the pieces every optimizer evaluates: the defect
//! solve, the cost, the optimality-system residual and the structural
//! checks on the nonlinearity.

mod hypothesis;
mod nonlinearity;
mod problem;
mod state;

pub use hypothesis::{
    check_existence_hypothesis, check_monotone, find_existence_witness, AffineWitness, ExistenceReport, Interval,
};
pub use nonlinearity::Nonlinearity;
pub use problem::{ControlBounds, FieldSource, ProblemSpec};
pub use state::{cost, kkt_residual, solve_defect, KktResidual};

pub(crate) use state::{check_len, cost_values, defect_values};
