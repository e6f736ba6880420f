//! λ-continuation and the classical (exact state law) reference solution.
//!
//! As `λ → ∞` the defect is driven to zero and optimal pairs of the relaxed
//! problem approach the optimum of the classical problem
//!
//! ```text
//! minimize ½‖u - ū‖² + μ/2 ‖v‖²   subject to   -Δu + φ(u) = v,  u = 0 on ∂Ω.
//! ```
//!
//! For affine monotone `φ` and `μ > 0` that problem is a strictly convex
//! quadratic program whose discrete optimality system is linear; it is
//! solved here directly, without any of the defect machinery, so it serves
//! as an independent reference.

use std::io::Write;
use std::path::Path;

use crate::descent::{run_descent_with, DescentOptions, DescentOutcome};
use crate::error::{Error, Result};
use crate::model::{check_len, ProblemSpec};
use crate::numerics::{assemble_stiffness, conjugate_gradient, CsrMatrix, ScalarField, Stiffness};
use crate::report::RunStatus;

/// Relative tolerance of the oracle's conjugate-gradient solves.
const ORACLE_TOL: f64 = 1e-13;

/// Optimal state, control and adjoint of the classical problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalSolution {
    pub state: ScalarField,
    pub control: ScalarField,
    /// Adjoint `p` with `(K + c₁h²) p = -h²(u - ū)`; optimality reads
    /// `μ v = p`.
    pub adjoint: ScalarField,
}

impl ClassicalSolution {
    /// `‖μ v - p‖` in L², zero at the exact optimum.
    pub fn reduced_gradient_norm(&self, mu: f64) -> f64 {
        self.control
            .map(|x| mu * x)
            .add_scaled(-1.0, &self.adjoint)
            .expect("fields share a grid")
            .l2_norm()
    }
}

/// `Some((c0, c1))` when the classical problem is a strictly convex QP.
fn oracle_coefficients(spec: &ProblemSpec) -> Option<(f64, f64)> {
    let (c0, c1) = spec.phi().as_affine()?;
    (c1 >= 0.0 && spec.mu() > 0.0 && !spec.is_constrained()).then_some((c0, c1))
}

/// Solves the discrete classical problem for affine `φ(u) = c₀ + c₁u`.
///
/// With `A = K + c₁h² I` the optimality system is
///
/// ```text
/// A u = h²(v - c₀),   A p = -h²(u - ū),   μ v = p,
/// ```
///
/// which eliminates to the SPD system `(A² + h⁴/μ I) u = h⁴/μ ū - h² c₀ A 1`.
pub fn classical_kkt_solve(spec: &ProblemSpec) -> Result<ClassicalSolution> {
    let (c0, c1) = oracle_coefficients(spec).ok_or_else(|| {
        Error::InvalidProblem(
            "the classical reference needs an unconstrained problem with affine monotone φ and μ > 0".into(),
        )
    })?;
    let grid = spec.grid();
    let m = grid.len();
    let h2 = grid.cell_area();
    let mu = spec.mu();
    let a: CsrMatrix = assemble_stiffness(grid).shifted(c1 * h2);
    let shift = h2 * h2 / mu;
    let max_iter = 50 * m + 100;

    let a_ones = a.mul(&vec![1.0; m]);
    let rhs: Vec<f64> = (0..m)
        .map(|p| shift * spec.target().get(p) - h2 * c0 * a_ones[p])
        .collect();
    let mut tmp = vec![0.0; m];
    let normal = |x: &[f64], y: &mut [f64]| {
        let mut t = vec![0.0; x.len()];
        a.mul_into(x, &mut t);
        a.mul_into(&t, y);
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi += shift * xi;
        }
    };
    let (u, _) = conjugate_gradient(normal, &rhs, ORACLE_TOL, max_iter)?;

    a.mul_into(&u, &mut tmp);
    let v: Vec<f64> = tmp.iter().map(|au| au / h2 + c0).collect();
    let adjoint_rhs: Vec<f64> = (0..m).map(|p| -h2 * (u[p] - spec.target().get(p))).collect();
    let (p, _) = conjugate_gradient(|x, y| a.mul_into(x, y), &adjoint_rhs, ORACLE_TOL, max_iter)?;

    Ok(ClassicalSolution {
        state: ScalarField::new(grid, u)?,
        control: ScalarField::new(grid, v)?,
        adjoint: ScalarField::new(grid, p)?,
    })
}

/// Diagnostics of the relaxed optimum at one `λ`.
#[derive(Debug, Clone)]
pub struct LambdaSolution {
    pub outcome: DescentOutcome,
    /// `sqrt(wᵀKw)`.
    pub residual_h1: f64,
    /// `λ (wᵀKw + h² Σ w²)`, the discrete `λ ‖w‖²_{H¹₀}`.
    pub weighted_residual: f64,
    /// L² norm of `-Δu + φ(u) - v`, the violation of the exact state law.
    pub exact_law_residual: f64,
    /// `‖u_λ - ũ‖` in L², when the classical reference applies.
    pub dist_u_oracle: Option<f64>,
    /// `‖v_λ - ṽ‖` in L², when the classical reference applies.
    pub dist_v_oracle: Option<f64>,
}

impl LambdaSolution {
    pub fn status(&self) -> RunStatus {
        self.outcome.report.status
    }
}

#[derive(Debug)]
pub struct ContinuationEntry {
    pub lambda: f64,
    pub result: Result<LambdaSolution>,
}

#[derive(Debug)]
pub struct ContinuationResult {
    pub entries: Vec<ContinuationEntry>,
    pub oracle: Option<ClassicalSolution>,
}

impl ContinuationResult {
    pub fn lambdas(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.lambda).collect()
    }

    /// Successful solutions in sweep order.
    pub fn solutions(&self) -> impl Iterator<Item = (f64, &LambdaSolution)> {
        self.entries
            .iter()
            .filter_map(|e| e.result.as_ref().ok().map(|s| (e.lambda, s)))
    }

    pub fn all_converged(&self) -> bool {
        self.entries
            .iter()
            .all(|e| e.result.as_ref().is_ok_and(|s| s.status().is_converged()))
    }

    /// `lambda,cost,residual_h1,weighted_residual,dist_u_oracle,dist_v_oracle`;
    /// oracle cells are empty when the reference does not apply, and all
    /// cells but `lambda` are empty for failed solves.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        out.write_record([
            "lambda",
            "cost",
            "residual_h1",
            "weighted_residual",
            "dist_u_oracle",
            "dist_v_oracle",
        ])?;
        let fmt = |x: f64| format!("{x:.15e}");
        let opt = |x: Option<f64>| x.map(fmt).unwrap_or_default();
        for e in &self.entries {
            let row = match &e.result {
                Ok(s) => [
                    fmt(e.lambda),
                    fmt(s.outcome.state.cost),
                    fmt(s.residual_h1),
                    fmt(s.weighted_residual),
                    opt(s.dist_u_oracle),
                    opt(s.dist_v_oracle),
                ],
                Err(_) => [
                    fmt(e.lambda),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                ],
            };
            out.write_record(&row)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(file))
    }
}

/// Checks that the sweep is non-empty, positive and strictly increasing.
pub fn validate_sweep(lambdas: &[f64]) -> Result<()> {
    if lambdas.is_empty() {
        return Err(Error::InvalidOptions("lambda sweep is empty".into()));
    }
    if let Some(bad) = lambdas.iter().find(|l| !(**l > 0.0 && l.is_finite())) {
        return Err(Error::InvalidOptions(format!(
            "lambda values must be positive and finite, got {bad}"
        )));
    }
    if let Some(w) = lambdas.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::InvalidOptions(format!(
            "lambda sweep must be strictly increasing ({} is followed by {})",
            w[0], w[1]
        )));
    }
    Ok(())
}

fn exact_law_residual(u: &ScalarField, v: &ScalarField, spec: &ProblemSpec, k: &Stiffness) -> f64 {
    let h2 = spec.grid().cell_area();
    let ku = k.apply(u.values());
    let sum: f64 = (0..u.len())
        .map(|p| {
            let r = ku[p] + h2 * (spec.phi().eval(u.get(p)) - v.get(p));
            r * r
        })
        .sum();
    sum.sqrt() / spec.grid().h()
}

/// Solves the relaxed problem for each `λ` in turn, warm-starting from the
/// previous solution. A failed solve is recorded and the sweep continues
/// from the last successful iterate.
pub fn run_continuation(spec: &ProblemSpec, lambdas: &[f64], opts: &DescentOptions) -> Result<ContinuationResult> {
    validate_sweep(lambdas)?;
    opts.validate()?;
    if spec.is_constrained() {
        return Err(Error::InvalidProblem(
            "continuation runs on unconstrained problems".into(),
        ));
    }
    let oracle = match oracle_coefficients(spec) {
        Some(_) => Some(classical_kkt_solve(spec)?),
        None => None,
    };
    let k = Stiffness::new(spec.grid());
    let mut init: Option<(ScalarField, ScalarField)> = None;
    let mut entries = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let result = spec
            .with_lambda(lambda)
            .and_then(|s| run_descent_with(&s, opts, init.clone(), &k).map(|out| (s, out)))
            .map(|(s, outcome)| {
                let st = &outcome.state;
                let w = st.w.values();
                let h2 = s.grid().cell_area();
                let energy = k.energy(w);
                let mass: f64 = w.iter().map(|x| x * x).sum();
                let dist = |a: &ScalarField, b: &ScalarField| a.add_scaled(-1.0, b).map(|d| d.l2_norm()).ok();
                LambdaSolution {
                    residual_h1: energy.sqrt(),
                    weighted_residual: lambda * (energy + h2 * mass),
                    exact_law_residual: exact_law_residual(&st.u, &st.v, &s, &k),
                    dist_u_oracle: oracle.as_ref().and_then(|o| dist(&st.u, &o.state)),
                    dist_v_oracle: oracle.as_ref().and_then(|o| dist(&st.v, &o.control)),
                    outcome,
                }
            });
        match &result {
            Ok(sol) => {
                check_len(spec, &[&sol.outcome.state.u])?;
                init = Some((sol.outcome.state.u.clone(), sol.outcome.state.v.clone()));
            }
            Err(e) => log::warn!("continuation: solve at lambda = {lambda} failed: {e}"),
        }
        entries.push(ContinuationEntry { lambda, result });
    }
    Ok(ContinuationResult { entries, oracle })
}
