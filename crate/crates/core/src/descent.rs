//! Steepest descent for the unconstrained defect-regularized problem.
//!
//! Each iteration computes the defect `w` of the current pair, the steepest
//! descent directions
//!
//! ```text
//! U :  -Δ(U - λw) + (u - ū) - λφ'(u) w = 0,   U = 0 on ∂Ω
//! V :  V = -(μv + λw)
//! ```
//!
//! (`U` in the H¹₀ metric, `V` in L²), the first-order perturbation of the
//! defect `W : -Δ(U + W) + φ'(u) U = V`, and the step
//!
//! ```text
//! ε = -∫[(u - ū)U + μvV + λ∇w·∇W] / ∫(U² + μV² + λ|∇W|²)
//! ```
//!
//! which minimizes the cost exactly along `(U, V)` when `φ` is affine. The
//! run stops once `‖(U, V)‖² = ∫(|∇U|² + V²)` falls below `grad_tol²`. For
//! nonlinear `φ` the step is only a first-order model, so an optional
//! safeguard halves it until the cost does not increase.

use crate::error::{Error, Result};
use crate::model::{check_len, cost_values, defect_values, ProblemSpec};
use crate::numerics::{dot, ScalarField, Stiffness};
use crate::report::{IterationRecord, RunReport, RunStatus};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescentOptions {
    /// Stop once `‖(U, V)‖ ≤ grad_tol`.
    pub grad_tol: f64,
    pub max_iters: usize,
    /// Backtrack when the step formula fails to decrease the cost.
    pub safeguard: bool,
    pub backtrack_factor: f64,
    pub min_step: f64,
}

impl Default for DescentOptions {
    fn default() -> Self {
        Self {
            grad_tol: 1e-6,
            max_iters: 5000,
            safeguard: true,
            backtrack_factor: 0.5,
            min_step: 1e-12,
        }
    }
}

impl DescentOptions {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidOptions(m));
        if !(self.grad_tol > 0.0) {
            return bad(format!("grad_tol must be positive, got {}", self.grad_tol));
        }
        if self.max_iters < 1 {
            return bad("max_iters must be at least 1".into());
        }
        if !(self.backtrack_factor > 0.0 && self.backtrack_factor < 1.0) {
            return bad(format!(
                "backtrack_factor must lie in (0, 1), got {}",
                self.backtrack_factor
            ));
        }
        if !(self.min_step > 0.0) {
            return bad(format!("min_step must be positive, got {}", self.min_step));
        }
        Ok(())
    }
}

/// An iterate together with its defect and diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct DescentState {
    /// Number of accepted updates.
    pub iter: usize,
    pub u: ScalarField,
    pub v: ScalarField,
    /// Defect of `(u, v)`.
    pub w: ScalarField,
    pub cost: f64,
    /// `∫(|∇U|² + V²)` at this iterate.
    pub grad_norm_sq: f64,
    /// Last step size taken, 0 before the first step.
    pub eps: f64,
    /// `sqrt(wᵀKw)`.
    pub residual_h1: f64,
}

#[derive(Debug, Clone)]
pub struct DescentOutcome {
    pub state: DescentState,
    pub report: RunReport,
}

pub(crate) fn direction_u_values(u: &[f64], w: &[f64], spec: &ProblemSpec, k: &Stiffness) -> Result<Vec<f64>> {
    let h2 = spec.grid().cell_area();
    let lambda = spec.lambda();
    let phi = spec.phi();
    let rhs: Vec<f64> = u
        .iter()
        .zip(w)
        .zip(spec.target().values())
        .map(|((&ui, &wi), &ti)| h2 * (lambda * phi.deriv(ui) * wi - (ui - ti)))
        .collect();
    let mut du = k.solve(&rhs)?;
    for (d, wi) in du.iter_mut().zip(w) {
        *d += lambda * wi;
    }
    Ok(du)
}

pub(crate) fn perturbation_values(
    u: &[f64],
    du: &[f64],
    dv: &[f64],
    spec: &ProblemSpec,
    k: &Stiffness,
) -> Result<Vec<f64>> {
    let h2 = spec.grid().cell_area();
    let phi = spec.phi();
    let rhs: Vec<f64> = (0..u.len()).map(|p| h2 * (dv[p] - phi.deriv(u[p]) * du[p])).collect();
    let mut dw = k.solve(&rhs)?;
    for (d, x) in dw.iter_mut().zip(du) {
        *d -= x;
    }
    Ok(dw)
}

/// `(numerator, denominator)` of the step formula; the numerator is the
/// directional derivative of the cost along `(du, dv)`.
#[allow(clippy::too_many_arguments)]
fn step_terms(
    u: &[f64],
    v: &[f64],
    w: &[f64],
    du: &[f64],
    dv: &[f64],
    dw: &[f64],
    spec: &ProblemSpec,
    k: &Stiffness,
) -> (f64, f64) {
    let h2 = spec.grid().cell_area();
    let mu = spec.effective_mu();
    let lambda = spec.lambda();
    let tracking: f64 = u
        .iter()
        .zip(spec.target().values())
        .zip(du)
        .map(|((a, b), d)| (a - b) * d)
        .sum();
    let num = h2 * (tracking + mu * dot(v, dv)) + lambda * k.inner(w, dw);
    let den = h2 * (dot(du, du) + mu * dot(dv, dv)) + lambda * k.energy(dw);
    (num, den)
}

/// Steepest-descent direction in `u`: the solution of
/// `K U = λKw - h²(u - ū) + λh² φ'(u) w`.
pub fn direction_u(u: &ScalarField, w: &ScalarField, spec: &ProblemSpec, k: &Stiffness) -> Result<ScalarField> {
    check_len(spec, &[u, w])?;
    Ok(ScalarField::from_vec(
        spec.grid(),
        direction_u_values(u.values(), w.values(), spec, k)?,
    ))
}

/// Steepest-descent direction in `v`: `-(μv + λw)`.
pub fn direction_v(v: &ScalarField, w: &ScalarField, spec: &ProblemSpec) -> Result<ScalarField> {
    check_len(spec, &[v, w])?;
    let (mu, lambda) = (spec.effective_mu(), spec.lambda());
    let dv = v
        .values()
        .iter()
        .zip(w.values())
        .map(|(vi, wi)| -(mu * vi + lambda * wi))
        .collect();
    Ok(ScalarField::from_vec(spec.grid(), dv))
}

/// First-order change `W` of the defect along `(U, V)`:
/// `K W = h²(V - φ'(u) U) - K U`.
pub fn perturbation_defect(
    u: &ScalarField,
    du: &ScalarField,
    dv: &ScalarField,
    spec: &ProblemSpec,
    k: &Stiffness,
) -> Result<ScalarField> {
    check_len(spec, &[u, du, dv])?;
    let dw = perturbation_values(u.values(), du.values(), dv.values(), spec, k)?;
    Ok(ScalarField::from_vec(spec.grid(), dw))
}

/// `∫[(u - ū)U + μvV + λ∇w·∇W]`, the derivative of the cost along `(U, V)`
/// when `W` is the matching defect perturbation.
#[allow(clippy::too_many_arguments)]
pub fn directional_derivative(
    u: &ScalarField,
    v: &ScalarField,
    w: &ScalarField,
    du: &ScalarField,
    dv: &ScalarField,
    dw: &ScalarField,
    spec: &ProblemSpec,
    k: &Stiffness,
) -> Result<f64> {
    check_len(spec, &[u, v, w, du, dv, dw])?;
    Ok(step_terms(
        u.values(),
        v.values(),
        w.values(),
        du.values(),
        dv.values(),
        dw.values(),
        spec,
        k,
    )
    .0)
}

/// Step size minimizing the quadratic model of the cost along `(U, V)`.
#[allow(clippy::too_many_arguments)]
pub fn step_size(
    u: &ScalarField,
    v: &ScalarField,
    w: &ScalarField,
    du: &ScalarField,
    dv: &ScalarField,
    dw: &ScalarField,
    spec: &ProblemSpec,
    k: &Stiffness,
) -> Result<f64> {
    check_len(spec, &[u, v, w, du, dv, dw])?;
    let (num, den) = step_terms(
        u.values(),
        v.values(),
        w.values(),
        du.values(),
        dv.values(),
        dw.values(),
        spec,
        k,
    );
    if !(den > 0.0) || !den.is_finite() {
        return Err(Error::DegenerateDirection { denominator: den });
    }
    Ok(-num / den)
}

/// Runs steepest descent from `init` (default `(0, 0)`).
pub fn run_descent(
    spec: &ProblemSpec,
    opts: &DescentOptions,
    init: Option<(ScalarField, ScalarField)>,
) -> Result<DescentOutcome> {
    run_descent_with(spec, opts, init, &Stiffness::new(spec.grid()))
}

/// [`run_descent`] with a caller-supplied stiffness operator.
pub fn run_descent_with(
    spec: &ProblemSpec,
    opts: &DescentOptions,
    init: Option<(ScalarField, ScalarField)>,
    k: &Stiffness,
) -> Result<DescentOutcome> {
    opts.validate()?;
    if spec.is_constrained() {
        return Err(Error::InvalidProblem(
            "steepest descent handles unconstrained problems; use the barrier solver".into(),
        ));
    }
    let grid = spec.grid();
    if k.grid() != grid {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            found: k.grid().len(),
        });
    }
    let (u0, v0) = init.unwrap_or_else(|| (ScalarField::zeros(grid), ScalarField::zeros(grid)));
    check_len(spec, &[&u0, &v0])?;

    let h2 = grid.cell_area();
    let mu = spec.effective_mu();
    let lambda = spec.lambda();
    let mut u = u0.into_values();
    let mut v = v0.into_values();
    let mut w = defect_values(&u, &v, spec, k)?;
    let mut cost = cost_values(&u, &v, &w, spec, k);
    let mut records = Vec::new();
    let mut last_eps = 0.0;
    let mut iter = 0;

    let (status, grad_norm_sq) = loop {
        let du = direction_u_values(&u, &w, spec, k)?;
        let dv: Vec<f64> = v.iter().zip(&w).map(|(vi, wi)| -(mu * vi + lambda * wi)).collect();
        let grad_norm_sq = k.energy(&du) + h2 * dot(&dv, &dv);
        let residual_h1 = k.energy(&w).sqrt();
        let mut record = IterationRecord {
            iter,
            cost,
            grad_norm: grad_norm_sq.sqrt(),
            eps: 0.0,
            residual_h1,
        };
        if grad_norm_sq <= opts.grad_tol * opts.grad_tol {
            records.push(record);
            break (RunStatus::Converged, grad_norm_sq);
        }
        if iter >= opts.max_iters {
            records.push(record);
            break (RunStatus::IterationLimit, grad_norm_sq);
        }

        let dw = perturbation_values(&u, &du, &dv, spec, k)?;
        let (num, den) = step_terms(&u, &v, &w, &du, &dv, &dw, spec, k);
        if !(den > 0.0) || !den.is_finite() {
            return Err(Error::DegenerateDirection { denominator: den });
        }
        let mut eps = -num / den;
        if !(eps > 0.0) {
            records.push(record);
            break (RunStatus::Stalled, grad_norm_sq);
        }

        let accepted = loop {
            let un: Vec<f64> = u.iter().zip(&du).map(|(a, d)| a + eps * d).collect();
            let vn: Vec<f64> = v.iter().zip(&dv).map(|(a, d)| a + eps * d).collect();
            let wn = defect_values(&un, &vn, spec, k)?;
            let cn = cost_values(&un, &vn, &wn, spec, k);
            if !opts.safeguard || cn <= cost {
                break Some((un, vn, wn, cn));
            }
            eps *= opts.backtrack_factor;
            if eps < opts.min_step {
                break None;
            }
        };
        let Some((un, vn, wn, cn)) = accepted else {
            records.push(record);
            break (RunStatus::Stalled, grad_norm_sq);
        };
        record.eps = eps;
        records.push(record);
        u = un;
        v = vn;
        w = wn;
        cost = cn;
        last_eps = eps;
        iter += 1;
    };

    let residual_h1 = k.energy(&w).sqrt();
    Ok(DescentOutcome {
        state: DescentState {
            iter,
            u: ScalarField::new(grid, u)?,
            v: ScalarField::new(grid, v)?,
            w: ScalarField::new(grid, w)?,
            cost,
            grad_norm_sq,
            eps: last_eps,
            residual_h1,
        },
        report: RunReport { records, status },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{kkt_residual, solve_defect, FieldSource, Nonlinearity};
    use crate::numerics::build_grid;

    fn spec(n: usize, target: FieldSource, phi: Nonlinearity, mu: f64, lambda: f64) -> ProblemSpec {
        let g = build_grid(n).unwrap();
        ProblemSpec::new(target.build(g).unwrap(), phi, mu, lambda).unwrap()
    }

    #[test]
    fn direction_v_arithmetic() {
        let s = spec(4, FieldSource::Zero, Nonlinearity::ZERO, 1.0, 1.0);
        let g = s.grid();
        let dv = direction_v(&ScalarField::constant(g, 1.0), &ScalarField::constant(g, -1.0), &s).unwrap();
        assert!(dv.values().iter().all(|&x| x == 0.0));

        let s = spec(4, FieldSource::Zero, Nonlinearity::ZERO, 0.01, 1.0);
        let dv = direction_v(&ScalarField::constant(g, 2.0), &ScalarField::constant(g, 0.5), &s).unwrap();
        assert!(dv.values().iter().all(|&x| (x + 0.52).abs() < 1e-15));
    }

    #[test]
    fn direction_u_vanishes_at_target() {
        let s = spec(6, FieldSource::MinX, Nonlinearity::ShiftedCubic, 1e-3, 1.0);
        let k = Stiffness::new(s.grid());
        let du = direction_u(s.target(), &ScalarField::zeros(s.grid()), &s, &k).unwrap();
        assert!(du.sup_norm() == 0.0);
    }

    #[test]
    fn already_optimal_start() {
        let s = spec(8, FieldSource::Zero, Nonlinearity::ZERO, 1e-4, 1.0);
        let out = run_descent(&s, &DescentOptions::default(), None).unwrap();
        assert_eq!(out.state.iter, 0);
        assert_eq!(out.state.cost, 0.0);
        assert_eq!(out.report.status, RunStatus::Converged);
        assert_eq!(out.report.records.len(), 1);
    }

    #[test]
    fn affine_run_reaches_stationarity() {
        let s = spec(8, FieldSource::MinX, Nonlinearity::affine(-1.0, 0.5), 1e-2, 1.0);
        let k = Stiffness::new(s.grid());
        let opts = DescentOptions {
            grad_tol: 1e-9,
            max_iters: 20_000,
            ..Default::default()
        };
        let out = run_descent_with(&s, &opts, None, &k).unwrap();
        assert!(out.report.status.is_converged());
        let st = &out.state;
        let w = solve_defect(&st.u, &st.v, &s, &k).unwrap();
        assert!(w.add_scaled(-1.0, &st.w).unwrap().sup_norm() < 1e-12);
        let r = kkt_residual(&st.u, &st.v, &st.w, &s, &k).unwrap();
        assert!(r.max() < 1e-7, "{r:?}");
        for pair in out.report.records.windows(2) {
            assert!(pair[1].cost <= pair[0].cost);
            assert!(pair[0].eps > 0.0);
        }
    }

    #[test]
    fn constrained_spec_is_rejected() {
        let g = build_grid(4).unwrap();
        let s = ProblemSpec::new(ScalarField::zeros(g), Nonlinearity::ZERO, 0.0, 1.0)
            .unwrap()
            .with_bounds(ScalarField::constant(g, -1.0), ScalarField::constant(g, 1.0))
            .unwrap();
        assert!(matches!(
            run_descent(&s, &DescentOptions::default(), None),
            Err(Error::InvalidProblem(_))
        ));
    }

    #[test]
    fn invalid_options() {
        for opts in [
            DescentOptions {
                grad_tol: 0.0,
                ..Default::default()
            },
            DescentOptions {
                max_iters: 0,
                ..Default::default()
            },
            DescentOptions {
                backtrack_factor: 1.0,
                ..Default::default()
            },
        ] {
            assert!(opts.validate().is_err());
        }
    }

    #[test]
    fn zero_direction_is_degenerate() {
        let s = spec(4, FieldSource::Zero, Nonlinearity::ZERO, 1e-2, 1.0);
        let k = Stiffness::new(s.grid());
        let z = ScalarField::zeros(s.grid());
        assert!(matches!(
            step_size(&z, &z, &z, &z, &z, &z, &s, &k),
            Err(Error::DegenerateDirection { .. })
        ));
    }
}
