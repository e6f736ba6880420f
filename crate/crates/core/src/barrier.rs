//! Exponential barriers for the constraints `u ≤ 0` and `v₋ ≤ v ≤ v₊`.
//!
//! Positive multiplier fields `a, b⁻, b⁺` weight the barrier terms
//!
//! ```text
//! exp(a u) + exp(b⁻ (v₋ - v)) + exp(b⁺ (v - v₊))
//! ```
//!
//! added to the cost. Each outer iteration minimizes the barrier-augmented
//! cost freely in `(u, v)` and then updates the multipliers pointwise,
//!
//! ```text
//! a ← a exp(a u),   b⁻ ← b⁻ exp(b⁻ (v₋ - v)),   b⁺ ← b⁺ exp(b⁺ (v - v₊)),
//! ```
//!
//! so multipliers grow where a constraint is violated and decay where it is
//! slack. The products `a u`, `b⁻ (v₋ - v)` and `b⁺ (v - v₊)` tending to zero
//! certify convergence to the constrained optimum.
//!
//! Exponent arguments are clamped to `±EXP_CLAMP` everywhere.

use std::io::Write;
use std::path::Path;

use crate::descent::{perturbation_values, DescentOptions, DescentState};
use crate::error::{Error, Result};
use crate::model::{check_len, defect_values, ControlBounds, ProblemSpec};
use crate::numerics::{dot, Grid, ScalarField, Stiffness};
use crate::report::RunStatus;

/// Bound on the argument of every barrier exponential.
pub const EXP_CLAMP: f64 = 30.0;

/// Armijo sufficient-decrease constant of the inner solver.
pub const ARMIJO_C1: f64 = 1e-4;

fn clamped_exp(z: f64) -> f64 {
    z.clamp(-EXP_CLAMP, EXP_CLAMP).exp()
}

/// Pointwise multiplier fields, strictly positive everywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct BarrierMultipliers {
    /// Weight of the state constraint `u ≤ 0`.
    pub a: ScalarField,
    /// Weight of the lower control bound.
    pub lower: ScalarField,
    /// Weight of the upper control bound.
    pub upper: ScalarField,
}

impl BarrierMultipliers {
    pub fn new(a: ScalarField, lower: ScalarField, upper: ScalarField) -> Result<Self> {
        a.ensure_same_grid(&lower)?;
        a.ensure_same_grid(&upper)?;
        for (name, f) in [("a", &a), ("b-", &lower), ("b+", &upper)] {
            if let Some(p) = f.values().iter().position(|&x| !(x > 0.0)) {
                return Err(Error::InvalidProblem(format!(
                    "multiplier {name} must be strictly positive, found {} at node {p}",
                    f.get(p)
                )));
            }
        }
        Ok(Self { a, lower, upper })
    }

    pub fn constant(grid: Grid, value: f64) -> Result<Self> {
        Self::new(
            ScalarField::constant(grid, value),
            ScalarField::constant(grid, value),
            ScalarField::constant(grid, value),
        )
    }

    pub fn min(&self) -> f64 {
        self.a.min().min(self.lower.min()).min(self.upper.min())
    }
}

/// The three certificate products after an inner solve.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificateReport {
    /// `a_{j-1} u_j`.
    pub state: ScalarField,
    /// `b⁻_{j-1} (v₋ - v_j)`.
    pub lower: ScalarField,
    /// `b⁺_{j-1} (v_j - v₊)`.
    pub upper: ScalarField,
}

impl CertificateReport {
    pub fn p_state(&self) -> f64 {
        self.state.sup_norm()
    }

    pub fn p_lower(&self) -> f64 {
        self.lower.sup_norm()
    }

    pub fn p_upper(&self) -> f64 {
        self.upper.sup_norm()
    }

    /// Largest of the three sup-norms.
    pub fn max_abs(&self) -> f64 {
        self.p_state().max(self.p_lower()).max(self.p_upper())
    }

    /// Largest positive part, i.e. the worst weighted violation.
    pub fn max_positive(&self) -> f64 {
        self.state.max().max(self.lower.max()).max(self.upper.max()).max(0.0)
    }

    pub fn write_fields(&self, dir: &Path) -> Result<()> {
        self.state.save_csv(dir.join("cert_a.csv"))?;
        self.lower.save_csv(dir.join("cert_bm.csv"))?;
        self.upper.save_csv(dir.join("cert_bp.csv"))?;
        Ok(())
    }
}

fn bounds_of(spec: &ProblemSpec) -> Result<&ControlBounds> {
    spec.bounds()
        .ok_or_else(|| Error::InvalidProblem("the barrier solver needs a constrained problem (control bounds)".into()))
}

fn check_multipliers(spec: &ProblemSpec, mult: &BarrierMultipliers) -> Result<()> {
    check_len(spec, &[&mult.a, &mult.lower, &mult.upper])
}

/// Barrier weights at one iterate: `e^{a u}`, `e^{b⁻(v₋-v)}`, `e^{b⁺(v-v₊)}`.
struct BarrierTerms {
    state: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BarrierTerms {
    fn new(u: &[f64], v: &[f64], mult: &BarrierMultipliers, bounds: &ControlBounds) -> Self {
        let (a, bm, bp) = (mult.a.values(), mult.lower.values(), mult.upper.values());
        let (lo, hi) = (bounds.lower.values(), bounds.upper.values());
        let m = u.len();
        Self {
            state: (0..m).map(|p| clamped_exp(a[p] * u[p])).collect(),
            lower: (0..m).map(|p| clamped_exp(bm[p] * (lo[p] - v[p]))).collect(),
            upper: (0..m).map(|p| clamped_exp(bp[p] * (v[p] - hi[p]))).collect(),
        }
    }

    fn sum(&self) -> f64 {
        self.state.iter().chain(&self.lower).chain(&self.upper).sum()
    }
}

fn barrier_cost_values(u: &[f64], w: &[f64], terms: &BarrierTerms, spec: &ProblemSpec, k: &Stiffness) -> f64 {
    let h2 = spec.grid().cell_area();
    let tracking: f64 = u
        .iter()
        .zip(spec.target().values())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    0.5 * h2 * tracking + 0.5 * spec.lambda() * k.energy(w) + h2 * terms.sum()
}

fn barrier_direction_values(
    u: &[f64],
    w: &[f64],
    terms: &BarrierTerms,
    mult: &BarrierMultipliers,
    spec: &ProblemSpec,
    k: &Stiffness,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let h2 = spec.grid().cell_area();
    let lambda = spec.lambda();
    let phi = spec.phi();
    let (a, bm, bp) = (mult.a.values(), mult.lower.values(), mult.upper.values());
    let target = spec.target().values();
    let rhs: Vec<f64> = (0..u.len())
        .map(|p| h2 * (lambda * phi.deriv(u[p]) * w[p] - (u[p] - target[p]) - a[p] * terms.state[p]))
        .collect();
    let mut du = k.solve(&rhs)?;
    for (d, wi) in du.iter_mut().zip(w) {
        *d += lambda * wi;
    }
    let dv = (0..u.len())
        .map(|p| -(lambda * w[p] - bm[p] * terms.lower[p] + bp[p] * terms.upper[p]))
        .collect();
    Ok((du, dv))
}

/// `½‖u - ū‖² + λ/2 wᵀKw + h² Σ [e^{a u} + e^{b⁻(v₋-v)} + e^{b⁺(v-v₊)}]`.
pub fn barrier_cost(
    u: &ScalarField,
    v: &ScalarField,
    w: &ScalarField,
    mult: &BarrierMultipliers,
    spec: &ProblemSpec,
    k: &Stiffness,
) -> Result<f64> {
    let bounds = bounds_of(spec)?;
    check_len(spec, &[u, v, w])?;
    check_multipliers(spec, mult)?;
    let terms = BarrierTerms::new(u.values(), v.values(), mult, bounds);
    Ok(barrier_cost_values(u.values(), w.values(), &terms, spec, k))
}

/// Steepest-descent directions of the barrier-augmented cost:
/// `K U = λKw - h²(u - ū) + λh² φ'(u) w - h² a e^{a u}` and
/// `V = -(λw - b⁻ e^{b⁻(v₋-v)} + b⁺ e^{b⁺(v-v₊)})`.
pub fn barrier_directions(
    u: &ScalarField,
    v: &ScalarField,
    w: &ScalarField,
    mult: &BarrierMultipliers,
    spec: &ProblemSpec,
    k: &Stiffness,
) -> Result<(ScalarField, ScalarField)> {
    let bounds = bounds_of(spec)?;
    check_len(spec, &[u, v, w])?;
    check_multipliers(spec, mult)?;
    let terms = BarrierTerms::new(u.values(), v.values(), mult, bounds);
    let (du, dv) = barrier_direction_values(u.values(), w.values(), &terms, mult, spec, k)?;
    Ok((
        ScalarField::from_vec(spec.grid(), du),
        ScalarField::from_vec(spec.grid(), dv),
    ))
}

/// Result of one inner minimization.
#[derive(Debug, Clone)]
pub struct InnerOutcome {
    pub state: DescentState,
    pub status: RunStatus,
}

/// Minimizes the barrier-augmented cost for fixed multipliers by steepest
/// descent with Armijo backtracking, starting from `init`.
///
/// The trial step is `-g'(0)/g''(0)` along the direction, with `g''(0)` the
/// exact second derivative of the quadratic part plus the barrier curvature.
/// `opts.safeguard` is ignored: the sufficient-decrease test always applies.
pub fn inner_solve(
    spec: &ProblemSpec,
    mult: &BarrierMultipliers,
    opts: &DescentOptions,
    init: (ScalarField, ScalarField),
    k: &Stiffness,
) -> Result<InnerOutcome> {
    opts.validate()?;
    let bounds = bounds_of(spec)?;
    check_multipliers(spec, mult)?;
    check_len(spec, &[&init.0, &init.1])?;
    let grid = spec.grid();
    let h2 = grid.cell_area();
    let lambda = spec.lambda();
    let affine = spec.phi().is_affine();
    let (a, bm, bp) = (mult.a.values(), mult.lower.values(), mult.upper.values());

    let mut u = init.0.into_values();
    let mut v = init.1.into_values();
    let mut w = defect_values(&u, &v, spec, k)?;
    let mut terms = BarrierTerms::new(&u, &v, mult, bounds);
    let mut cost = barrier_cost_values(&u, &w, &terms, spec, k);
    let mut iter = 0;
    let mut last_eps = 0.0;

    let (status, grad_norm_sq) = loop {
        let (du, dv) = barrier_direction_values(&u, &w, &terms, mult, spec, k)?;
        let grad_norm_sq = k.energy(&du) + h2 * dot(&dv, &dv);
        if grad_norm_sq <= opts.grad_tol * opts.grad_tol {
            break (RunStatus::Converged, grad_norm_sq);
        }
        if iter >= opts.max_iters {
            break (RunStatus::IterationLimit, grad_norm_sq);
        }
        let dw = perturbation_values(&u, &du, &dv, spec, k)?;
        let barrier_curvature: f64 = (0..u.len())
            .map(|p| {
                a[p] * a[p] * terms.state[p] * du[p] * du[p]
                    + (bm[p] * bm[p] * terms.lower[p] + bp[p] * bp[p] * terms.upper[p]) * dv[p] * dv[p]
            })
            .sum();
        let curvature = h2 * (dot(&du, &du) + barrier_curvature) + lambda * k.energy(&dw);
        if !(curvature > 0.0) || !curvature.is_finite() {
            return Err(Error::DegenerateDirection { denominator: curvature });
        }
        // the directional derivative along the steepest-descent pair is -‖(U, V)‖²
        let mut eps = grad_norm_sq / curvature;
        let accepted = loop {
            let un: Vec<f64> = u.iter().zip(&du).map(|(x, d)| x + eps * d).collect();
            let vn: Vec<f64> = v.iter().zip(&dv).map(|(x, d)| x + eps * d).collect();
            let wn = if affine {
                w.iter().zip(&dw).map(|(x, d)| x + eps * d).collect()
            } else {
                defect_values(&un, &vn, spec, k)?
            };
            let tn = BarrierTerms::new(&un, &vn, mult, bounds);
            let cn = barrier_cost_values(&un, &wn, &tn, spec, k);
            if cn <= cost - ARMIJO_C1 * eps * grad_norm_sq {
                break Some((un, vn, wn, tn, cn));
            }
            eps *= opts.backtrack_factor;
            if eps < opts.min_step {
                break None;
            }
        };
        let Some((un, vn, wn, tn, cn)) = accepted else {
            break (RunStatus::Stalled, grad_norm_sq);
        };
        u = un;
        v = vn;
        w = wn;
        terms = tn;
        cost = cn;
        last_eps = eps;
        iter += 1;
    };

    let residual_h1 = k.energy(&w).sqrt();
    Ok(InnerOutcome {
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
        status,
    })
}

/// Certificate products of the multipliers used for the last inner solve
/// and its solution.
pub fn certificates(
    mult: &BarrierMultipliers,
    u: &ScalarField,
    v: &ScalarField,
    spec: &ProblemSpec,
) -> Result<CertificateReport> {
    let bounds = bounds_of(spec)?;
    check_len(spec, &[u, v])?;
    check_multipliers(spec, mult)?;
    let grid = spec.grid();
    let m = grid.len();
    let (a, bm, bp) = (mult.a.values(), mult.lower.values(), mult.upper.values());
    let (lo, hi) = (bounds.lower.values(), bounds.upper.values());
    let (uu, vv) = (u.values(), v.values());
    Ok(CertificateReport {
        state: ScalarField::from_vec(grid, (0..m).map(|p| a[p] * uu[p]).collect()),
        lower: ScalarField::from_vec(grid, (0..m).map(|p| bm[p] * (lo[p] - vv[p])).collect()),
        upper: ScalarField::from_vec(grid, (0..m).map(|p| bp[p] * (vv[p] - hi[p])).collect()),
    })
}

/// `m ← m exp(m g)` with the clamped exponential, kept within the positive
/// normal range so multipliers never reach zero or overflow.
fn update_one(m: f64, g: f64) -> f64 {
    (m * clamped_exp(m * g)).clamp(f64::MIN_POSITIVE, f64::MAX)
}

/// Multiplicative multiplier update after an inner solve with result
/// `(u_j, v_j)`.
pub fn update_multipliers(
    mult: &BarrierMultipliers,
    u: &ScalarField,
    v: &ScalarField,
    spec: &ProblemSpec,
) -> Result<BarrierMultipliers> {
    let bounds = bounds_of(spec)?;
    check_len(spec, &[u, v])?;
    check_multipliers(spec, mult)?;
    let grid = spec.grid();
    let m = grid.len();
    let (a, bm, bp) = (mult.a.values(), mult.lower.values(), mult.upper.values());
    let (lo, hi) = (bounds.lower.values(), bounds.upper.values());
    let (uu, vv) = (u.values(), v.values());
    Ok(BarrierMultipliers {
        a: ScalarField::from_vec(grid, (0..m).map(|p| update_one(a[p], uu[p])).collect()),
        lower: ScalarField::from_vec(grid, (0..m).map(|p| update_one(bm[p], lo[p] - vv[p])).collect()),
        upper: ScalarField::from_vec(grid, (0..m).map(|p| update_one(bp[p], vv[p] - hi[p])).collect()),
    })
}

/// Largest violation of `u ≤ 0`.
pub fn state_violation(u: &ScalarField) -> f64 {
    u.max().max(0.0)
}

/// Largest violation of `v₋ ≤ v ≤ v₊`.
pub fn control_violation(v: &ScalarField, bounds: &ControlBounds) -> f64 {
    (0..v.len()).fold(0.0, |worst: f64, p| {
        worst
            .max(bounds.lower.get(p) - v.get(p))
            .max(v.get(p) - bounds.upper.get(p))
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierOptions {
    /// Options of every inner minimization.
    pub inner: DescentOptions,
    /// Stop once all certificate products and constraint violations are at
    /// most this large.
    pub outer_tol: f64,
    pub max_outer: usize,
    /// Constant initial value of `a`, `b⁻` and `b⁺`.
    pub initial_multiplier: f64,
}

impl Default for BarrierOptions {
    fn default() -> Self {
        Self {
            // Each outer step moves the multipliers only slightly, so solving
            // the inner problems more accurately than this buys nothing.
            inner: DescentOptions {
                grad_tol: 1e-5,
                ..DescentOptions::default()
            },
            outer_tol: 1e-3,
            max_outer: 10_000,
            initial_multiplier: 0.1,
        }
    }
}

impl BarrierOptions {
    pub fn validate(&self) -> Result<()> {
        self.inner.validate()?;
        if !(self.outer_tol > 0.0) {
            return Err(Error::InvalidOptions(format!(
                "outer_tol must be positive, got {}",
                self.outer_tol
            )));
        }
        if self.max_outer < 1 {
            return Err(Error::InvalidOptions("max_outer must be at least 1".into()));
        }
        if !(self.initial_multiplier > 0.0 && self.initial_multiplier.is_finite()) {
            return Err(Error::InvalidOptions(format!(
                "initial multiplier must be positive, got {}",
                self.initial_multiplier
            )));
        }
        Ok(())
    }
}

/// One row of the outer-iteration log.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OuterRecord {
    pub outer_iter: usize,
    pub inner_iters: usize,
    /// Barrier-augmented cost at the inner solution.
    pub cost: f64,
    pub cert_state: f64,
    pub cert_lower: f64,
    pub cert_upper: f64,
    pub max_violation_u: f64,
    pub max_violation_v: f64,
}

impl OuterRecord {
    pub fn max_certificate(&self) -> f64 {
        self.cert_state.max(self.cert_lower).max(self.cert_upper)
    }
}

/// `outer_iter,inner_iters,cost,cert_state,cert_lower,cert_upper,max_violation_u,max_violation_v`.
pub fn write_outer_log<W: Write>(log: &[OuterRecord], writer: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record([
        "outer_iter",
        "inner_iters",
        "cost",
        "cert_state",
        "cert_lower",
        "cert_upper",
        "max_violation_u",
        "max_violation_v",
    ])?;
    for r in log {
        let mut row = vec![r.outer_iter.to_string(), r.inner_iters.to_string()];
        row.extend(
            [
                r.cost,
                r.cert_state,
                r.cert_lower,
                r.cert_upper,
                r.max_violation_u,
                r.max_violation_v,
            ]
            .iter()
            .map(|x| format!("{x:.15e}")),
        );
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Debug, Clone)]
pub struct BarrierOutcome {
    /// Solution of the last inner minimization.
    pub state: DescentState,
    /// Multipliers that produced `state`.
    pub multipliers: BarrierMultipliers,
    pub certificates: CertificateReport,
    pub log: Vec<OuterRecord>,
    pub status: RunStatus,
    /// Inner iterations summed over all outer iterations.
    pub total_inner_iters: usize,
}

/// Runs the barrier scheme from `(u, v) = (0, 0)` with constant initial
/// multipliers.
pub fn run_barrier(spec: &ProblemSpec, opts: &BarrierOptions) -> Result<BarrierOutcome> {
    run_barrier_with(spec, opts, &Stiffness::new(spec.grid()), |_| {})
}

/// [`run_barrier`] with a caller-supplied stiffness and a callback invoked
/// after every outer iteration.
pub fn run_barrier_with(
    spec: &ProblemSpec,
    opts: &BarrierOptions,
    k: &Stiffness,
    mut on_outer: impl FnMut(&OuterRecord),
) -> Result<BarrierOutcome> {
    opts.validate()?;
    let bounds = bounds_of(spec)?;
    let grid = spec.grid();
    let mut mult = BarrierMultipliers::constant(grid, opts.initial_multiplier)?;
    let mut init = (ScalarField::zeros(grid), ScalarField::zeros(grid));
    let mut log = Vec::new();
    let mut total_inner_iters = 0;

    for outer_iter in 1..=opts.max_outer {
        let inner = inner_solve(spec, &mult, &opts.inner, init, k)?;
        if inner.status == RunStatus::Stalled {
            log::debug!(
                "outer iteration {outer_iter}: inner solve stalled at ‖(U,V)‖² = {:.3e}",
                inner.state.grad_norm_sq
            );
        }
        total_inner_iters += inner.state.iter;
        let certs = certificates(&mult, &inner.state.u, &inner.state.v, spec)?;
        let record = OuterRecord {
            outer_iter,
            inner_iters: inner.state.iter,
            cost: inner.state.cost,
            cert_state: certs.p_state(),
            cert_lower: certs.p_lower(),
            cert_upper: certs.p_upper(),
            max_violation_u: state_violation(&inner.state.u),
            max_violation_v: control_violation(&inner.state.v, bounds),
        };
        on_outer(&record);
        log.push(record);
        let done = record.max_certificate() <= opts.outer_tol
            && record.max_violation_u <= opts.outer_tol
            && record.max_violation_v <= opts.outer_tol;
        if done || outer_iter == opts.max_outer {
            return Ok(BarrierOutcome {
                state: inner.state,
                multipliers: mult,
                certificates: certs,
                log,
                status: if done {
                    RunStatus::Converged
                } else {
                    RunStatus::IterationLimit
                },
                total_inner_iters,
            });
        }
        mult = update_multipliers(&mult, &inner.state.u, &inner.state.v, spec)?;
        init = (inner.state.u, inner.state.v);
    }
    unreachable!("max_outer ≥ 1 is validated")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{FieldSource, Nonlinearity};
    use crate::numerics::build_grid;

    fn constrained(n: usize, target: FieldSource, lambda: f64, lo: f64, hi: f64) -> ProblemSpec {
        let g = build_grid(n).unwrap();
        ProblemSpec::new(target.build(g).unwrap(), Nonlinearity::ZERO, 0.0, lambda)
            .unwrap()
            .with_bounds(ScalarField::constant(g, lo), ScalarField::constant(g, hi))
            .unwrap()
    }

    #[test]
    fn update_rule_values() {
        assert_eq!(update_one(0.1, 0.0), 0.1);
        assert!((update_one(0.1, 1.0) - 0.1105170918).abs() < 1e-10);
        assert!((update_one(0.1, -5.0) - 0.0606530660).abs() < 1e-10);
        assert!(update_one(1e-300, -1e6) > 0.0);
        assert!(update_one(50.0, 1e6).is_finite());
    }

    #[test]
    fn constant_configuration_cost() {
        let s = constrained(8, FieldSource::Zero, 0.1, -3.0, 5.0);
        let g = s.grid();
        let k = Stiffness::new(g);
        let mult = BarrierMultipliers::constant(g, 0.1).unwrap();
        let z = ScalarField::zeros(g);
        let c = barrier_cost(&z, &z, &z, &mult, &s, &k).unwrap();
        let expected = g.cell_area() * g.len() as f64 * (1.0 + (-0.3f64).exp() + (-0.5f64).exp());
        assert!((c - expected).abs() < 1e-14);
    }

    #[test]
    fn deep_interior_directions_vanish() {
        let s = constrained(6, FieldSource::Constant(-1.0), 0.1, -3.0, 5.0);
        let g = s.grid();
        let k = Stiffness::new(g);
        let mult = BarrierMultipliers::constant(g, 25.0).unwrap();
        let u = s.target().clone();
        let w = ScalarField::zeros(g);
        let v = ScalarField::constant(g, 1.0);
        let c = barrier_cost(&u, &v, &w, &mult, &s, &k).unwrap();
        assert!(c < 1e-10);
        let (du, dv) = barrier_directions(&u, &v, &w, &mult, &s, &k).unwrap();
        assert!(du.sup_norm() < 1e-8 && dv.sup_norm() < 1e-8);
    }

    #[test]
    fn rejects_unconstrained_and_nonpositive_multipliers() {
        let g = build_grid(4).unwrap();
        let s = ProblemSpec::new(ScalarField::zeros(g), Nonlinearity::ZERO, 0.0, 0.1).unwrap();
        let mult = BarrierMultipliers::constant(g, 0.1).unwrap();
        let z = ScalarField::zeros(g);
        let k = Stiffness::new(g);
        assert!(barrier_cost(&z, &z, &z, &mult, &s, &k).is_err());
        assert!(BarrierMultipliers::constant(g, 0.0).is_err());
        assert!(BarrierOptions {
            outer_tol: 0.0,
            ..Default::default()
        }
        .validate()
        .is_err());
    }

    #[test]
    fn violation_measures() {
        let g = build_grid(3).unwrap();
        let bounds = ControlBounds {
            lower: ScalarField::constant(g, -1.0),
            upper: ScalarField::constant(g, 1.0),
        };
        let v = ScalarField::new(g, vec![0.0, -1.5, 1.25, 0.5]).unwrap();
        assert_eq!(control_violation(&v, &bounds), 0.5);
        assert_eq!(
            state_violation(&ScalarField::new(g, vec![-1.0, 0.2, 0.0, 0.1]).unwrap()),
            0.2
        );
        assert_eq!(state_violation(&ScalarField::constant(g, -1.0)), 0.0);
    }
}
