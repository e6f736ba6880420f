use crate::error::{Error, Result};
use crate::model::ProblemSpec;
use crate::numerics::{dot, ScalarField, Stiffness};

/// Stationarity residuals of the relaxed optimality system
/// `u - λφ'(u)w = ū - λΔw` and `μv + λw = 0`, both as L² norms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KktResidual {
    pub stationarity_u: f64,
    pub stationarity_v: f64,
}

impl KktResidual {
    pub fn max(&self) -> f64 {
        self.stationarity_u.max(self.stationarity_v)
    }
}

pub(crate) fn check_len(spec: &ProblemSpec, fields: &[&ScalarField]) -> Result<()> {
    for f in fields {
        if f.grid() != spec.grid() {
            return Err(Error::DimensionMismatch {
                expected: spec.grid().len(),
                found: f.len(),
            });
        }
    }
    Ok(())
}

pub(crate) fn defect_values(u: &[f64], v: &[f64], spec: &ProblemSpec, k: &Stiffness) -> Result<Vec<f64>> {
    let h2 = spec.grid().cell_area();
    let phi = spec.phi();
    let rhs: Vec<f64> = u.iter().zip(v).map(|(&ui, &vi)| h2 * (vi - phi.eval(ui))).collect();
    let mut w = k.solve(&rhs)?;
    for (wi, ui) in w.iter_mut().zip(u) {
        *wi -= ui;
    }
    Ok(w)
}

/// The defect `w` of a pair: the solution of `K w = h²(v - φ(u)) - K u`,
/// i.e. `-Δ(u + w) + φ(u) = v` with `w = 0` on the boundary.
pub fn solve_defect(u: &ScalarField, v: &ScalarField, spec: &ProblemSpec, k: &Stiffness) -> Result<ScalarField> {
    check_len(spec, &[u, v])?;
    let w = defect_values(u.values(), v.values(), spec, k)?;
    ScalarField::new(spec.grid(), w)
}

pub(crate) fn cost_values(u: &[f64], v: &[f64], w: &[f64], spec: &ProblemSpec, k: &Stiffness) -> f64 {
    let h2 = spec.grid().cell_area();
    let tracking: f64 = u
        .iter()
        .zip(spec.target().values())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    let mu = spec.effective_mu();
    let control = if mu > 0.0 { mu * dot(v, v) } else { 0.0 };
    0.5 * h2 * (tracking + control) + 0.5 * spec.lambda() * k.energy(w)
}

/// `½‖u - ū‖² + μ/2 ‖v‖² + λ/2 wᵀKw`; the `μ` term is absent for
/// constrained problems. `w` must be the defect of `(u, v)`.
pub fn cost(u: &ScalarField, v: &ScalarField, w: &ScalarField, spec: &ProblemSpec, k: &Stiffness) -> Result<f64> {
    check_len(spec, &[u, v, w])?;
    Ok(cost_values(u.values(), v.values(), w.values(), spec, k))
}

/// Discrete residuals of the relaxed optimality system at `(u, v, w)`.
///
/// The state component is `h²(u - ū - λφ'(u) w) - λ K w`, the transcription
/// of `u - λφ'(u)w - ū + λΔw` with `-Δ ↦ K/h²`, reported as the L² norm of
/// the pointwise residual.
pub fn kkt_residual(
    u: &ScalarField,
    v: &ScalarField,
    w: &ScalarField,
    spec: &ProblemSpec,
    k: &Stiffness,
) -> Result<KktResidual> {
    check_len(spec, &[u, v, w])?;
    let grid = spec.grid();
    let h2 = grid.cell_area();
    let lambda = spec.lambda();
    let mu = spec.effective_mu();
    let kw = k.apply(w.values());
    let mut sum_u = 0.0;
    let mut sum_v = 0.0;
    for (p, kwp) in kw.iter().enumerate() {
        let (ui, vi, wi) = (u.get(p), v.get(p), w.get(p));
        let r = h2 * (ui - spec.target().get(p) - lambda * spec.phi().deriv(ui) * wi) - lambda * kwp;
        sum_u += r * r;
        let s = mu * vi + lambda * wi;
        sum_v += s * s;
    }
    Ok(KktResidual {
        stationarity_u: sum_u.sqrt() / grid.h(),
        stationarity_v: (h2 * sum_v).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{FieldSource, Nonlinearity};
    use crate::numerics::build_grid;

    fn spec(n: usize, target: FieldSource, phi: Nonlinearity, mu: f64) -> ProblemSpec {
        let g = build_grid(n).unwrap();
        ProblemSpec::new(target.build(g).unwrap(), phi, mu, 1.0).unwrap()
    }

    #[test]
    fn zero_data_zero_defect() {
        let s = spec(5, FieldSource::Zero, Nonlinearity::ZERO, 1e-2);
        let k = Stiffness::new(s.grid());
        let z = ScalarField::zeros(s.grid());
        let w = solve_defect(&z, &z, &s, &k).unwrap();
        assert!(w.values().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn exact_state_has_no_defect() {
        let s = spec(6, FieldSource::Zero, Nonlinearity::ZERO, 1e-2);
        let g = s.grid();
        let k = Stiffness::new(g);
        let v = ScalarField::from_fn(g, |x, y| (3.0 * x).sin() + y * y);
        let rhs: Vec<f64> = v.values().iter().map(|vi| g.cell_area() * vi).collect();
        let u = ScalarField::new(g, k.solve(&rhs).unwrap()).unwrap();
        let w = solve_defect(&u, &v, &s, &k).unwrap();
        assert!(w.sup_norm() < 1e-14);
    }

    #[test]
    fn cost_of_untouched_pair_is_half_target_norm() {
        // ∫₀¹ min(x,1-x)² dx = 1/12 and ū is constant in y, so ½‖ū‖² = 1/24
        let s = spec(64, FieldSource::MinX, Nonlinearity::ZERO, 1e-2);
        let k = Stiffness::new(s.grid());
        let z = ScalarField::zeros(s.grid());
        let w = solve_defect(&z, &z, &s, &k).unwrap();
        let c = cost(&z, &z, &w, &s, &k).unwrap();
        assert!((c - 1.0 / 24.0).abs() < 2e-3, "{c}");
        assert!((c - 0.5 * s.target().l2_norm().powi(2)).abs() < 1e-15);
    }

    #[test]
    fn cost_vanishes_at_target() {
        let s = spec(8, FieldSource::Zero, Nonlinearity::ZERO, 1e-2);
        let k = Stiffness::new(s.grid());
        let z = ScalarField::zeros(s.grid());
        assert_eq!(cost(&z, &z, &z, &s, &k).unwrap(), 0.0);
        let r = kkt_residual(&z, &z, &z, &s, &k).unwrap();
        assert_eq!(r.stationarity_u, 0.0);
        assert_eq!(r.stationarity_v, 0.0);
    }

    #[test]
    fn control_residual_of_unit_control() {
        let s = spec(32, FieldSource::Zero, Nonlinearity::ZERO, 1.0);
        let k = Stiffness::new(s.grid());
        let z = ScalarField::zeros(s.grid());
        let one = ScalarField::constant(s.grid(), 1.0);
        let r = kkt_residual(&z, &one, &z, &s, &k).unwrap();
        assert!((r.stationarity_v - 31.0 / 32.0).abs() < 1e-14);
        assert!((r.stationarity_v - 0.969).abs() < 1e-3);
    }

    #[test]
    fn mismatched_fields_are_rejected() {
        let s = spec(4, FieldSource::Zero, Nonlinearity::ZERO, 1.0);
        let k = Stiffness::new(s.grid());
        let z = ScalarField::zeros(s.grid());
        let other = ScalarField::zeros(build_grid(5).unwrap());
        assert!(matches!(
            solve_defect(&other, &z, &s, &k),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(cost(&z, &z, &other, &s, &k).is_err());
    }
}
