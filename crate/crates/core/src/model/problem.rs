use std::path::Path;

use crate::error::{Error, Result};
use crate::model::Nonlinearity;
use crate::numerics::{Grid, ScalarField};

/// Pointwise box `lower ≤ v ≤ upper` on the control.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlBounds {
    pub lower: ScalarField,
    pub upper: ScalarField,
}

/// A defect-regularized tracking problem on the unit square.
///
/// Unconstrained problems minimize
/// `½‖u - ū‖² + μ/2 ‖v‖² + λ/2 ‖∇w‖²` over free pairs `(u, v)`, where the
/// defect `w` solves `-Δ(u + w) + φ(u) = v` with `w = 0` on the boundary.
/// Constrained problems add `u ≤ 0` and the control bounds and drop the
/// `μ` term.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    grid: Grid,
    target: ScalarField,
    phi: Nonlinearity,
    mu: f64,
    lambda: f64,
    bounds: Option<ControlBounds>,
}

impl ProblemSpec {
    pub fn new(target: ScalarField, phi: Nonlinearity, mu: f64, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidProblem(format!(
                "lambda must be positive and finite, got {lambda}"
            )));
        }
        if !(mu >= 0.0 && mu.is_finite()) {
            return Err(Error::InvalidProblem(format!(
                "mu must be non-negative and finite, got {mu}"
            )));
        }
        if phi.coefficients().iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidProblem("nonlinearity coefficients must be finite".into()));
        }
        Ok(Self {
            grid: target.grid(),
            target,
            phi,
            mu,
            lambda,
            bounds: None,
        })
    }

    /// Turns the problem into the state- and control-constrained variant.
    pub fn with_bounds(mut self, lower: ScalarField, upper: ScalarField) -> Result<Self> {
        self.target.ensure_same_grid(&lower)?;
        self.target.ensure_same_grid(&upper)?;
        if let Some(p) = (0..lower.len()).find(|&p| lower.get(p) > upper.get(p)) {
            let (x, y) = self.grid.coords(p);
            return Err(Error::InvalidProblem(format!(
                "infeasible control bounds at ({x}, {y}): lower {} > upper {}",
                lower.get(p),
                upper.get(p)
            )));
        }
        self.bounds = Some(ControlBounds { lower, upper });
        Ok(self)
    }

    /// Same problem with a different defect weight.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        let spec = Self::new(self.target.clone(), self.phi.clone(), self.mu, lambda)?;
        match &self.bounds {
            Some(b) => spec.with_bounds(b.lower.clone(), b.upper.clone()),
            None => Ok(spec),
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn target(&self) -> &ScalarField {
        &self.target
    }

    pub fn phi(&self) -> &Nonlinearity {
        &self.phi
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn bounds(&self) -> Option<&ControlBounds> {
        self.bounds.as_ref()
    }

    pub fn is_constrained(&self) -> bool {
        self.bounds.is_some()
    }

    /// Weight of the control-cost term actually used by the cost functional.
    pub fn effective_mu(&self) -> f64 {
        if self.is_constrained() {
            0.0
        } else {
            self.mu
        }
    }
}

/// Where a target or bound field comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldSource {
    /// `min(x, 1 - x)`.
    MinX,
    /// `¼ (min(x, 1 - x) - ¼)`.
    ScaledMinX,
    Zero,
    Constant(f64),
    Csv(std::path::PathBuf),
}

impl FieldSource {
    /// Parses `minx`, `scaled_minx`, `zero`, `constant:<value>`; anything
    /// else is taken as a CSV path.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        Ok(match s {
            "minx" => FieldSource::MinX,
            "scaled_minx" => FieldSource::ScaledMinX,
            "zero" => FieldSource::Zero,
            _ => match s.strip_prefix("constant:") {
                Some(v) => {
                    let value: f64 = v
                        .trim()
                        .parse()
                        .map_err(|_| Error::InvalidProblem(format!("`{v}` is not a number")))?;
                    if !value.is_finite() {
                        return Err(Error::InvalidProblem(format!("constant `{v}` is not finite")));
                    }
                    FieldSource::Constant(value)
                }
                None => FieldSource::Csv(s.into()),
            },
        })
    }

    pub fn build(&self, grid: Grid) -> Result<ScalarField> {
        Ok(match self {
            FieldSource::MinX => ScalarField::from_fn(grid, |x, _| x.min(1.0 - x)),
            FieldSource::ScaledMinX => ScalarField::from_fn(grid, |x, _| 0.25 * (x.min(1.0 - x) - 0.25)),
            FieldSource::Zero => ScalarField::zeros(grid),
            FieldSource::Constant(c) => ScalarField::constant(grid, *c),
            FieldSource::Csv(path) => ScalarField::load_csv(grid, path)?,
        })
    }

    /// Resolves relative CSV paths against `dir`.
    pub fn relative_to(self, dir: &Path) -> Self {
        match self {
            FieldSource::Csv(p) if p.is_relative() => FieldSource::Csv(dir.join(p)),
            other => other,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::build_grid;

    #[test]
    fn validates_parameters() {
        let g = build_grid(4).unwrap();
        let t = ScalarField::zeros(g);
        assert!(ProblemSpec::new(t.clone(), Nonlinearity::ZERO, 1e-4, 0.0).is_err());
        assert!(ProblemSpec::new(t.clone(), Nonlinearity::ZERO, -1.0, 1.0).is_err());
        assert!(ProblemSpec::new(t.clone(), Nonlinearity::ZERO, 0.0, f64::INFINITY).is_err());
        let spec = ProblemSpec::new(t, Nonlinearity::ZERO, 1e-4, 1.0).unwrap();
        assert!(!spec.is_constrained());
        assert_eq!(spec.effective_mu(), 1e-4);
    }

    #[test]
    fn rejects_crossed_bounds() {
        let g = build_grid(4).unwrap();
        let spec = ProblemSpec::new(ScalarField::zeros(g), Nonlinearity::ZERO, 0.0, 0.1).unwrap();
        let mut lower = vec![-3.0; g.len()];
        lower[4] = 6.0;
        let lower = ScalarField::new(g, lower).unwrap();
        let err = spec
            .clone()
            .with_bounds(lower, ScalarField::constant(g, 5.0))
            .unwrap_err();
        assert!(err.to_string().contains("infeasible control bounds at (0.5, 0.5)"));

        let ok = spec
            .with_bounds(ScalarField::constant(g, -3.0), ScalarField::constant(g, 5.0))
            .unwrap();
        assert!(ok.is_constrained());
        assert_eq!(ok.effective_mu(), 0.0);
    }

    #[test]
    fn builtin_fields() {
        let g = build_grid(4).unwrap();
        let minx = FieldSource::parse("minx").unwrap().build(g).unwrap();
        assert_eq!(minx.values()[..3], [0.25, 0.5, 0.25]);
        let scaled = FieldSource::parse("scaled_minx").unwrap().build(g).unwrap();
        assert_eq!(scaled.get(1), 0.0625);
        assert_eq!(scaled.get(0), 0.0);
        assert_eq!(FieldSource::parse("constant:-3").unwrap(), FieldSource::Constant(-3.0));
        assert_eq!(
            FieldSource::parse("zero").unwrap().build(g).unwrap(),
            ScalarField::zeros(g)
        );
        assert!(FieldSource::parse("constant:abc").is_err());
        assert!(matches!(FieldSource::parse("data/t.csv").unwrap(), FieldSource::Csv(_)));
    }
}
