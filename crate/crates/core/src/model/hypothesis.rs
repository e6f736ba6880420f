//! Sampling checks for the structural assumptions on `φ`.
//!
//! Existence of optimal pairs needs an affine `l` with `(l(u) - φ(u)) u ≤ M`
//! for all real `u`; the asymptotics as `λ → ∞` need `φ` monotone. Both are
//! checked on a uniform sample, and the existence check adds a leading-term
//! sign analysis of the polynomial `(l(u) - φ(u)) u` to cover `±∞`.

use log::debug;

use crate::model::Nonlinearity;

/// Closed sampling interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "empty interval [{lo}, {hi}]");
        Self { lo, hi }
    }

    /// `samples` equispaced points including both endpoints.
    pub fn sample(&self, samples: usize) -> impl Iterator<Item = f64> + '_ {
        let samples = samples.max(2);
        let step = (self.hi - self.lo) / (samples - 1) as f64;
        (0..samples).map(move |k| {
            if k + 1 == samples {
                self.hi
            } else {
                self.lo + k as f64 * step
            }
        })
    }
}

/// Affine function `slope · u + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineWitness {
    pub slope: f64,
    pub intercept: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExistenceReport {
    /// `(l(u) - φ(u)) u` is bounded above on the sample and at infinity.
    pub holds: bool,
    /// Sampled supremum of `(l(u) - φ(u)) u`.
    pub max_value: f64,
    /// The leading term of the polynomial keeps it bounded above at `±∞`.
    pub bounded_at_infinity: bool,
}

/// Ascending coefficients of `(l(u) - φ(u)) u` with trailing
/// (numerically) zero terms removed.
fn growth_polynomial(phi: &Nonlinearity, l: AffineWitness) -> Vec<f64> {
    let phi_c = phi.coefficients();
    let mut c = vec![0.0; phi_c.len().max(2) + 1];
    c[1] += l.intercept;
    c[2] += l.slope;
    for (k, &pk) in phi_c.iter().enumerate() {
        c[k + 1] -= pk;
    }
    let scale = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    while c.len() > 1 && c.last().is_some_and(|v| v.abs() <= 1e-14 * scale) {
        c.pop();
    }
    c
}

fn bounded_above(c: &[f64]) -> bool {
    let degree = c.len() - 1;
    let lead = c[degree];
    degree == 0 || lead == 0.0 || (degree.is_multiple_of(2) && lead < 0.0)
}

/// Checks `(l(u) - φ(u)) u ≤ M` for `l(u) = l_slope · u + l_intercept`.
pub fn check_existence_hypothesis(
    phi: &Nonlinearity,
    l_slope: f64,
    l_intercept: f64,
    u_range: Interval,
    samples: usize,
) -> ExistenceReport {
    let l = AffineWitness {
        slope: l_slope,
        intercept: l_intercept,
    };
    let g = |u: f64| (l.slope * u + l.intercept - phi.eval(u)) * u;
    let max_value = u_range.sample(samples).map(g).fold(f64::NEG_INFINITY, f64::max);
    let bounded_at_infinity = bounded_above(&growth_polynomial(phi, l));
    ExistenceReport {
        holds: max_value.is_finite() && bounded_at_infinity,
        max_value,
        bounded_at_infinity,
    }
}

/// Tries a small set of affine `l`, simplest first, and returns the first
/// one for which the existence hypothesis holds.
pub fn find_existence_witness(
    phi: &Nonlinearity,
    u_range: Interval,
    samples: usize,
) -> Option<(AffineWitness, ExistenceReport)> {
    const SLOPES: [f64; 7] = [0.0, -1.0, 1.0, -2.0, 2.0, -5.0, 5.0];
    const INTERCEPTS: [f64; 9] = [0.0, -1.0, 1.0, -2.0, 2.0, -5.0, 5.0, -10.0, 10.0];
    let mut candidates: Vec<AffineWitness> = SLOPES
        .iter()
        .flat_map(|&slope| {
            INTERCEPTS
                .iter()
                .map(move |&intercept| AffineWitness { slope, intercept })
        })
        .collect();
    candidates.sort_by(|a, b| {
        let key = |w: &AffineWitness| (w.slope.abs(), w.intercept.abs());
        key(a).partial_cmp(&key(b)).unwrap()
    });
    candidates.into_iter().find_map(|l| {
        let report = check_existence_hypothesis(phi, l.slope, l.intercept, u_range, samples);
        debug!("witness l(u) = {}u + {}: {:?}", l.slope, l.intercept, report);
        report.holds.then_some((l, report))
    })
}

/// `true` iff `φ' ≥ 0` at every sample point.
pub fn check_monotone(phi: &Nonlinearity, u_range: Interval, samples: usize) -> bool {
    u_range.sample(samples).all(|u| phi.deriv(u) >= 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    const RANGE: Interval = Interval { lo: -10.0, hi: 10.0 };

    #[test]
    fn constant_law_with_matching_witness() {
        let r = check_existence_hypothesis(&Nonlinearity::affine(-1.0, 0.0), 0.0, -1.0, RANGE, 101);
        assert!(r.holds);
        assert_eq!(r.max_value, 0.0);
    }

    #[test]
    fn shifted_cubic_is_bounded() {
        let r = check_existence_hypothesis(&Nonlinearity::ShiftedCubic, 0.0, 0.0, RANGE, 20001);
        assert!(r.holds);
        // g(u) = -u(u-2)³ peaks at u = 1/2 (g' = -(u-2)²(4u-2)) with value 27/16
        assert!((r.max_value - 27.0 / 16.0).abs() < 1e-12, "{}", r.max_value);
    }

    #[test]
    fn quartic_growth_is_unbounded() {
        let r = check_existence_hypothesis(
            &Nonlinearity::Polynomial(vec![0.0, 0.0, 0.0, -1.0]),
            0.0,
            0.0,
            RANGE,
            101,
        );
        assert!(!r.holds);
        assert!(!r.bounded_at_infinity);
        assert_eq!(r.max_value, 1e4);
    }

    #[test]
    fn odd_growth_is_unbounded() {
        // l ≡ 0 against φ ≡ -1 leaves g(u) = u
        let r = check_existence_hypothesis(&Nonlinearity::affine(-1.0, 0.0), 0.0, 0.0, RANGE, 11);
        assert!(!r.holds);
    }

    #[test]
    fn witness_search_prefers_simple_witnesses() {
        let (l, _) = find_existence_witness(&Nonlinearity::affine(-1.0, 0.0), RANGE, 201).unwrap();
        assert_eq!(
            l,
            AffineWitness {
                slope: 0.0,
                intercept: -1.0
            }
        );
        let (l, _) = find_existence_witness(&Nonlinearity::ShiftedCubic, RANGE, 201).unwrap();
        assert_eq!(
            l,
            AffineWitness {
                slope: 0.0,
                intercept: 0.0
            }
        );
        assert!(find_existence_witness(&Nonlinearity::Polynomial(vec![0.0, 0.0, 0.0, -1.0]), RANGE, 201).is_none());
    }

    #[test]
    fn monotonicity() {
        assert!(check_monotone(&Nonlinearity::ShiftedCubic, RANGE, 1001));
        assert!(check_monotone(&Nonlinearity::affine(3.0, 0.5), RANGE, 11));
        assert!(check_monotone(&Nonlinearity::affine(3.0, 0.0), RANGE, 11));
        assert!(!check_monotone(&Nonlinearity::affine(3.0, -0.5), RANGE, 11));
        let u_minus_cube = Nonlinearity::Polynomial(vec![0.0, 1.0, 0.0, -1.0]);
        assert!(!check_monotone(&u_minus_cube, Interval::new(-2.0, 2.0), 41));
        assert_eq!(u_minus_cube.deriv(2.0), -11.0);
    }

    #[test]
    fn sample_includes_endpoints() {
        let pts: Vec<_> = Interval::new(-1.0, 1.0).sample(3).collect();
        assert_eq!(pts, [-1.0, 0.0, 1.0]);
    }
}
