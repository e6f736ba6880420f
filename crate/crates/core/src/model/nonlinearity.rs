use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// Reaction term `φ` of the state law `-Δ(u + w) + φ(u) = v`.
#[derive(Debug, Clone, PartialEq)]
pub enum Nonlinearity {
    /// `φ(u) = c0 + c1 u`.
    Affine { c0: f64, c1: f64 },
    /// `φ(u) = (u - 2)³`.
    ShiftedCubic,
    /// `φ(u) = Σ c_k u^k`, coefficients in ascending order.
    Polynomial(Vec<f64>),
}

impl Nonlinearity {
    /// `φ ≡ 0`, the linear law `-Δ(u + w) = v`.
    pub const ZERO: Nonlinearity = Nonlinearity::Affine { c0: 0.0, c1: 0.0 };

    pub fn affine(c0: f64, c1: f64) -> Self {
        Nonlinearity::Affine { c0, c1 }
    }

    pub fn eval(&self, u: f64) -> f64 {
        match self {
            Nonlinearity::Affine { c0, c1 } => c0 + c1 * u,
            Nonlinearity::ShiftedCubic => {
                let s = u - 2.0;
                s * s * s
            }
            Nonlinearity::Polynomial(c) => c.iter().rev().fold(0.0, |acc, &ck| acc * u + ck),
        }
    }

    pub fn deriv(&self, u: f64) -> f64 {
        match self {
            Nonlinearity::Affine { c1, .. } => *c1,
            Nonlinearity::ShiftedCubic => {
                let s = u - 2.0;
                3.0 * s * s
            }
            Nonlinearity::Polynomial(c) => c
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (k, &ck)| acc * u + k as f64 * ck),
        }
    }

    /// `Some((c0, c1))` when `φ` is affine, including polynomials of degree
    /// at most one.
    pub fn as_affine(&self) -> Option<(f64, f64)> {
        match self {
            Nonlinearity::Affine { c0, c1 } => Some((*c0, *c1)),
            Nonlinearity::ShiftedCubic => None,
            Nonlinearity::Polynomial(c) => {
                if c.iter().skip(2).all(|&ck| ck == 0.0) {
                    Some((c.first().copied().unwrap_or(0.0), c.get(1).copied().unwrap_or(0.0)))
                } else {
                    None
                }
            }
        }
    }

    pub fn is_affine(&self) -> bool {
        self.as_affine().is_some()
    }

    /// Ascending monomial coefficients.
    pub fn coefficients(&self) -> Vec<f64> {
        match self {
            Nonlinearity::Affine { c0, c1 } => vec![*c0, *c1],
            Nonlinearity::ShiftedCubic => vec![-8.0, 12.0, -6.0, 1.0],
            Nonlinearity::Polynomial(c) => c.clone(),
        }
    }
}

impl fmt::Display for Nonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |c: &[f64]| c.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
        match self {
            Nonlinearity::Affine { c0, c1 } => write!(f, "affine:{c0},{c1}"),
            Nonlinearity::ShiftedCubic => write!(f, "shifted_cubic"),
            Nonlinearity::Polynomial(c) => write!(f, "polynomial:{}", join(c)),
        }
    }
}

/// Parses `affine:<c0>,<c1>`, `shifted_cubic` or `polynomial:<c0>,<c1>,...`.
impl FromStr for Nonlinearity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |message: String| Error::Config {
            key: "phi".into(),
            message,
        };
        let (kind, args) = match s.split_once(':') {
            Some((k, a)) => (k.trim(), Some(a)),
            None => (s.trim(), None),
        };
        let coeffs = |args: Option<&str>| -> Result<Vec<f64>, Error> {
            let args = args.ok_or_else(|| bad(format!("`{kind}` needs coefficients, e.g. `{kind}:-1,0`")))?;
            args.split(',')
                .map(|c| {
                    let v: f64 = c.trim().parse().map_err(|_| bad(format!("`{c}` is not a number")))?;
                    if v.is_finite() {
                        Ok(v)
                    } else {
                        Err(bad(format!("coefficient `{c}` is not finite")))
                    }
                })
                .collect()
        };
        match kind {
            "affine" => match coeffs(args)?.as_slice() {
                [c0, c1] => Ok(Nonlinearity::affine(*c0, *c1)),
                other => Err(bad(format!("affine takes 2 coefficients, got {}", other.len()))),
            },
            "shifted_cubic" if args.is_none() => Ok(Nonlinearity::ShiftedCubic),
            "polynomial" => Ok(Nonlinearity::Polynomial(coeffs(args)?)),
            _ => Err(bad(format!(
                "unknown nonlinearity `{s}` (expected affine:<c0>,<c1>, shifted_cubic or polynomial:<c0>,...)"
            ))),
        }
    }
}
