use std::path::{Path, PathBuf};

use crate::barrier::BarrierOptions;
use crate::descent::DescentOptions;
use crate::error::{Error, Result};
use crate::model::{FieldSource, Interval, Nonlinearity, ProblemSpec};
use crate::numerics::{build_grid, Grid, LinearSolver, ScalarField, Stiffness, DEFAULT_CG_TOL};

/// Every key a config file or override may set.
pub const KEYS: &[&str] = &[
    "resolution",
    "phi",
    "mu",
    "lambda",
    "target",
    "lower",
    "upper",
    "init_u",
    "init_v",
    "grad_tol",
    "max_iters",
    "safeguard",
    "backtrack_factor",
    "min_step",
    "outer_tol",
    "max_outer",
    "initial_multiplier",
    "linear_solver",
    "cg_tol",
    "cg_max_iter",
    "lambda_sweep",
    "check_lo",
    "check_hi",
    "check_samples",
    "out",
    "seed",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    Cholesky,
    Cg,
}

/// Everything a run needs, with defaults matching the linear tracking
/// experiment at μ = 1e-2. The iteration budget is generous since small `μ`
/// and large `λ` make the descent slow.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub resolution: usize,
    pub phi: Nonlinearity,
    pub mu: f64,
    pub lambda: f64,
    pub target: FieldSource,
    pub lower: Option<FieldSource>,
    pub upper: Option<FieldSource>,
    pub init_u: Option<FieldSource>,
    pub init_v: Option<FieldSource>,
    pub grad_tol: f64,
    pub max_iters: usize,
    pub safeguard: bool,
    pub backtrack_factor: f64,
    pub min_step: f64,
    pub outer_tol: f64,
    pub max_outer: usize,
    pub initial_multiplier: f64,
    pub linear_solver: SolverKind,
    pub cg_tol: f64,
    /// `None` means `10 m`.
    pub cg_max_iter: Option<usize>,
    pub lambda_sweep: Vec<f64>,
    pub check_lo: f64,
    pub check_hi: f64,
    pub check_samples: usize,
    pub out: PathBuf,
    /// Only consumed by randomized test utilities.
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let descent = DescentOptions::default();
        let barrier = BarrierOptions::default();
        Self {
            resolution: 64,
            phi: Nonlinearity::affine(-1.0, 0.0),
            mu: 1e-2,
            lambda: 1.0,
            target: FieldSource::MinX,
            lower: None,
            upper: None,
            init_u: None,
            init_v: None,
            grad_tol: descent.grad_tol,
            max_iters: 100_000,
            safeguard: descent.safeguard,
            backtrack_factor: descent.backtrack_factor,
            min_step: descent.min_step,
            outer_tol: barrier.outer_tol,
            max_outer: barrier.max_outer,
            initial_multiplier: barrier.initial_multiplier,
            linear_solver: SolverKind::Cholesky,
            cg_tol: DEFAULT_CG_TOL,
            cg_max_iter: None,
            lambda_sweep: vec![1.0, 10.0, 100.0, 1e3, 1e4],
            check_lo: -10.0,
            check_hi: 10.0,
            check_samples: 2001,
            out: PathBuf::from("out"),
            seed: 0,
        }
    }
}

fn config_err(key: &str, message: impl Into<String>) -> Error {
    Error::Config {
        key: key.into(),
        message: message.into(),
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| config_err(key, format!("`{value}` is not a valid number")))
}

fn parse_f64(key: &str, value: &str) -> Result<f64> {
    let x: f64 = parse_num(key, value)?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(config_err(key, format!("`{value}` is not finite")))
    }
}

fn parse_field(key: &str, value: &str, base: &Path) -> Result<FieldSource> {
    FieldSource::parse(value)
        .map(|f| f.relative_to(base))
        .map_err(|e| config_err(key, e.to_string()))
}

fn parse_optional_field(key: &str, value: &str, base: &Path) -> Result<Option<FieldSource>> {
    match value.trim() {
        "" | "none" => Ok(None),
        v => parse_field(key, v, base).map(Some),
    }
}

/// Accepts `grad-tol` as a spelling of `grad_tol`.
pub fn normalize_key(key: &str) -> String {
    key.trim().replace('-', "_")
}

impl RunConfig {
    /// Sets one key. Relative CSV paths are resolved against `base`.
    pub fn set(&mut self, key: &str, value: &str, base: &Path) -> Result<()> {
        let key = normalize_key(key);
        let k = key.as_str();
        let value = value.trim();
        match k {
            "resolution" => self.resolution = parse_num(k, value)?,
            "phi" => self.phi = value.parse()?,
            "mu" => self.mu = parse_f64(k, value)?,
            "lambda" => self.lambda = parse_f64(k, value)?,
            "target" => self.target = parse_field(k, value, base)?,
            "lower" => self.lower = parse_optional_field(k, value, base)?,
            "upper" => self.upper = parse_optional_field(k, value, base)?,
            "init_u" => self.init_u = parse_optional_field(k, value, base)?,
            "init_v" => self.init_v = parse_optional_field(k, value, base)?,
            "grad_tol" => self.grad_tol = parse_f64(k, value)?,
            "max_iters" => self.max_iters = parse_num(k, value)?,
            "safeguard" => {
                self.safeguard = match value {
                    "true" | "on" | "yes" | "1" => true,
                    "false" | "off" | "no" | "0" => false,
                    _ => return Err(config_err(k, format!("`{value}` is not a boolean"))),
                }
            }
            "backtrack_factor" => self.backtrack_factor = parse_f64(k, value)?,
            "min_step" => self.min_step = parse_f64(k, value)?,
            "outer_tol" => self.outer_tol = parse_f64(k, value)?,
            "max_outer" => self.max_outer = parse_num(k, value)?,
            "initial_multiplier" => self.initial_multiplier = parse_f64(k, value)?,
            "linear_solver" => {
                self.linear_solver = match value {
                    "cholesky" => SolverKind::Cholesky,
                    "cg" => SolverKind::Cg,
                    _ => return Err(config_err(k, format!("expected `cholesky` or `cg`, got `{value}`"))),
                }
            }
            "cg_tol" => self.cg_tol = parse_f64(k, value)?,
            "cg_max_iter" => {
                self.cg_max_iter = match value {
                    "" | "auto" => None,
                    v => Some(parse_num(k, v)?),
                }
            }
            "lambda_sweep" => {
                self.lambda_sweep = value
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| parse_f64(k, s))
                    .collect::<Result<_>>()?
            }
            "check_lo" => self.check_lo = parse_f64(k, value)?,
            "check_hi" => self.check_hi = parse_f64(k, value)?,
            "check_samples" => self.check_samples = parse_num(k, value)?,
            "out" => self.out = base.join(value),
            "seed" => self.seed = parse_num(k, value)?,
            _ => return Err(config_err(k, "unknown key")),
        }
        Ok(())
    }

    /// Applies a `key = value` file on top of `self`. Blank lines and lines
    /// starting with `#` are ignored.
    pub fn apply_text(&mut self, text: &str, base: &Path) -> Result<()> {
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| config_err(line, format!("line {} is not of the form `key = value`", lineno + 1)))?;
            self.set(key, value, base)?;
        }
        Ok(())
    }

    /// Defaults overlaid with the file at `path`; relative paths inside it
    /// are resolved against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Format {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        let mut cfg = Self::default();
        cfg.apply_text(&text, path.parent().unwrap_or(Path::new("")))?;
        Ok(cfg)
    }

    pub fn grid(&self) -> Result<Grid> {
        build_grid(self.resolution).map_err(|e| config_err("resolution", e.to_string()))
    }

    /// Checks every numeric option. Field sources are checked when built.
    pub fn validate(&self) -> Result<()> {
        self.grid()?;
        let positive = |key: &str, x: f64| {
            if x > 0.0 {
                Ok(())
            } else {
                Err(config_err(key, format!("must be positive, got {x}")))
            }
        };
        positive("lambda", self.lambda)?;
        if self.mu < 0.0 {
            return Err(config_err("mu", format!("must be non-negative, got {}", self.mu)));
        }
        positive("grad_tol", self.grad_tol)?;
        positive("outer_tol", self.outer_tol)?;
        positive("initial_multiplier", self.initial_multiplier)?;
        positive("cg_tol", self.cg_tol)?;
        positive("min_step", self.min_step)?;
        if !(self.backtrack_factor > 0.0 && self.backtrack_factor < 1.0) {
            return Err(config_err(
                "backtrack_factor",
                format!("must lie in (0, 1), got {}", self.backtrack_factor),
            ));
        }
        if self.max_iters == 0 {
            return Err(config_err("max_iters", "must be at least 1"));
        }
        if self.max_outer == 0 {
            return Err(config_err("max_outer", "must be at least 1"));
        }
        if self.check_lo > self.check_hi {
            return Err(config_err(
                "check_lo",
                format!("{} exceeds check_hi = {}", self.check_lo, self.check_hi),
            ));
        }
        if self.check_samples < 2 {
            return Err(config_err("check_samples", "must be at least 2"));
        }
        if self.lower.is_some() != self.upper.is_some() {
            let missing = if self.lower.is_none() { "lower" } else { "upper" };
            return Err(config_err(missing, "control bounds need both `lower` and `upper`"));
        }
        crate::study::validate_sweep(&self.lambda_sweep).map_err(|e| config_err("lambda_sweep", e.to_string()))?;
        Ok(())
    }

    fn build_field(&self, key: &str, source: &FieldSource, grid: Grid) -> Result<ScalarField> {
        source.build(grid).map_err(|e| config_err(key, e.to_string()))
    }

    /// The problem described by the config, with bounds attached if given.
    pub fn problem(&self) -> Result<ProblemSpec> {
        self.validate()?;
        let grid = self.grid()?;
        let target = self.build_field("target", &self.target, grid)?;
        let spec = ProblemSpec::new(target, self.phi.clone(), self.mu, self.lambda)?;
        match (&self.lower, &self.upper) {
            (Some(lo), Some(hi)) => {
                let lower = self.build_field("lower", lo, grid)?;
                let upper = self.build_field("upper", hi, grid)?;
                spec.with_bounds(lower, upper)
                    .map_err(|e| config_err("lower", e.to_string()))
            }
            _ => Ok(spec),
        }
    }

    /// Warm start from `init_u`/`init_v`; a missing half defaults to zero.
    pub fn initial_pair(&self) -> Result<Option<(ScalarField, ScalarField)>> {
        if self.init_u.is_none() && self.init_v.is_none() {
            return Ok(None);
        }
        let grid = self.grid()?;
        let load = |key: &str, src: &Option<FieldSource>| match src {
            Some(s) => self.build_field(key, s, grid),
            None => Ok(ScalarField::zeros(grid)),
        };
        Ok(Some((load("init_u", &self.init_u)?, load("init_v", &self.init_v)?)))
    }

    pub fn descent_options(&self) -> DescentOptions {
        DescentOptions {
            grad_tol: self.grad_tol,
            max_iters: self.max_iters,
            safeguard: self.safeguard,
            backtrack_factor: self.backtrack_factor,
            min_step: self.min_step,
        }
    }

    pub fn barrier_options(&self) -> BarrierOptions {
        BarrierOptions {
            inner: self.descent_options(),
            outer_tol: self.outer_tol,
            max_outer: self.max_outer,
            initial_multiplier: self.initial_multiplier,
        }
    }

    pub fn stiffness(&self) -> Result<Stiffness> {
        let grid = self.grid()?;
        match self.linear_solver {
            SolverKind::Cholesky => Ok(Stiffness::new(grid)),
            SolverKind::Cg => Stiffness::with_solver(
                grid,
                LinearSolver::ConjugateGradient {
                    tol: self.cg_tol,
                    max_iter: self.cg_max_iter.unwrap_or(10 * grid.len()),
                },
            ),
        }
    }

    pub fn check_range(&self) -> Interval {
        Interval::new(self.check_lo, self.check_hi)
    }
}
