use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::numerics::Grid;

/// Nodal values of a function over the interior nodes of a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
}

impl ScalarField {
    /// Wraps `values`, checking length and finiteness.
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: Grid, value: f64) -> Self {
        Self {
            grid,
            values: vec![value; grid.len()],
        }
    }

    /// Samples `f(x, y)` at every interior node.
    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = (0..grid.len())
            .map(|p| {
                let (x, y) = grid.coords(p);
                f(x, y)
            })
            .collect();
        Self { grid, values }
    }

    /// Builds a field from values produced by the solvers. Intermediate
    /// results are trusted to be finite, which is checked in debug builds.
    pub(crate) fn from_vec(grid: Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        debug_assert!(values.iter().all(|v| v.is_finite()));
        Self { grid, values }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, p: usize) -> f64 {
        self.values[p]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_vec(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    /// `self + alpha * other`.
    pub fn add_scaled(&self, alpha: f64, other: &ScalarField) -> Result<Self> {
        self.ensure_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + alpha * b)
            .collect();
        Ok(Self::from_vec(self.grid, values))
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Discrete L² norm, `sqrt(h² Σ f²)`.
    pub fn l2_norm(&self) -> f64 {
        (self.grid.cell_area() * dot(&self.values, &self.values)).sqrt()
    }

    pub(crate) fn ensure_same_grid(&self, other: &ScalarField) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::DimensionMismatch {
                expected: self.grid.len(),
                found: other.grid.len(),
            });
        }
        Ok(())
    }

    /// Writes the field as `x,y,value` rows in storage order.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        out.write_record(["x", "y", "value"])?;
        for (p, v) in self.values.iter().enumerate() {
            let (x, y) = self.grid.coords(p);
            out.write_record([x.to_string(), y.to_string(), format!("{v:.15e}")])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(file))
    }

    /// Reads a field written by [`ScalarField::write_csv`]. Node coordinates
    /// must match `grid`.
    pub fn read_csv<R: Read>(grid: Grid, reader: R, origin: &Path) -> Result<Self> {
        let fail = |message: String| Error::Format {
            path: origin.to_path_buf(),
            message,
        };
        let mut input = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = input.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["x", "y", "value"] {
            return Err(fail(format!(
                "expected header `x,y,value`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let tol = 1e-6 * grid.h();
        let mut values = Vec::with_capacity(grid.len());
        for (p, record) in input.records().enumerate() {
            let record = record?;
            let line = p + 2;
            if p >= grid.len() {
                return Err(fail(format!(
                    "more than {} rows for an n={} grid",
                    grid.len(),
                    grid.subdivisions()
                )));
            }
            let parse = |k: usize| -> Result<f64> {
                record
                    .get(k)
                    .ok_or_else(|| fail(format!("line {line}: missing column {k}")))?
                    .parse::<f64>()
                    .map_err(|e| fail(format!("line {line}: {e}")))
            };
            let (x, y, value) = (parse(0)?, parse(1)?, parse(2)?);
            let (gx, gy) = grid.coords(p);
            if (x - gx).abs() > tol || (y - gy).abs() > tol {
                return Err(fail(format!(
                    "line {line}: node ({x}, {y}) does not match grid node ({gx}, {gy})"
                )));
            }
            values.push(value);
        }
        if values.len() != grid.len() {
            return Err(fail(format!("expected {} rows, found {}", grid.len(), values.len())));
        }
        Self::new(grid, values).map_err(|e| fail(e.to_string()))
    }

    pub fn load_csv(grid: Grid, path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::Format {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        Self::read_csv(grid, std::io::BufReader::new(file), path)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Lumped-mass L² inner product, `h² Σ f g`.
pub fn l2_inner(f: &ScalarField, g: &ScalarField) -> Result<f64> {
    f.ensure_same_grid(g)?;
    Ok(f.grid.cell_area() * dot(&f.values, &g.values))
}
