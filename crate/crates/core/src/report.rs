use std::io::Write;
use std::path::Path;

use crate::error::Result;

/// Why an iteration loop stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    /// The stopping test was met.
    Converged,
    /// The iteration budget ran out first.
    IterationLimit,
    /// No acceptable step could be found along the current direction.
    Stalled,
}

impl RunStatus {
    pub fn is_converged(self) -> bool {
        self == RunStatus::Converged
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RunStatus::Converged => "converged",
            RunStatus::IterationLimit => "iteration_limit",
            RunStatus::Stalled => "stalled",
        }
    }
}

/// One row of a descent log.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub iter: usize,
    pub cost: f64,
    /// `‖(U, V)‖ = sqrt(UᵀKU + h² Σ V²)` at this iterate.
    pub grad_norm: f64,
    /// Step taken from this iterate; 0 on the final row.
    pub eps: f64,
    /// `sqrt(wᵀKw)`.
    pub residual_h1: f64,
}

/// Per-iteration log of a descent run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub records: Vec<IterationRecord>,
    pub status: RunStatus,
}

impl RunReport {
    pub fn iterations(&self) -> usize {
        self.records.last().map_or(0, |r| r.iter)
    }

    /// `iter,cost,grad_norm,eps,residual_h1`, one row per iteration.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        out.write_record(["iter", "cost", "grad_norm", "eps", "residual_h1"])?;
        for r in &self.records {
            out.write_record([
                r.iter.to_string(),
                format!("{:.15e}", r.cost),
                format!("{:.15e}", r.grad_norm),
                format!("{:.15e}", r.eps),
                format!("{:.15e}", r.residual_h1),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(file))
    }
}
