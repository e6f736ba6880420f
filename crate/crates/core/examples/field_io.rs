//! Writes a target to CSV, reads it back and uses it as the target of a
//! small solve; CSV files are how warm starts and custom data enter the CLI.
//!
//! ```text
//! cargo run --example field_io -- [dir]
//! ```

use std::path::PathBuf;

use defect_control::descent::{run_descent, DescentOptions};
use defect_control::model::{FieldSource, Nonlinearity, ProblemSpec};
use defect_control::numerics::{build_grid, ScalarField};

fn main() -> defect_control::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "out/field_io".into()));
    std::fs::create_dir_all(&dir)?;
    let grid = build_grid(16)?;
    let bump = ScalarField::from_fn(grid, |x, y| 16.0 * x * (1.0 - x) * y * (1.0 - y));
    let path = dir.join("bump.csv");
    bump.save_csv(&path)?;

    let target = FieldSource::Csv(path.clone()).build(grid)?;
    println!("round trip error: {:.2e}", target.add_scaled(-1.0, &bump)?.sup_norm());
    let spec = ProblemSpec::new(target, Nonlinearity::ZERO, 1e-3, 1.0)?;
    let out = run_descent(&spec, &DescentOptions::default(), None)?;
    out.state.u.save_csv(dir.join("u.csv"))?;
    println!(
        "{} after {} iterations; u written to {}",
        out.report.status.as_str(),
        out.state.iter,
        dir.display()
    );
    Ok(())
}
