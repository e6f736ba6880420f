//! Drives the defect to zero by increasing λ and compares with the optimum
//! of the exact state law.
//!
//! ```text
//! cargo run --release --example lambda_continuation -- [n]
//! ```

use defect_control::descent::DescentOptions;
use defect_control::model::{FieldSource, Nonlinearity, ProblemSpec};
use defect_control::numerics::build_grid;
use defect_control::study::run_continuation;

fn main() -> defect_control::Result<()> {
    let n = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(32);
    let grid = build_grid(n)?;
    let spec = ProblemSpec::new(
        FieldSource::MinX.build(grid)?,
        Nonlinearity::affine(-1.0, 0.0),
        1e-2,
        1.0,
    )?;
    let opts = DescentOptions {
        max_iters: 200_000,
        ..Default::default()
    };
    let result = run_continuation(&spec, &[1.0, 10.0, 100.0, 1e3, 1e4], &opts)?;
    let oracle_norm = result.oracle.as_ref().map(|o| o.state.l2_norm());
    println!(
        "{:>8} {:>7} {:>12} {:>12} {:>12} {:>12}",
        "lambda", "iters", "residual_h1", "λ‖w‖²", "law resid", "rel dist u"
    );
    for entry in &result.entries {
        match &entry.result {
            Ok(s) => println!(
                "{:>8.0e} {:>7} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e}",
                entry.lambda,
                s.outcome.state.iter,
                s.residual_h1,
                s.weighted_residual,
                s.exact_law_residual,
                s.dist_u_oracle.zip(oracle_norm).map_or(f64::NAN, |(d, n)| d / n)
            ),
            Err(e) => println!("{:>8.0e} failed: {e}", entry.lambda),
        }
    }
    Ok(())
}
