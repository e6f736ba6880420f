//! Exponential barriers for `u ≤ 0`, `-3 ≤ v ≤ 5` with target
//! `(min(x, 1 - x) - ¼) / 4`, which is positive in the middle of the square.
//!
//! ```text
//! cargo run --release --example state_constrained -- [n] [out_dir]
//! ```

use std::path::PathBuf;
use std::time::Instant;

use defect_control::barrier::{run_barrier_with, write_outer_log, BarrierOptions};
use defect_control::model::{FieldSource, Nonlinearity, ProblemSpec};
use defect_control::numerics::{build_grid, ScalarField, Stiffness};

fn main() -> defect_control::Result<()> {
    let mut args = std::env::args().skip(1);
    let n = args.next().and_then(|s| s.parse().ok()).unwrap_or(32);
    let out_dir = PathBuf::from(args.next().unwrap_or_else(|| "out/constrained".into()));
    let grid = build_grid(n)?;
    let target = FieldSource::ScaledMinX.build(grid)?;
    let spec = ProblemSpec::new(target, Nonlinearity::ZERO, 0.0, 0.1)?
        .with_bounds(ScalarField::constant(grid, -3.0), ScalarField::constant(grid, 5.0))?;

    let t = Instant::now();
    let out = run_barrier_with(&spec, &BarrierOptions::default(), &Stiffness::new(grid), |r| {
        if r.outer_iter <= 3 || r.outer_iter % 500 == 0 {
            println!(
                "outer {:5}: cost {:.6}, certificates ({:.2e}, {:.2e}, {:.2e}), max u {:+.2e}",
                r.outer_iter, r.cost, r.cert_state, r.cert_lower, r.cert_upper, r.max_violation_u
            );
        }
    })?;
    println!(
        "{} after {} outer / {} inner iterations in {:.2?}",
        out.status.as_str(),
        out.log.len(),
        out.total_inner_iters,
        t.elapsed()
    );
    println!(
        "max u = {:.3e}, v in [{:.3}, {:.3}]",
        out.state.u.max(),
        out.state.v.min(),
        out.state.v.max()
    );

    std::fs::create_dir_all(&out_dir)?;
    out.state.u.save_csv(out_dir.join("u.csv"))?;
    out.state.v.save_csv(out_dir.join("v.csv"))?;
    out.certificates.write_fields(&out_dir)?;
    write_outer_log(&out.log, std::fs::File::create(out_dir.join("outer_log.csv"))?)?;
    println!("fields and certificate products written to {}", out_dir.display());
    Ok(())
}
