//! Linear state law `-Δ(u + w) - 1 = v` tracking `ū = min(x, 1 - x)` for
//! three control costs.
//!
//! ```text
//! cargo run --release --example linear_tracking -- [n]
//! ```

use std::time::Instant;

use defect_control::descent::{run_descent_with, DescentOptions};
use defect_control::model::{kkt_residual, FieldSource, Nonlinearity, ProblemSpec};
use defect_control::numerics::{build_grid, Stiffness};

fn main() -> defect_control::Result<()> {
    let n = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(64);
    let grid = build_grid(n)?;
    let k = Stiffness::new(grid);
    let target = FieldSource::MinX.build(grid)?;
    let opts = DescentOptions {
        max_iters: 50_000,
        ..Default::default()
    };
    println!(
        "{:>8} {:>7} {:>12} {:>12} {:>10}  time",
        "mu", "iters", "cost", "residual_h1", "kkt"
    );
    for mu in [1e-2, 1e-3, 1e-4] {
        let spec = ProblemSpec::new(target.clone(), Nonlinearity::affine(-1.0, 0.0), mu, 1.0)?;
        let t = Instant::now();
        let out = run_descent_with(&spec, &opts, None, &k)?;
        let st = &out.state;
        let kkt = kkt_residual(&st.u, &st.v, &st.w, &spec, &k)?;
        println!(
            "{mu:>8.0e} {:>7} {:>12.6e} {:>12.6e} {:>10.2e}  {:.2?}",
            st.iter,
            st.cost,
            st.residual_h1,
            kkt.max(),
            t.elapsed()
        );
    }
    Ok(())
}
