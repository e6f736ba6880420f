//! Semilinear law with `φ(u) = (u - 2)³`; writes the μ = 1e-3 fields to an
//! output directory.
//!
//! ```text
//! cargo run --release --example nonlinear_tracking -- [n] [out_dir]
//! ```

use std::path::PathBuf;

use defect_control::descent::{run_descent_with, DescentOptions};
use defect_control::model::{FieldSource, Nonlinearity, ProblemSpec};
use defect_control::numerics::{build_grid, Stiffness};

fn main() -> defect_control::Result<()> {
    let mut args = std::env::args().skip(1);
    let n = args.next().and_then(|s| s.parse().ok()).unwrap_or(64);
    let out_dir = PathBuf::from(args.next().unwrap_or_else(|| "out/nonlinear".into()));
    let grid = build_grid(n)?;
    let k = Stiffness::new(grid);
    let target = FieldSource::MinX.build(grid)?;
    let opts = DescentOptions {
        max_iters: 50_000,
        ..Default::default()
    };
    for mu in [1e-2, 1e-3, 1e-4] {
        let spec = ProblemSpec::new(target.clone(), Nonlinearity::ShiftedCubic, mu, 1.0)?;
        let out = run_descent_with(&spec, &opts, None, &k)?;
        let st = &out.state;
        println!(
            "mu = {mu:.0e}: {} after {} iterations, residual_h1 = {:.6e}, max u = {:.4}",
            out.report.status.as_str(),
            st.iter,
            st.residual_h1,
            st.u.max()
        );
        if mu == 1e-3 {
            std::fs::create_dir_all(&out_dir)?;
            st.u.save_csv(out_dir.join("u.csv"))?;
            st.v.save_csv(out_dir.join("v.csv"))?;
            st.w.save_csv(out_dir.join("w.csv"))?;
            out.report.save_csv(out_dir.join("log.csv"))?;
        }
    }
    println!("fields for mu = 1e-3 written to {}", out_dir.display());
    Ok(())
}
