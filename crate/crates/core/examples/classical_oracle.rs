//! The exact-state-law optimum for affine `φ`, computed from its linear
//! optimality system, next to the relaxed optimum at λ = 1.
//!
//! ```text
//! cargo run --release --example classical_oracle -- [n] [mu]
//! ```

use defect_control::descent::{run_descent, DescentOptions};
use defect_control::model::{FieldSource, Nonlinearity, ProblemSpec};
use defect_control::numerics::build_grid;
use defect_control::study::classical_kkt_solve;

fn main() -> defect_control::Result<()> {
    let mut args = std::env::args().skip(1);
    let n = args.next().and_then(|s| s.parse().ok()).unwrap_or(32);
    let mu = args.next().and_then(|s| s.parse().ok()).unwrap_or(1e-2);
    let grid = build_grid(n)?;
    let target = FieldSource::MinX.build(grid)?;
    let spec = ProblemSpec::new(target.clone(), Nonlinearity::affine(-1.0, 0.0), mu, 1.0)?;

    let exact = classical_kkt_solve(&spec)?;
    println!(
        "exact law:   ‖u - ū‖ = {:.4e}, ‖v‖ = {:.4e}",
        exact.state.add_scaled(-1.0, &target)?.l2_norm(),
        exact.control.l2_norm()
    );
    println!("             ‖μv - p‖ = {:.2e}", exact.reduced_gradient_norm(mu));

    let relaxed = run_descent(
        &spec,
        &DescentOptions {
            max_iters: 50_000,
            ..Default::default()
        },
        None,
    )?
    .state;
    println!(
        "relaxed λ=1: ‖u - ū‖ = {:.4e}, ‖v‖ = {:.4e}",
        relaxed.u.add_scaled(-1.0, &target)?.l2_norm(),
        relaxed.v.l2_norm()
    );
    println!(
        "             ‖u_λ - ũ‖ = {:.4e}",
        relaxed.u.add_scaled(-1.0, &exact.state)?.l2_norm()
    );
    Ok(())
}
