//! Existence and monotonicity checks for a few reaction terms.
//!
//! ```text
//! cargo run --example hypothesis_check -- [phi ...]
//! ```
//! where `phi` is e.g. `affine:-1,0`, `shifted_cubic` or `polynomial:0,0,0,-1`.

use defect_control::model::{check_monotone, find_existence_witness, Interval, Nonlinearity};

fn main() -> defect_control::Result<()> {
    let mut laws: Vec<String> = std::env::args().skip(1).collect();
    if laws.is_empty() {
        laws = ["affine:-1,0", "shifted_cubic", "affine:0,-1", "polynomial:0,0,0,-1"]
            .map(String::from)
            .to_vec();
    }
    let range = Interval::new(-10.0, 10.0);
    for law in laws {
        let phi: Nonlinearity = law.parse()?;
        let monotone = check_monotone(&phi, range, 2001);
        match find_existence_witness(&phi, range, 2001) {
            Some((l, report)) => println!(
                "{phi}: existence holds with l(u) = {}u + {} (sup ≈ {:.4}); monotone: {monotone}",
                l.slope, l.intercept, report.max_value
            ),
            None => println!("{phi}: no affine witness found; monotone: {monotone}"),
        }
    }
    Ok(())
}
