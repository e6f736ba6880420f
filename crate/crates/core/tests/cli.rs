//! The `defect-control` binary end to end.

use std::path::Path;
use std::process::{Command, Output};

use defect_control::cli::Summary;
use defect_control::numerics::{build_grid, ScalarField};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_defect-control"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn summary(dir: &Path) -> Summary {
    Summary::parse(&std::fs::read_to_string(dir.join("summary.txt")).unwrap())
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn resolution_below_two_is_rejected() {
    let out = bin(&["solve", "--resolution", "1"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("resolution must be ≥ 2"), "{}", stderr(&out));
}

#[test]
fn unknown_keys_and_bad_values_are_named() {
    let out = bin(&["solve", "--grad_tool", "1e-6"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("`grad_tool`"));
    let out = bin(&["solve", "--mu", "lots"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("`mu`"));
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("bad.conf");
    std::fs::write(&conf, "resolution = 8\ntarget_shape = minx\n").unwrap();
    let out = bin(&["solve", "--config", conf.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("`target_shape`"));
}

#[test]
fn trivial_problem_stops_at_iteration_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin(&[
        "solve",
        "--out",
        dir.path().to_str().unwrap(),
        "--resolution",
        "8",
        "--target",
        "zero",
        "--phi",
        "affine:0,0",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let s = summary(dir.path());
    assert_eq!(s.get("iterations"), Some("0"));
    assert_eq!(s.get_f64("cost"), Some(0.0));
    for f in ["u.csv", "v.csv", "w.csv", "log.csv", "summary.txt"] {
        assert!(dir.path().join(f).is_file(), "{f}");
    }
}

#[test]
fn iteration_limit_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin(&[
        "solve",
        "--out",
        dir.path().to_str().unwrap(),
        "--resolution",
        "8",
        "--max-iters",
        "2",
    ]);
    assert_eq!(code(&out), 2);
    assert_eq!(summary(dir.path()).get("status"), Some("iteration_limit"));
}

#[test]
fn runs_are_bitwise_reproducible() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        let out = bin(&[
            "solve",
            "--out",
            d.path().to_str().unwrap(),
            "--resolution",
            "12",
            "--phi",
            "shifted_cubic",
        ]);
        assert_eq!(code(&out), 0);
    }
    for f in ["u.csv", "v.csv", "w.csv", "log.csv", "summary.txt"] {
        assert_eq!(
            std::fs::read(a.path().join(f)).unwrap(),
            std::fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn csv_fields_feed_targets_and_warm_starts() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    let out = bin(&[
        "solve",
        "--out",
        first.to_str().unwrap(),
        "--resolution",
        "10",
        "--mu",
        "1e-3",
    ]);
    assert_eq!(code(&out), 0);

    // a solution written by one run is a valid target for the next
    let grid = build_grid(10).unwrap();
    let u = ScalarField::load_csv(grid, first.join("u.csv")).unwrap();
    let second = dir.path().join("second");
    let out = bin(&[
        "solve",
        "--out",
        second.to_str().unwrap(),
        "--resolution",
        "10",
        "--target",
        first.join("u.csv").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let again = ScalarField::load_csv(grid, first.join("u.csv")).unwrap();
    assert!(again.add_scaled(-1.0, &u).unwrap().sup_norm() <= 1e-9);

    // restarting from the optimum converges at once
    let third = dir.path().join("third");
    let out = bin(&[
        "solve",
        "--out",
        third.to_str().unwrap(),
        "--resolution",
        "10",
        "--mu",
        "1e-3",
        "--init-u",
        first.join("u.csv").to_str().unwrap(),
        "--init-v",
        first.join("v.csv").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let iters: usize = summary(&third).get("iterations").unwrap().parse().unwrap();
    assert!(iters <= 1, "{iters}");

    // a field from a different grid is refused
    let out = bin(&[
        "solve",
        "--resolution",
        "12",
        "--target",
        first.join("u.csv").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
}

#[test]
fn constrained_runs_need_consistent_bounds() {
    assert_eq!(code(&bin(&["solve-constrained", "--resolution", "6"])), 1);
    let out = bin(&[
        "solve-constrained",
        "--resolution",
        "6",
        "--lower",
        "constant:1",
        "--upper",
        "constant:0",
    ]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("infeasible"), "{}", stderr(&out));
    let out = bin(&[
        "solve",
        "--resolution",
        "6",
        "--lower",
        "constant:-1",
        "--upper",
        "constant:1",
    ]);
    assert_eq!(code(&out), 1);
}

#[test]
fn constrained_run_writes_certificates() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin(&[
        "solve-constrained",
        "--out",
        dir.path().to_str().unwrap(),
        "--resolution",
        "8",
        "--phi",
        "affine:0,0",
        "--mu",
        "0",
        "--lambda",
        "0.1",
        "--target",
        "scaled_minx",
        "--lower",
        "constant:-3",
        "--upper",
        "constant:5",
        "--grad-tol",
        "1e-5",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    for f in [
        "cert_a.csv",
        "cert_bm.csv",
        "cert_bp.csv",
        "outer_log.csv",
        "u.csv",
        "v.csv",
    ] {
        assert!(dir.path().join(f).is_file(), "{f}");
    }
    let s = summary(dir.path());
    assert!(s.get_f64("max_u").unwrap() <= 1e-3);
    let header = std::fs::read_to_string(dir.path().join("outer_log.csv")).unwrap();
    assert!(header
        .starts_with("outer_iter,inner_iters,cost,cert_state,cert_lower,cert_upper,max_violation_u,max_violation_v\n"));
}

#[test]
fn zero_bounds_localize_the_control() {
    let dir = tempfile::tempdir().unwrap();
    let grid = build_grid(8).unwrap();
    let lower = ScalarField::from_fn(grid, |x, _| if x < 0.5 { 0.0 } else { -3.0 });
    let upper = ScalarField::from_fn(grid, |x, _| if x < 0.5 { 0.0 } else { 5.0 });
    lower.save_csv(dir.path().join("lower.csv")).unwrap();
    upper.save_csv(dir.path().join("upper.csv")).unwrap();
    let conf = dir.path().join("local.conf");
    std::fs::write(
        &conf,
        "resolution = 8\nphi = affine:0,0\nmu = 0\nlambda = 0.1\ntarget = scaled_minx\nlower = lower.csv\nupper = upper.csv\ngrad_tol = 1e-5\n",
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = bin(&[
        "solve-constrained",
        "--config",
        conf.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = ScalarField::load_csv(grid, out_dir.join("v.csv")).unwrap();
    for p in 0..grid.len() {
        let (x, _) = grid.coords(p);
        if x < 0.5 {
            assert!(v.get(p).abs() <= 1e-3, "v = {} at x = {x}", v.get(p));
        }
    }
}

#[test]
fn continuation_sweeps() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin(&["continuation", "--resolution", "8", "--lambda-sweep", "10,1"]);
    assert_eq!(code(&out), 1);

    let out = bin(&[
        "continuation",
        "--out",
        dir.path().to_str().unwrap(),
        "--resolution",
        "8",
        "--lambda-sweep",
        "2",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let s = summary(dir.path());
    assert!(s.get_f64("final_rel_dist_u_oracle").is_some());

    let out = bin(&[
        "continuation",
        "--out",
        dir.path().to_str().unwrap(),
        "--resolution",
        "8",
        "--lambda-sweep",
        "1,10,100,1000",
    ]);
    assert_eq!(code(&out), 0);
    let s = summary(dir.path());
    assert_eq!(s.get("residual_h1_decreasing"), Some("true"));
    let csv = std::fs::read_to_string(dir.path().join("continuation.csv")).unwrap();
    assert!(csv.starts_with("lambda,cost,residual_h1,weighted_residual,dist_u_oracle,dist_v_oracle\n"));
    assert_eq!(csv.lines().count(), 5);

    // no reference for the cubic law: the oracle columns stay empty
    let out = bin(&[
        "continuation",
        "--out",
        dir.path().to_str().unwrap(),
        "--resolution",
        "6",
        "--phi",
        "shifted_cubic",
        "--lambda-sweep",
        "1,10",
    ]);
    assert_eq!(code(&out), 0);
    let csv = std::fs::read_to_string(dir.path().join("continuation.csv")).unwrap();
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",,")), "{csv}");
}

#[test]
fn hypothesis_checks() {
    let out = bin(&["check", "--phi", "affine:-1,0"]);
    assert_eq!(code(&out), 0);
    let s = Summary::parse(&String::from_utf8_lossy(&out.stdout));
    assert_eq!(s.get("witness_intercept"), Some("-1"));
    assert_eq!(s.get("witness_slope"), Some("0"));
    assert_eq!(code(&bin(&["check", "--phi", "shifted_cubic"])), 0);
    assert_eq!(code(&bin(&["check", "--phi", "polynomial:0,0,0,-1"])), 3);
    assert_eq!(code(&bin(&["check", "--phi", "quartic"])), 1);
}

#[test]
fn help_succeeds() {
    assert_eq!(code(&bin(&["--help"])), 0);
    assert_eq!(code(&bin(&["solve", "--help"])), 0);
    assert_eq!(code(&bin(&[])), 1);
}
