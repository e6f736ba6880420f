//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use defect_control::model::{Nonlinearity, ProblemSpec};
use defect_control::numerics::{Grid, ScalarField};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_field(grid: Grid, rng: &mut ChaCha8Rng, scale: f64) -> ScalarField {
    let values = (0..grid.len()).map(|_| scale * rng.random_range(-1.0..1.0)).collect();
    ScalarField::new(grid, values).unwrap()
}

/// Five-point Laplacian built from node coordinates, without the library's
/// assembly.
pub fn dense_stiffness(grid: Grid) -> DMatrix<f64> {
    let s = grid.subdivisions() - 1;
    let idx = |i: usize, j: usize| (j - 1) * s + (i - 1);
    let mut k = DMatrix::zeros(s * s, s * s);
    for j in 1..=s {
        for i in 1..=s {
            let p = idx(i, j);
            k[(p, p)] = 4.0;
            if i > 1 {
                k[(p, idx(i - 1, j))] = -1.0;
            }
            if i < s {
                k[(p, idx(i + 1, j))] = -1.0;
            }
            if j > 1 {
                k[(p, idx(i, j - 1))] = -1.0;
            }
            if j < s {
                k[(p, idx(i, j + 1))] = -1.0;
            }
        }
    }
    k
}

pub fn vec_of(f: &ScalarField) -> DVector<f64> {
    DVector::from_column_slice(f.values())
}

pub fn dense_solve(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    a.clone().lu().solve(b).expect("nonsingular")
}

/// Defect and cost by dense linear algebra.
pub struct DenseModel {
    pub k: DMatrix<f64>,
    pub h2: f64,
    pub target: DVector<f64>,
    pub phi: Nonlinearity,
    pub mu: f64,
    pub lambda: f64,
}

impl DenseModel {
    pub fn new(spec: &ProblemSpec) -> Self {
        Self {
            k: dense_stiffness(spec.grid()),
            h2: spec.grid().cell_area(),
            target: vec_of(spec.target()),
            phi: spec.phi().clone(),
            mu: spec.effective_mu(),
            lambda: spec.lambda(),
        }
    }

    pub fn defect(&self, u: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        let rhs = DVector::from_iterator(u.len(), (0..u.len()).map(|p| self.h2 * (v[p] - self.phi.eval(u[p]))));
        dense_solve(&self.k, &rhs) - u
    }

    pub fn cost(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        let w = self.defect(u, v);
        let e = u - &self.target;
        0.5 * self.h2 * e.dot(&e) + 0.5 * self.mu * self.h2 * v.dot(v) + 0.5 * self.lambda * w.dot(&(&self.k * &w))
    }
}

/// Golden-section search for the minimum of a unimodal `f` on `[a, b]`.
pub fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}
