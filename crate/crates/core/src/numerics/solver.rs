use crate::error::{Error, Result};
use crate::numerics::field::dot;
use crate::numerics::{assemble_stiffness, CsrMatrix, Grid, ScalarField};

/// Default relative tolerance of the conjugate-gradient solver.
pub const DEFAULT_CG_TOL: f64 = 1e-10;

/// Outcome of a conjugate-gradient run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgInfo {
    pub iterations: usize,
    pub residual: f64,
}

/// Conjugate gradients for an SPD operator given as `apply(x, y)` computing
/// `y = A x`. Starts from zero and stops once
/// `‖A x - b‖₂ ≤ tol · max(1, ‖b‖₂)`.
pub fn conjugate_gradient<F>(apply: F, rhs: &[f64], tol: f64, max_iter: usize) -> Result<(Vec<f64>, CgInfo)>
where
    F: Fn(&[f64], &mut [f64]),
{
    let m = rhs.len();
    let mut x = vec![0.0; m];
    let mut r = rhs.to_vec();
    let target = tol * dot(rhs, rhs).sqrt().max(1.0);
    let mut rr = dot(&r, &r);
    if rr.sqrt() <= target {
        return Ok((
            x,
            CgInfo {
                iterations: 0,
                residual: rr.sqrt(),
            },
        ));
    }
    let mut p = r.clone();
    let mut ap = vec![0.0; m];
    for it in 1..=max_iter {
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 || !pap.is_finite() {
            return Err(Error::NotPositiveDefinite { row: it, pivot: pap });
        }
        let alpha = rr / pap;
        for k in 0..m {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        let rr_next = dot(&r, &r);
        if rr_next.sqrt() <= target {
            return Ok((
                x,
                CgInfo {
                    iterations: it,
                    residual: rr_next.sqrt(),
                },
            ));
        }
        let beta = rr_next / rr;
        rr = rr_next;
        for k in 0..m {
            p[k] = r[k] + beta * p[k];
        }
    }
    Err(Error::IterationLimit {
        iterations: max_iter,
        residual: rr.sqrt(),
    })
}

/// Solves `K z = rhs` by conjugate gradients with a zero initial guess.
pub fn solve_spd(k: &CsrMatrix, rhs: &ScalarField, tol: f64, max_iter: usize) -> Result<ScalarField> {
    if rhs.len() != k.dim() {
        return Err(Error::DimensionMismatch {
            expected: k.dim(),
            found: rhs.len(),
        });
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidOptions(format!(
            "solver tolerance must be positive, got {tol}"
        )));
    }
    let (z, _) = conjugate_gradient(|x, y| k.mul_into(x, y), rhs.values(), tol, max_iter)?;
    Ok(ScalarField::from_vec(rhs.grid(), z))
}

/// Cholesky factor `L` of a banded SPD matrix, stored by rows with
/// `bandwidth + 1` slots per row (slot `bandwidth` is the diagonal).
#[derive(Debug, Clone)]
pub struct BandedCholesky {
    dim: usize,
    bandwidth: usize,
    band: Vec<f64>,
}

impl BandedCholesky {
    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        let dim = a.dim();
        let bw = a.bandwidth();
        let width = bw + 1;
        let mut band = vec![0.0; dim * width];
        for i in 0..dim {
            for (j, v) in a.row(i) {
                if j <= i {
                    band[i * width + bw + j - i] = v;
                }
            }
        }
        for i in 0..dim {
            let lo = i.saturating_sub(bw);
            for j in lo..=i {
                let klo = lo.max(j.saturating_sub(bw));
                let mut s = band[i * width + bw + j - i];
                for k in klo..j {
                    s -= band[i * width + bw + k - i] * band[j * width + bw + k - j];
                }
                if j == i {
                    if s <= 0.0 || !s.is_finite() {
                        return Err(Error::NotPositiveDefinite { row: i, pivot: s });
                    }
                    band[i * width + bw] = s.sqrt();
                } else {
                    band[i * width + bw + j - i] = s / band[j * width + bw];
                }
            }
        }
        Ok(Self {
            dim,
            bandwidth: bw,
            band,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Solves `L Lᵀ x = b` in place.
    pub fn solve_in_place(&self, x: &mut [f64]) {
        assert_eq!(x.len(), self.dim);
        let bw = self.bandwidth;
        let width = bw + 1;
        for i in 0..self.dim {
            let lo = i.saturating_sub(bw);
            let row = &self.band[i * width..(i + 1) * width];
            let mut s = x[i];
            for k in lo..i {
                s -= row[bw + k - i] * x[k];
            }
            x[i] = s / row[bw];
        }
        for i in (0..self.dim).rev() {
            x[i] /= self.band[i * width + bw];
            let xi = x[i];
            let lo = i.saturating_sub(bw);
            let row = &self.band[i * width..(i + 1) * width];
            for k in lo..i {
                x[k] -= row[bw + k - i] * xi;
            }
        }
    }
}

/// How [`Stiffness::solve`] inverts `K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LinearSolver {
    /// Banded Cholesky factorization computed once per grid.
    Cholesky,
    /// Conjugate gradients from a zero initial guess.
    ConjugateGradient { tol: f64, max_iter: usize },
}

impl LinearSolver {
    /// Conjugate gradients with the default tolerance and `10 m` iterations.
    pub fn cg_default(grid: Grid) -> Self {
        LinearSolver::ConjugateGradient {
            tol: DEFAULT_CG_TOL,
            max_iter: 10 * grid.len(),
        }
    }
}

/// The discrete Dirichlet Laplacian of a grid together with the means to
/// invert it. Every linear solve of the optimizers goes through here.
#[derive(Debug, Clone)]
pub struct Stiffness {
    grid: Grid,
    matrix: CsrMatrix,
    factor: Option<BandedCholesky>,
    solver: LinearSolver,
}

impl Stiffness {
    /// Assembles `K` and factors it.
    pub fn new(grid: Grid) -> Self {
        Self::with_solver(grid, LinearSolver::Cholesky).expect("the five-point Laplacian is positive definite")
    }

    pub fn with_solver(grid: Grid, solver: LinearSolver) -> Result<Self> {
        let matrix = assemble_stiffness(grid);
        let factor = match solver {
            LinearSolver::Cholesky => Some(BandedCholesky::factor(&matrix)?),
            LinearSolver::ConjugateGradient { tol, .. } => {
                if !(tol > 0.0) {
                    return Err(Error::InvalidOptions(format!(
                        "solver tolerance must be positive, got {tol}"
                    )));
                }
                None
            }
        };
        Ok(Self {
            grid,
            matrix,
            factor,
            solver,
        })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn solver(&self) -> LinearSolver {
        self.solver
    }

    /// `K⁻¹ rhs`.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        if rhs.len() != self.grid.len() {
            return Err(Error::DimensionMismatch {
                expected: self.grid.len(),
                found: rhs.len(),
            });
        }
        match (&self.factor, self.solver) {
            (Some(factor), _) => {
                let mut x = rhs.to_vec();
                factor.solve_in_place(&mut x);
                Ok(x)
            }
            (None, LinearSolver::ConjugateGradient { tol, max_iter }) => {
                conjugate_gradient(|x, y| self.matrix.mul_into(x, y), rhs, tol, max_iter).map(|(x, _)| x)
            }
            (None, LinearSolver::Cholesky) => unreachable!("factor is built with the stiffness"),
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.matrix.mul(x)
    }

    /// `aᵀ K b`, the discrete `∫ ∇a·∇b`.
    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        self.matrix.bilinear(a, b)
    }

    /// `zᵀ K z`, the discrete `∫ |∇z|²`.
    pub fn energy(&self, z: &[f64]) -> f64 {
        self.matrix.bilinear(z, z)
    }
}

/// `wᵀ K w`; its square root is the H¹₀ seminorm of `w`.
pub fn h1_seminorm_sq(w: &ScalarField, k: &CsrMatrix) -> Result<f64> {
    if w.len() != k.dim() {
        return Err(Error::DimensionMismatch {
            expected: k.dim(),
            found: w.len(),
        });
    }
    Ok(k.bilinear(w.values(), w.values()))
}
