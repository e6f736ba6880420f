use crate::error::{Error, Result};

/// Uniform node-centered grid on the unit square with homogeneous Dirichlet
/// boundary.
///
/// Only interior nodes carry unknowns. Node `(i, j)`, with `i, j` in
/// `1..n`, sits at `(i h, j h)` and is stored at index `(j-1)(n-1) + (i-1)`
/// (row-major, `x` fastest).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Grid {
    n: usize,
}

impl Grid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidResolution(n));
        }
        Ok(Self { n })
    }

    /// Subdivisions per side.
    pub fn subdivisions(&self) -> usize {
        self.n
    }

    /// Interior nodes per side, `n - 1`.
    pub fn side(&self) -> usize {
        self.n - 1
    }

    /// Mesh width.
    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// Cell area `h²`, the lumped mass weight of every node.
    pub fn cell_area(&self) -> f64 {
        let h = self.h();
        h * h
    }

    /// Number of interior nodes, `(n - 1)²`.
    pub fn len(&self) -> usize {
        self.side() * self.side()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Storage index of the interior node `(i, j)`, both 1-based.
    pub fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!((1..self.n).contains(&i) && (1..self.n).contains(&j));
        (j - 1) * self.side() + (i - 1)
    }

    /// Inverse of [`Grid::index`].
    pub fn node(&self, p: usize) -> (usize, usize) {
        (p % self.side() + 1, p / self.side() + 1)
    }

    /// Physical coordinates of the node stored at `p`.
    pub fn coords(&self, p: usize) -> (f64, f64) {
        let (i, j) = self.node(p);
        let h = self.h();
        (i as f64 * h, j as f64 * h)
    }

    /// Storage index of the node mirrored through `x = 1/2`.
    pub fn mirror_x(&self, p: usize) -> usize {
        let (i, j) = self.node(p);
        self.index(self.n - i, j)
    }
}

/// Builds the grid with `n` subdivisions per side.
pub fn build_grid(n: usize) -> Result<Grid> {
    Grid::new(n)
}
