use crate::numerics::Grid;

/// Square matrix in compressed sparse row layout.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    dim: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds a matrix from per-row `(column, value)` lists. Columns within a
    /// row are sorted; duplicates are summed.
    pub fn from_rows(rows: Vec<Vec<(usize, f64)>>) -> Self {
        let dim = rows.len();
        let mut row_offsets = Vec::with_capacity(dim + 1);
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        row_offsets.push(0);
        for mut row in rows {
            row.sort_by_key(|&(c, _)| c);
            for (c, v) in row {
                assert!(c < dim, "column {c} out of range for dimension {dim}");
                if col_indices.len() > *row_offsets.last().unwrap() && col_indices.last() == Some(&c) {
                    *values.last_mut().unwrap() += v;
                } else {
                    col_indices.push(c);
                    values.push(v);
                }
            }
            row_offsets.push(col_indices.len());
        }
        Self {
            dim,
            row_offsets,
            col_indices,
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_offsets[i]..self.row_offsets[i + 1];
        self.col_indices[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    /// Stored entry `(i, j)`, zero when absent.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        let range = self.row_offsets[i]..self.row_offsets[i + 1];
        match self.col_indices[range.clone()].binary_search(&j) {
            Ok(k) => self.values[range.start + k],
            Err(_) => 0.0,
        }
    }

    /// `y = A x`.
    pub fn mul_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        for (i, yi) in y.iter_mut().enumerate() {
            let mut s = 0.0;
            for k in self.row_offsets[i]..self.row_offsets[i + 1] {
                s += self.values[k] * x[self.col_indices[k]];
            }
            *yi = s;
        }
    }

    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim];
        self.mul_into(x, &mut y);
        y
    }

    /// `xᵀ A y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        let mut total = 0.0;
        for (i, xi) in x.iter().enumerate() {
            let mut s = 0.0;
            for k in self.row_offsets[i]..self.row_offsets[i + 1] {
                s += self.values[k] * y[self.col_indices[k]];
            }
            total += xi * s;
        }
        total
    }

    /// Bitwise symmetry of the stored pattern and values.
    pub fn is_symmetric(&self) -> bool {
        (0..self.dim).all(|i| self.row(i).all(|(j, v)| self.entry(j, i).to_bits() == v.to_bits()))
    }

    /// Largest `|i - j|` over stored entries.
    pub fn bandwidth(&self) -> usize {
        (0..self.dim)
            .flat_map(|i| self.row(i).map(move |(j, _)| i.abs_diff(j)))
            .max()
            .unwrap_or(0)
    }

    /// `A + shift I`.
    pub fn shifted(&self, shift: f64) -> Self {
        let rows = (0..self.dim)
            .map(|i| {
                let mut row: Vec<_> = self.row(i).collect();
                row.push((i, shift));
                row
            })
            .collect();
        Self::from_rows(rows)
    }
}

/// Five-point negative Laplacian on the interior nodes, unscaled:
/// `(Kz)_p = 4 z_p - Σ_{q ~ p} z_q`, with boundary neighbors contributing 0.
///
/// With this scaling `zᵀKz` is the sum of squared differences over every
/// horizontal and vertical edge, including the edges to the boundary, which
/// approximates `∫ |∇z|²`.
pub fn assemble_stiffness(grid: Grid) -> CsrMatrix {
    let s = grid.side();
    let rows = (0..grid.len())
        .map(|p| {
            let (i, j) = grid.node(p);
            let mut row = Vec::with_capacity(5);
            if j > 1 {
                row.push((grid.index(i, j - 1), -1.0));
            }
            if i > 1 {
                row.push((grid.index(i - 1, j), -1.0));
            }
            row.push((p, 4.0));
            if i < s {
                row.push((grid.index(i + 1, j), -1.0));
            }
            if j < s {
                row.push((grid.index(i, j + 1), -1.0));
            }
            row
        })
        .collect();
    CsrMatrix::from_rows(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::build_grid;

    #[test]
    fn single_node() {
        let k = assemble_stiffness(build_grid(2).unwrap());
        assert_eq!(k.dim(), 1);
        assert_eq!(k.entry(0, 0), 4.0);
        assert_eq!(k.bilinear(&[3.0], &[3.0]), 36.0);
    }

    #[test]
    fn three_by_three_stencil() {
        let k = assemble_stiffness(build_grid(3).unwrap());
        let expected = [
            [4.0, -1.0, -1.0, 0.0],
            [-1.0, 4.0, 0.0, -1.0],
            [-1.0, 0.0, 4.0, -1.0],
            [0.0, -1.0, -1.0, 4.0],
        ];
        for (i, row) in expected.iter().enumerate() {
            for (j, &e) in row.iter().enumerate() {
                assert_eq!(k.entry(i, j), e, "entry ({i},{j})");
            }
        }
        assert!(k.is_symmetric());
        assert_eq!(k.bandwidth(), 2);
    }

    #[test]
    fn ones_energy_counts_boundary_edges() {
        // every interior edge has zero difference; each of the 4*(n-1)
        // boundary-adjacent edges contributes 1
        let g = build_grid(4).unwrap();
        let k = assemble_stiffness(g);
        let ones = vec![1.0; g.len()];
        assert_eq!(k.bilinear(&ones, &ones), 12.0);
    }

    #[test]
    fn from_rows_sums_duplicates() {
        let a = CsrMatrix::from_rows(vec![vec![(1, 1.0), (0, 2.0), (1, 0.5)], vec![(0, 1.5)]]);
        assert_eq!(a.entry(0, 0), 2.0);
        assert_eq!(a.entry(0, 1), 1.5);
        assert_eq!(a.nnz(), 3);
        assert_eq!(a.shifted(1.0).entry(1, 1), 1.0);
    }
}
