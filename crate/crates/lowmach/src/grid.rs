//! Structured uniform grid with periodic topology on every axis.
//!
//! Cells are addressed by a multi-index `i = (i_1, ..., i_d)` stored in
//! row-major order with the first axis fastest, matching the on-disk field
//! dump layout. Ghost access is realized by modular index wrapping rather
//! than halo copies; neighbour tables are precomputed so stencil loops are
//! branch-free.

use crate::error::{Result, SolverError};

/// Geometry of a uniform periodic grid in 1, 2 or 3 dimensions.
#[derive(Debug, Clone)]
pub struct GridSpec {
    n: Vec<usize>,
    origin: Vec<f64>,
    extent: Vec<f64>,
    dx: Vec<f64>,
    strides: Vec<usize>,
    num_cells: usize,
    // Per-axis wrapped neighbour tables: next[m][i] is the linear index of
    // cell i shifted by +e_m, and next2 by +2 e_m.
    next: Vec<Vec<u32>>,
    prev: Vec<Vec<u32>>,
    next2: Vec<Vec<u32>>,
    prev2: Vec<Vec<u32>>,
}

impl GridSpec {
    /// Builds a grid with `n[m]` cells, lower corner `origin[m]` and length
    /// `extent[m]` per axis. Requires `n[m] >= 4` so that the wide central
    /// stencils are well defined.
    pub fn new(n: &[usize], origin: &[f64], extent: &[f64]) -> Result<Self> {
        let dim = n.len();
        if dim == 0 || dim > 3 {
            return Err(SolverError::InvalidGrid(format!(
                "dimension must be 1, 2 or 3, got {dim}"
            )));
        }
        if origin.len() != dim || extent.len() != dim {
            return Err(SolverError::InvalidGrid(
                "origin/extent length must match n".into(),
            ));
        }
        for (m, &nm) in n.iter().enumerate() {
            if nm < 4 {
                return Err(SolverError::InvalidGrid(format!(
                    "axis {m}: need at least 4 cells, got {nm}"
                )));
            }
            if !(extent[m] > 0.0) || !extent[m].is_finite() {
                return Err(SolverError::InvalidGrid(format!(
                    "axis {m}: extent must be positive and finite, got {}",
                    extent[m]
                )));
            }
            if !origin[m].is_finite() {
                return Err(SolverError::InvalidGrid(format!(
                    "axis {m}: origin must be finite"
                )));
            }
        }
        let num_cells: usize = n.iter().product();
        if num_cells > u32::MAX as usize {
            return Err(SolverError::InvalidGrid(format!(
                "too many cells: {num_cells}"
            )));
        }
        let dx: Vec<f64> = (0..dim).map(|m| extent[m] / n[m] as f64).collect();
        let mut strides = vec![1usize; dim];
        for m in 1..dim {
            strides[m] = strides[m - 1] * n[m - 1];
        }

        let mut grid = GridSpec {
            n: n.to_vec(),
            origin: origin.to_vec(),
            extent: extent.to_vec(),
            dx,
            strides,
            num_cells,
            next: Vec::new(),
            prev: Vec::new(),
            next2: Vec::new(),
            prev2: Vec::new(),
        };
        grid.build_neighbour_tables();
        Ok(grid)
    }

    /// Unit interval `[0, 1]` with `n` cells.
    pub fn unit_interval(n: usize) -> Result<Self> {
        Self::new(&[n], &[0.0], &[1.0])
    }

    /// Unit square `[0, 1]^2` with `n x n` cells.
    pub fn unit_square(n: usize) -> Result<Self> {
        Self::new(&[n, n], &[0.0, 0.0], &[1.0, 1.0])
    }

    fn build_neighbour_tables(&mut self) {
        let dim = self.dim();
        let total = self.num_cells;
        self.next = vec![vec![0u32; total]; dim];
        self.prev = vec![vec![0u32; total]; dim];
        self.next2 = vec![vec![0u32; total]; dim];
        self.prev2 = vec![vec![0u32; total]; dim];
        let mut idx = vec![0usize; dim];
        for lin in 0..total {
            for m in 0..dim {
                let nm = self.n[m];
                let shift = |k: usize, off: usize| (k + off) % nm;
                let base = lin - idx[m] * self.strides[m];
                self.next[m][lin] = (base + shift(idx[m], 1) * self.strides[m]) as u32;
                self.next2[m][lin] = (base + shift(idx[m], 2) * self.strides[m]) as u32;
                self.prev[m][lin] = (base + shift(idx[m], nm - 1) * self.strides[m]) as u32;
                self.prev2[m][lin] = (base + shift(idx[m], nm - 2) * self.strides[m]) as u32;
            }
            // advance multi-index, first axis fastest
            for m in 0..dim {
                idx[m] += 1;
                if idx[m] < self.n[m] {
                    break;
                }
                idx[m] = 0;
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.n.len()
    }

    pub fn n(&self) -> &[usize] {
        &self.n
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn extent(&self) -> &[f64] {
        &self.extent
    }

    pub fn dx(&self) -> &[f64] {
        &self.dx
    }

    pub fn num_cells(&self) -> usize {
        self.num_cells
    }

    pub fn cell_volume(&self) -> f64 {
        self.dx.iter().product()
    }

    /// Linear index of an in-range multi-index.
    pub fn linear(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.dim());
        idx.iter()
            .zip(&self.strides)
            .map(|(&i, &s)| i * s)
            .sum()
    }

    /// Multi-index of a linear cell index.
    pub fn multi_index(&self, mut lin: usize) -> Vec<usize> {
        let mut idx = vec![0usize; self.dim()];
        for m in 0..self.dim() {
            idx[m] = lin % self.n[m];
            lin /= self.n[m];
        }
        idx
    }

    /// Reduces each component of a signed multi-index modulo `n[m]` into
    /// `[0, n[m])`, realizing the periodic topology.
    pub fn wrap_index(&self, idx: &[i64]) -> Vec<usize> {
        debug_assert_eq!(idx.len(), self.dim());
        idx.iter()
            .zip(&self.n)
            .map(|(&i, &nm)| i.rem_euclid(nm as i64) as usize)
            .collect()
    }

    /// Linear index of a signed multi-index after periodic wrapping.
    pub fn wrapped_linear(&self, idx: &[i64]) -> usize {
        self.linear(&self.wrap_index(idx))
    }

    /// Coordinates of the centre of a cell given its linear index.
    pub fn cell_center(&self, lin: usize) -> Vec<f64> {
        self.multi_index(lin)
            .iter()
            .enumerate()
            .map(|(m, &i)| self.origin[m] + (i as f64 + 0.5) * self.dx[m])
            .collect()
    }

    #[inline(always)]
    pub fn next(&self, lin: usize, axis: usize) -> usize {
        self.next[axis][lin] as usize
    }

    #[inline(always)]
    pub fn prev(&self, lin: usize, axis: usize) -> usize {
        self.prev[axis][lin] as usize
    }

    #[inline(always)]
    pub fn next2(&self, lin: usize, axis: usize) -> usize {
        self.next2[axis][lin] as usize
    }

    #[inline(always)]
    pub fn prev2(&self, lin: usize, axis: usize) -> usize {
        self.prev2[axis][lin] as usize
    }
}
