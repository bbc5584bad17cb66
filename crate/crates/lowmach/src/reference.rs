//! Dense reference solves used to validate the matrix-free and reformulated
//! paths on small grids.
//!
//! The coupled-stage solve here builds its difference matrices from literal
//! wrapped-index loops and inverts them with a self-contained pivoted LU, so
//! it shares no code with the conjugate-gradient solver or the stage
//! elimination it is used to check.

use crate::elliptic::{apply_operator, LinearOperatorSpec};
use crate::error::{Result, SolverError};
use crate::grid::GridSpec;

/// Assembles the elliptic operator as a dense matrix by applying it to unit
/// vectors. Intended for grids of at most a few hundred cells.
pub fn dense_operator_matrix(spec: &LinearOperatorSpec) -> Result<Vec<Vec<f64>>> {
    let n = spec.grid.num_cells();
    let mut cols = vec![vec![0.0; n]; n];
    let mut e = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        let col = apply_operator(spec, &e)?;
        e[j] = 0.0;
        for i in 0..n {
            cols[i][j] = col[i];
        }
    }
    Ok(cols)
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn lu_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = a.len();
    if n == 0 || a.iter().any(|row| row.len() != n) || b.len() != n {
        return Err(SolverError::InvalidParams(
            "dense solve needs a square matrix and matching rhs".into(),
        ));
    }
    for k in 0..n {
        let mut pivot = k;
        for i in (k + 1)..n {
            if a[i][k].abs() > a[pivot][k].abs() {
                pivot = i;
            }
        }
        if a[pivot][k] == 0.0 {
            return Err(SolverError::InvalidParams(
                "dense solve hit a singular matrix".into(),
            ));
        }
        if pivot != k {
            a.swap(pivot, k);
            b.swap(pivot, k);
        }
        let akk = a[k][k];
        for i in (k + 1)..n {
            let factor = a[i][k] / akk;
            if factor == 0.0 {
                continue;
            }
            a[i][k] = 0.0;
            for j in (k + 1)..n {
                a[i][j] -= factor * a[k][j];
            }
            b[i] -= factor * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let mut s = b[k];
        for j in (k + 1)..n {
            s -= a[k][j] * x[j];
        }
        x[k] = s / a[k][k];
    }
    Ok(x)
}

/// Wide central difference matrix `(w_{i+e_m} - w_{i-e_m}) / (2 dx_m)` built
/// from explicit wrapped-index loops.
fn wide_difference_matrix(grid: &GridSpec, axis: usize) -> Vec<Vec<f64>> {
    let total = grid.num_cells();
    let inv_2dx = 1.0 / (2.0 * grid.dx()[axis]);
    let mut mat = vec![vec![0.0; total]; total];
    for lin in 0..total {
        let idx = grid.multi_index(lin);
        let mut up: Vec<i64> = idx.iter().map(|&v| v as i64).collect();
        up[axis] += 1;
        let mut down: Vec<i64> = idx.iter().map(|&v| v as i64).collect();
        down[axis] -= 1;
        mat[lin][grid.wrapped_linear(&up)] += inv_2dx;
        mat[lin][grid.wrapped_linear(&down)] -= inv_2dx;
    }
    mat
}

/// Solves one implicit stage of the scheme as the coupled `(1+d) N` linear
/// system
///
/// ```text
///   rho + dt_a * div q              = rho_hat
///   (dt_a / eps^2) grad rho + q     = q_hat
/// ```
///
/// with the wide central divergence/gradient pair, by dense LU. `dt_a` is
/// `dt * a_kk` (`dt` itself for the first-order scheme). Returns the stage
/// density and momentum.
pub fn dense_coupled_stage(
    rho_hat: &[f64],
    q_hat: &[Vec<f64>],
    grid: &GridSpec,
    dt_a: f64,
    epsilon: f64,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let dim = grid.dim();
    let total = grid.num_cells();
    if rho_hat.len() != total || q_hat.len() != dim || q_hat.iter().any(|c| c.len() != total) {
        return Err(SolverError::InvalidParams(
            "coupled stage oracle: field shapes do not match the grid".into(),
        ));
    }
    let size = (1 + dim) * total;
    let mut a = vec![vec![0.0; size]; size];
    let mut b = vec![0.0; size];
    for i in 0..size {
        a[i][i] = 1.0;
    }
    b[..total].copy_from_slice(rho_hat);
    for c in 0..dim {
        let block = (1 + c) * total;
        b[block..block + total].copy_from_slice(&q_hat[c]);
        let d = wide_difference_matrix(grid, c);
        let grad_scale = dt_a / (epsilon * epsilon);
        for i in 0..total {
            for j in 0..total {
                if d[i][j] != 0.0 {
                    // mass row i, momentum-c column j
                    a[i][block + j] += dt_a * d[i][j];
                    // momentum-c row i, density column j
                    a[block + i][j] += grad_scale * d[i][j];
                }
            }
        }
    }
    let x = lu_solve(a, b)?;
    let rho = x[..total].to_vec();
    let q = (0..dim)
        .map(|c| x[(1 + c) * total..(2 + c) * total].to_vec())
        .collect();
    Ok((rho, q))
}
