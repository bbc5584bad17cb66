//! Error norms, convergence rates, kinetic energy, Mach field and the
//! divergence/oscillation measures used by the asymptotic-range tests.

use crate::error::{Result, SolverError};
use crate::grid::GridSpec;
use crate::model::{ConservedState, ModelParams};

/// Per-step time series collected by the run loop. All lists share length;
/// times are strictly increasing.
#[derive(Debug, Clone, Default)]
pub struct DiagnosticsRecord {
    pub times: Vec<f64>,
    pub kinetic_energy: Vec<f64>,
    pub rel_ke_change: Vec<f64>,
    pub max_abs_div_u: Vec<f64>,
    pub density_oscillation: Vec<f64>,
    pub dt_history: Vec<f64>,
}

impl DiagnosticsRecord {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub(crate) fn push_step(
        &mut self,
        state: &ConservedState,
        grid: &GridSpec,
        dt: f64,
        ke0: f64,
    ) {
        let ke = kinetic_energy(state, grid);
        self.times.push(state.time);
        self.kinetic_energy.push(ke);
        self.rel_ke_change
            .push(if ke0 != 0.0 { (ke - ke0) / ke0 } else { 0.0 });
        self.max_abs_div_u.push(div_u_max(state, grid));
        self.density_oscillation.push(density_oscillation(state));
        self.dt_history.push(dt);
    }
}

/// One row of an experimental-order-of-convergence table. The rate entries
/// are present only when a coarser row exists.
#[derive(Debug, Clone)]
pub struct ConvergenceRow {
    pub n: usize,
    pub err_u1: f64,
    pub eoc_u1: Option<f64>,
    pub err_u2: f64,
    pub eoc_u2: Option<f64>,
}

/// Cell-volume-weighted discrete L2 norm of `a - b`,
/// `sqrt( sum_i (a_i - b_i)^2 * prod_m dx_m )`.
pub fn l2_error(a: &[f64], b: &[f64], grid: &GridSpec) -> Result<f64> {
    if a.len() != b.len() || a.len() != grid.num_cells() {
        return Err(SolverError::ShapeMismatch {
            expected: grid.num_cells(),
            got: if a.len() != grid.num_cells() {
                a.len()
            } else {
                b.len()
            },
        });
    }
    let vol = grid.cell_volume();
    let sum: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    Ok((sum * vol).sqrt())
}

/// Discrete L2 norm of a field (volume weighted).
pub fn l2_norm(a: &[f64], grid: &GridSpec) -> f64 {
    let vol = grid.cell_volume();
    (a.iter().map(|&x| x * x).sum::<f64>() * vol).sqrt()
}

/// Experimental order of convergence under grid doubling,
/// `log2(err_coarse / err_fine)`. Absent for non-positive inputs.
pub fn eoc(err_coarse: f64, err_fine: f64) -> Option<f64> {
    if err_coarse > 0.0 && err_fine > 0.0 {
        Some((err_coarse / err_fine).log2())
    } else {
        None
    }
}

/// Total kinetic energy `sum_i |q_i|^2 / (2 rho_i) * cell volume`.
pub fn kinetic_energy(state: &ConservedState, grid: &GridSpec) -> f64 {
    let vol = grid.cell_volume();
    let mut sum = 0.0;
    for i in 0..grid.num_cells() {
        let mut q2 = 0.0;
        for qc in &state.q {
            q2 += qc[i] * qc[i];
        }
        sum += 0.5 * q2 / state.rho[i];
    }
    sum * vol
}

/// Per-cell Mach field `M = |u| / sqrt(gamma p / rho)` with `p = rho^gamma`;
/// mirrors the plotted quantity, which carries no epsilon factor.
pub fn mach_field(state: &ConservedState, params: &ModelParams, grid: &GridSpec) -> Vec<f64> {
    let gamma = params.gamma;
    (0..grid.num_cells())
        .map(|i| {
            let rho = state.rho[i];
            let mut u2 = 0.0;
            for qc in &state.q {
                let u = qc[i] / rho;
                u2 += u * u;
            }
            // gamma p / rho = gamma rho^{gamma-1}
            (u2 / (gamma * rho.powf(gamma - 1.0))).sqrt()
        })
        .collect()
}

/// Maximum over cells of the wide central divergence of the velocity,
/// `max_i | sum_m (u_{m,i+e_m} - u_{m,i-e_m}) / (2 dx_m) |` — the same
/// difference operator the scheme itself uses.
pub fn div_u_max(state: &ConservedState, grid: &GridSpec) -> f64 {
    let u = state.velocity();
    let mut max = 0.0_f64;
    for i in 0..grid.num_cells() {
        let mut div = 0.0;
        for (m, um) in u.iter().enumerate() {
            div += (um[grid.next(i, m)] - um[grid.prev(i, m)]) / (2.0 * grid.dx()[m]);
        }
        max = max.max(div.abs());
    }
    max
}

/// Spatial density oscillation `max rho - min rho`.
pub fn density_oscillation(state: &ConservedState) -> f64 {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &r in &state.rho {
        lo = lo.min(r);
        hi = hi.max(r);
    }
    hi - lo
}

/// Least-squares slope of `ln y` against `ln x`; used for scaling studies.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 2);
    let lx: Vec<f64> = xs.iter().map(|&v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|&v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let num: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}
