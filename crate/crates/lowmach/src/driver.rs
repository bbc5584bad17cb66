//! Experiment orchestration: single runs, convergence sweeps over grids and
//! Mach numbers, and the asymptotic-range sweep.

use crate::config::{ProblemKind, RunConfig};
use crate::diagnostics::{
    density_oscillation, div_u_max, eoc, l2_error, ConvergenceRow, DiagnosticsRecord,
};
use crate::error::Result;
use crate::grid::GridSpec;
use crate::model::{ConservedState, ModelParams};
use crate::problems::{
    exact_traveling_vortex, init_stationary_vortex, init_traveling_vortex, init_well_prepared,
    StationaryVortexParams, TravelingVortexParams, WellPreparedMode,
};
use crate::stepper::{self, StepConfig};
use crate::tableaux::get_tableau;

/// Grid, parameters and initial state for a configured problem.
pub fn build_problem(config: &RunConfig) -> Result<(GridSpec, ModelParams, ConservedState)> {
    let grid = GridSpec::unit_square(config.n)?;
    let params = ModelParams::new(config.epsilon, config.gamma)?;
    let state = match config.problem {
        ProblemKind::TravelingVortex => {
            let p = TravelingVortexParams::new(config.epsilon, config.eta_relation);
            init_traveling_vortex(&grid, &p)?
        }
        ProblemKind::StationaryVortex => {
            init_stationary_vortex(&grid, &StationaryVortexParams::default(), &params)?
        }
        ProblemKind::WellPrepared => {
            init_well_prepared(&grid, &params, WellPreparedMode::TaylorGreenLike)?
        }
    };
    Ok((grid, params, state))
}

/// Stepper configuration from a run configuration.
pub fn step_config(config: &RunConfig) -> Result<StepConfig> {
    StepConfig::new(
        config.cfl,
        get_tableau(&config.tableau)?,
        config.limiter,
        config.stencil,
        config.elliptic_tol,
    )
}

/// Everything a finished (or aborted) run produced.
pub struct RunArtifacts {
    pub grid: GridSpec,
    pub params: ModelParams,
    pub initial: ConservedState,
    pub diagnostics: DiagnosticsRecord,
    pub final_state: Result<ConservedState>,
}

/// Runs the configured problem to `t_end`, invoking `observer` after every
/// step. Solver failures are reported in `final_state`; diagnostics up to
/// the failure are kept.
pub fn run_configured(
    config: &RunConfig,
    observer: Option<&mut dyn FnMut(usize, &ConservedState)>,
) -> Result<RunArtifacts> {
    let (grid, params, initial) = build_problem(config)?;
    let step_cfg = step_config(config)?;
    let start = initial.clone();
    let (diagnostics, final_state) = match observer {
        Some(obs) => stepper::run_with_observer(
            start,
            &step_cfg,
            &params,
            &grid,
            config.t_end,
            obs,
        ),
        None => stepper::run(start, &step_cfg, &params, &grid, config.t_end),
    };
    Ok(RunArtifacts {
        grid,
        params,
        initial,
        diagnostics,
        final_state,
    })
}

/// Velocity errors of a traveling-vortex run against the advected exact
/// solution at the final time: `(l2_error(u1), l2_error(u2))`.
pub fn traveling_vortex_errors(config: &RunConfig) -> Result<(f64, f64)> {
    let (grid, params, initial) = build_problem(config)?;
    let step_cfg = step_config(config)?;
    let (_diag, final_state) = stepper::run(initial, &step_cfg, &params, &grid, config.t_end);
    let state = final_state?;
    let p = TravelingVortexParams::new(config.epsilon, config.eta_relation);
    let exact = exact_traveling_vortex(state.time, &grid, &p)?;
    let u = state.velocity();
    let u_exact = exact.velocity();
    let e1 = l2_error(&u[0], &u_exact[0], &grid)?;
    let e2 = l2_error(&u[1], &u_exact[1], &grid)?;
    Ok((e1, e2))
}

/// One grid line of a convergence sweep; failed cases carry the error text
/// so a sweep survives individual failures.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub n: usize,
    pub outcome: std::result::Result<(f64, f64), String>,
}

/// Convergence table for one Mach number.
#[derive(Debug, Clone)]
pub struct EpsilonTable {
    pub epsilon: f64,
    pub rows: Vec<SweepRow>,
}

impl EpsilonTable {
    /// Rows with rates attached (rates only between consecutive successful
    /// grids).
    pub fn convergence_rows(&self) -> Vec<ConvergenceRow> {
        let mut out = Vec::new();
        let mut prev: Option<(f64, f64)> = None;
        for row in &self.rows {
            if let Ok((e1, e2)) = row.outcome {
                let (r1, r2) = match prev {
                    Some((p1, p2)) => (eoc(p1, e1), eoc(p2, e2)),
                    None => (None, None),
                };
                out.push(ConvergenceRow {
                    n: row.n,
                    err_u1: e1,
                    eoc_u1: r1,
                    err_u2: e2,
                    eoc_u2: r2,
                });
                prev = Some((e1, e2));
            } else {
                prev = None;
            }
        }
        out
    }
}

/// Runs the traveling-vortex convergence study over `grids` for each Mach
/// number in `epsilons`.
pub fn convergence_sweep(
    base: &RunConfig,
    grids: &[usize],
    epsilons: &[f64],
) -> Vec<EpsilonTable> {
    epsilons
        .iter()
        .map(|&epsilon| {
            let rows = grids
                .iter()
                .map(|&n| {
                    let mut config = base.clone();
                    config.problem = ProblemKind::TravelingVortex;
                    config.n = n;
                    config.epsilon = epsilon;
                    let outcome =
                        traveling_vortex_errors(&config).map_err(|e| e.to_string());
                    SweepRow { n, outcome }
                })
                .collect();
            EpsilonTable { epsilon, rows }
        })
        .collect()
}

/// One measurement of the asymptotic-range sweep.
#[derive(Debug, Clone)]
pub struct ApRow {
    pub epsilon: f64,
    pub rho_osc: f64,
    pub max_div_u: f64,
}

/// Runs `steps` fixed steps of the well-prepared problem per Mach number and
/// records the density oscillation and maximum velocity divergence.
pub fn ap_sweep(
    base: &RunConfig,
    epsilons: &[f64],
    steps: usize,
) -> Vec<std::result::Result<ApRow, String>> {
    epsilons
        .iter()
        .map(|&epsilon| {
            let mut config = base.clone();
            config.problem = ProblemKind::WellPrepared;
            config.epsilon = epsilon;
            let run = || -> Result<ApRow> {
                let (grid, params, initial) = build_problem(&config)?;
                let step_cfg = step_config(&config)?;
                let (_diag, final_state) =
                    stepper::run_steps(initial, &step_cfg, &params, &grid, steps);
                let state = final_state?;
                Ok(ApRow {
                    epsilon,
                    rho_osc: density_oscillation(&state),
                    max_div_u: div_u_max(&state, &grid),
                })
            };
            run().map_err(|e| e.to_string())
        })
        .collect()
}
