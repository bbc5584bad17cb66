//! Command-line driver: single runs, convergence sweeps, asymptotic-range
//! sweeps and tableau validation.
//!
//! Exit codes: 0 on success, 1 for configuration errors, 2 for solver
//! failures.

use clap::{Args, Parser, Subcommand};
use lowmach::config::{ConfigOverrides, ProblemKind, RunConfig};
use lowmach::driver;
use lowmach::output;
use lowmach::tableaux::{get_tableau, validate_tableau};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "lowmach",
    about = "Asymptotic-preserving IMEX-RK finite-volume solver for low-Mach isentropic Euler flow"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ConfigFlags {
    /// Flat `key = value` configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Problem name: traveling_vortex | stationary_vortex | well_prepared
    #[arg(long)]
    problem: Option<String>,
    /// Cells per axis of the square grid
    #[arg(long)]
    n: Option<usize>,
    /// Scaled Mach number
    #[arg(long)]
    epsilon: Option<f64>,
    /// Pressure-law exponent
    #[arg(long)]
    gamma: Option<f64>,
    /// Tableau name, e.g. "DP2-A(2,4,2)"
    #[arg(long)]
    tableau: Option<String>,
    /// CFL number in (0, 1)
    #[arg(long)]
    cfl: Option<f64>,
    /// Final time
    #[arg(long, value_name = "REAL")]
    t_end: Option<f64>,
    /// Slope limiter: minmod | none
    #[arg(long)]
    limiter: Option<String>,
    /// Elliptic stencil: composed | compact
    #[arg(long)]
    stencil: Option<String>,
    /// Relative tolerance of the stage density solve
    #[arg(long)]
    elliptic_tol: Option<f64>,
    /// Vortex amplitude relation: balanced | paper
    #[arg(long)]
    eta_relation: Option<String>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Steps between field dumps (0 = final state only)
    #[arg(long)]
    dump_cadence: Option<usize>,
}

impl ConfigFlags {
    fn merge(&self) -> Result<RunConfig, lowmach::config::ConfigError> {
        let overrides = ConfigOverrides {
            problem: self.problem.clone(),
            n: self.n,
            epsilon: self.epsilon,
            gamma: self.gamma,
            tableau: self.tableau.clone(),
            cfl: self.cfl,
            t_end: self.t_end,
            limiter: self.limiter.clone(),
            stencil: self.stencil.clone(),
            elliptic_tol: self.elliptic_tol,
            eta_relation: self.eta_relation.clone(),
            out_dir: self.out.clone(),
            dump_cadence: self.dump_cadence,
        };
        RunConfig::from_sources(self.config.as_deref(), &overrides)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one configured problem and write field dump(s) and diagnostics
    Run(ConfigFlags),
    /// Traveling-vortex convergence study over grids and Mach numbers
    Convergence {
        #[command(flatten)]
        flags: ConfigFlags,
        /// Comma-separated grid sizes
        #[arg(long, value_delimiter = ',', default_value = "20,40,80,160")]
        grids: Vec<usize>,
        /// Comma-separated Mach numbers
        #[arg(long, value_delimiter = ',', default_value = "1e-2,1e-3,1e-4,1e-5")]
        epsilons: Vec<f64>,
    },
    /// Well-prepared scaling sweep over Mach numbers at fixed step count
    ApSweep {
        #[command(flatten)]
        flags: ConfigFlags,
        /// Comma-separated Mach numbers
        #[arg(long, value_delimiter = ',', default_value = "1e-2,1e-3,1e-4")]
        epsilons: Vec<f64>,
        /// Number of fixed steps per case
        #[arg(long, default_value_t = 10)]
        steps: usize,
    },
    /// Print the validation report of a shipped tableau
    TableauCheck { name: String },
}

const EXIT_CONFIG: u8 = 1;
const EXIT_SOLVER: u8 = 2;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // help/version requests are not errors
            let code = if err.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Run(flags) => cmd_run(flags),
        Command::Convergence {
            flags,
            grids,
            epsilons,
        } => cmd_convergence(flags, &grids, &epsilons),
        Command::ApSweep {
            flags,
            epsilons,
            steps,
        } => cmd_ap_sweep(flags, &epsilons, steps),
        Command::TableauCheck { name } => cmd_tableau_check(&name),
    }
}

fn merge_or_exit(flags: &ConfigFlags) -> Result<RunConfig, ExitCode> {
    flags.merge().map_err(|err| {
        eprintln!("config error: {err}");
        ExitCode::from(EXIT_CONFIG)
    })
}

fn cmd_run(flags: ConfigFlags) -> ExitCode {
    let config = match merge_or_exit(&flags) {
        Ok(c) => c,
        Err(code) => return code,
    };
    if config.problem == ProblemKind::StationaryVortex && config.gamma != 2.0 {
        eprintln!(
            "warning: the stationary vortex balances exactly only for gamma = 2 (got {})",
            config.gamma
        );
    }
    if let Err(e) = std::fs::create_dir_all(&config.out_dir) {
        eprintln!("config error: cannot create output directory: {e}");
        return ExitCode::from(EXIT_CONFIG);
    }

    let (grid, params, initial) = match driver::build_problem(&config) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("solver error: {e}");
            return ExitCode::from(EXIT_SOLVER);
        }
    };
    let step_cfg = match driver::step_config(&config) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };

    let out_dir = config.out_dir.clone();
    let cadence = config.dump_cadence;
    let mut dump_failure: Option<String> = None;
    if cadence > 0 {
        if let Err(e) = output::write_field_dump(&out_dir, &initial, &grid, &params) {
            eprintln!("solver error: {e}");
            return ExitCode::from(EXIT_SOLVER);
        }
    }
    let mut observer = |step: usize, state: &lowmach::ConservedState| {
        if cadence > 0 && step % cadence == 0 {
            if let Err(e) = output::write_field_dump(&out_dir, state, &grid, &params) {
                dump_failure = Some(e.to_string());
            }
        }
    };
    let (diagnostics, final_state) = lowmach::stepper::run_with_observer(
        initial,
        &step_cfg,
        &params,
        &grid,
        config.t_end,
        &mut observer,
    );

    // diagnostics are flushed even when the run aborted mid-way
    if let Err(e) = output::write_diagnostics_csv(
        &config.out_dir.join("diagnostics.csv"),
        &config.metadata_comment(),
        &diagnostics,
    ) {
        eprintln!("solver error: {e}");
        return ExitCode::from(EXIT_SOLVER);
    }
    if let Some(msg) = dump_failure {
        eprintln!("solver error: field dump failed: {msg}");
        return ExitCode::from(EXIT_SOLVER);
    }
    match final_state {
        Ok(state) => match output::write_field_dump(&config.out_dir, &state, &grid, &params) {
            Ok(path) => {
                println!(
                    "run finished at t = {:.6} after {} steps; wrote {}",
                    state.time,
                    diagnostics.len(),
                    path.display()
                );
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("solver error: {e}");
                ExitCode::from(EXIT_SOLVER)
            }
        },
        Err(e) => {
            eprintln!("solver error: {e} (partial diagnostics written)");
            ExitCode::from(EXIT_SOLVER)
        }
    }
}

fn cmd_convergence(flags: ConfigFlags, grids: &[usize], epsilons: &[f64]) -> ExitCode {
    let config = match merge_or_exit(&flags) {
        Ok(c) => c,
        Err(code) => return code,
    };
    if grids.is_empty() || epsilons.is_empty() {
        eprintln!("config error: --grids and --epsilons must be non-empty");
        return ExitCode::from(EXIT_CONFIG);
    }
    if let Err(e) = std::fs::create_dir_all(&config.out_dir) {
        eprintln!("config error: cannot create output directory: {e}");
        return ExitCode::from(EXIT_CONFIG);
    }
    let tables = driver::convergence_sweep(&config, grids, epsilons);
    let mut failures = 0usize;
    for table in &tables {
        let path = config
            .out_dir
            .join(format!("eoc_eps{:e}.csv", table.epsilon));
        let metadata = format!("{} epsilon={:e}", config.metadata_comment(), table.epsilon);
        if let Err(e) = output::write_convergence_csv(&path, &metadata, table) {
            eprintln!("solver error: {e}");
            return ExitCode::from(EXIT_SOLVER);
        }
        println!("epsilon = {:e}", table.epsilon);
        println!("  N      err_u1        eoc_u1   err_u2        eoc_u2");
        for row in table.convergence_rows() {
            println!(
                "  {:<5} {:.6e}  {}   {:.6e}  {}",
                row.n,
                row.err_u1,
                row.eoc_u1
                    .map(|v| format!("{v:.4}"))
                    .unwrap_or_else(|| "  -   ".into()),
                row.err_u2,
                row.eoc_u2
                    .map(|v| format!("{v:.4}"))
                    .unwrap_or_else(|| "  -   ".into()),
            );
        }
        for sweep_row in &table.rows {
            if let Err(msg) = &sweep_row.outcome {
                eprintln!("  n = {} failed: {msg}", sweep_row.n);
                failures += 1;
            }
        }
        println!("  wrote {}", path.display());
    }
    if failures > 0 {
        eprintln!("solver error: {failures} case(s) failed");
        return ExitCode::from(EXIT_SOLVER);
    }
    ExitCode::SUCCESS
}

fn cmd_ap_sweep(flags: ConfigFlags, epsilons: &[f64], steps: usize) -> ExitCode {
    let config = match merge_or_exit(&flags) {
        Ok(c) => c,
        Err(code) => return code,
    };
    if epsilons.is_empty() {
        eprintln!("config error: --epsilons must be non-empty");
        return ExitCode::from(EXIT_CONFIG);
    }
    if let Err(e) = std::fs::create_dir_all(&config.out_dir) {
        eprintln!("config error: cannot create output directory: {e}");
        return ExitCode::from(EXIT_CONFIG);
    }
    let rows = driver::ap_sweep(&config, epsilons, steps);
    let path = config.out_dir.join("ap_sweep.csv");
    let metadata = format!("{} steps={steps}", config.metadata_comment());
    if let Err(e) = output::write_ap_csv(&path, &metadata, &rows) {
        eprintln!("solver error: {e}");
        return ExitCode::from(EXIT_SOLVER);
    }
    println!("epsilon        rho_osc        max_div_u");
    let mut failures = 0usize;
    for row in &rows {
        match row {
            Ok(r) => println!("{:.3e}     {:.6e}   {:.6e}", r.epsilon, r.rho_osc, r.max_div_u),
            Err(msg) => {
                eprintln!("case failed: {msg}");
                failures += 1;
            }
        }
    }
    println!("wrote {}", path.display());
    if failures > 0 {
        return ExitCode::from(EXIT_SOLVER);
    }
    ExitCode::SUCCESS
}

fn cmd_tableau_check(name: &str) -> ExitCode {
    match get_tableau(name) {
        Ok(tableau) => {
            let report = validate_tableau(&tableau);
            print!("{report}");
            if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_SOLVER)
            }
        }
        Err(e) => {
            eprintln!("config error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}
