//! Plain-text output: field dumps and CSV tables.
//!
//! Field dump format (one file per dump):
//!
//! ```text
//!   line 1: nx ny
//!   line 2: x0 y0 dx dy
//!   line 3: time epsilon gamma
//!   then one line per cell, row-major with x fastest:
//!           rho q1 q2 p mach
//! ```
//!
//! All reals are printed with 17 significant digits so 64-bit values
//! round-trip. Output is deterministic: re-running the same configuration
//! on the same build produces byte-identical files (metadata is confined to
//! `#` comment lines and contains no wall-clock content).

use crate::diagnostics::{mach_field, ConvergenceRow, DiagnosticsRecord};
use crate::driver::{ApRow, EpsilonTable};
use crate::error::Result;
use crate::grid::GridSpec;
use crate::model::{pressure, ConservedState, ModelParams};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes `fields_<time>.dat` into `dir` and returns its path.
pub fn write_field_dump(
    dir: &Path,
    state: &ConservedState,
    grid: &GridSpec,
    params: &ModelParams,
) -> Result<PathBuf> {
    let path = dir.join(format!("fields_{:.6}.dat", state.time));
    let file = std::fs::File::create(&path).map_err(io_error)?;
    let mut w = BufWriter::new(file);
    write_field_dump_to(&mut w, state, grid, params).map_err(io_error)?;
    w.flush().map_err(io_error)?;
    Ok(path)
}

fn write_field_dump_to(
    w: &mut impl Write,
    state: &ConservedState,
    grid: &GridSpec,
    params: &ModelParams,
) -> io::Result<()> {
    let n = grid.n();
    writeln!(w, "{} {}", n[0], n[1])?;
    writeln!(
        w,
        "{} {} {} {}",
        fmt(grid.origin()[0]),
        fmt(grid.origin()[1]),
        fmt(grid.dx()[0]),
        fmt(grid.dx()[1])
    )?;
    writeln!(
        w,
        "{} {} {}",
        fmt(state.time),
        fmt(params.epsilon),
        fmt(params.gamma)
    )?;
    let mach = mach_field(state, params, grid);
    for i in 0..grid.num_cells() {
        let p = pressure(state.rho[i], params.gamma).unwrap_or(f64::NAN);
        writeln!(
            w,
            "{} {} {} {} {}",
            fmt(state.rho[i]),
            fmt(state.q[0][i]),
            fmt(state.q[1][i]),
            fmt(p),
            fmt(mach[i])
        )?;
    }
    Ok(())
}

/// Writes `diagnostics.csv`: columns `t, dt, ke, rel_ke_change, max_div_u,
/// rho_osc` with a header row and a `#` metadata comment.
pub fn write_diagnostics_csv(
    path: &Path,
    metadata: &str,
    record: &DiagnosticsRecord,
) -> Result<()> {
    let mut out = String::new();
    out.push_str(metadata);
    out.push('\n');
    out.push_str("t,dt,ke,rel_ke_change,max_div_u,rho_osc\n");
    for i in 0..record.len() {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt(record.times[i]),
            fmt(record.dt_history[i]),
            fmt(record.kinetic_energy[i]),
            fmt(record.rel_ke_change[i]),
            fmt(record.max_abs_div_u[i]),
            fmt(record.density_oscillation[i]),
        ));
    }
    std::fs::write(path, out).map_err(io_error)
}

/// Writes one experimental-order-of-convergence table as CSV with the
/// column layout `N, err_u1, eoc_u1, err_u2, eoc_u2`.
pub fn write_convergence_csv(path: &Path, metadata: &str, table: &EpsilonTable) -> Result<()> {
    let mut out = String::new();
    out.push_str(metadata);
    out.push('\n');
    out.push_str("N,err_u1,eoc_u1,err_u2,eoc_u2\n");
    let rows: Vec<ConvergenceRow> = table.convergence_rows();
    let mut ok_rows = rows.iter();
    for sweep_row in &table.rows {
        match &sweep_row.outcome {
            Ok(_) => {
                let row = ok_rows.next().expect("one table row per successful case");
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    row.n,
                    fmt(row.err_u1),
                    row.eoc_u1.map(fmt).unwrap_or_default(),
                    fmt(row.err_u2),
                    row.eoc_u2.map(fmt).unwrap_or_default(),
                ));
            }
            Err(msg) => {
                out.push_str(&format!("{},failed,,,{}\n", sweep_row.n, msg.replace(',', ";")));
            }
        }
    }
    std::fs::write(path, out).map_err(io_error)
}

/// Writes the asymptotic-range sweep CSV: `epsilon, rho_osc, max_div_u`.
pub fn write_ap_csv(
    path: &Path,
    metadata: &str,
    rows: &[std::result::Result<ApRow, String>],
) -> Result<()> {
    let mut out = String::new();
    out.push_str(metadata);
    out.push('\n');
    out.push_str("epsilon,rho_osc,max_div_u\n");
    for row in rows {
        match row {
            Ok(r) => out.push_str(&format!(
                "{},{},{}\n",
                fmt(r.epsilon),
                fmt(r.rho_osc),
                fmt(r.max_div_u)
            )),
            Err(msg) => out.push_str(&format!("failed,{},\n", msg.replace(',', ";"))),
        }
    }
    std::fs::write(path, out).map_err(io_error)
}

fn io_error(e: io::Error) -> crate::error::SolverError {
    crate::error::SolverError::InvalidState(format!("i/o failure: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ConservedState;

    #[test]
    fn field_dump_round_trips_header_and_values() {
        let dir = tempfile::tempdir().unwrap();
        let grid = GridSpec::unit_square(4).unwrap();
        let params = ModelParams::new(1e-2, 2.0).unwrap();
        let state = ConservedState::uniform(&grid, 1.25, &[0.5, -0.25]).unwrap();
        let path = write_field_dump(dir.path(), &state, &grid, &params).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "4 4");
        let geo: Vec<f64> = lines
            .next()
            .unwrap()
            .split_whitespace()
            .map(|t| t.parse().unwrap())
            .collect();
        assert_eq!(geo, vec![0.0, 0.0, 0.25, 0.25]);
        let meta: Vec<f64> = lines
            .next()
            .unwrap()
            .split_whitespace()
            .map(|t| t.parse().unwrap())
            .collect();
        assert_eq!(meta, vec![0.0, 1e-2, 2.0]);
        let first: Vec<f64> = lines
            .next()
            .unwrap()
            .split_whitespace()
            .map(|t| t.parse().unwrap())
            .collect();
        assert_eq!(first[0], 1.25); // 17 significant digits round-trip
        assert_eq!(first[1], 0.5);
        assert_eq!(text.lines().count(), 3 + 16);
    }

    #[test]
    fn csv_output_is_reproducible() {
        let dir = tempfile::tempdir().unwrap();
        let mut record = DiagnosticsRecord::new();
        let grid = GridSpec::unit_square(4).unwrap();
        let state = ConservedState::uniform(&grid, 1.0, &[0.3, 0.0]).unwrap();
        record.push_step(&state, &grid, 0.01, 1.0);
        let p1 = dir.path().join("a.csv");
        let p2 = dir.path().join("b.csv");
        write_diagnostics_csv(&p1, "# meta", &record).unwrap();
        write_diagnostics_csv(&p2, "# meta", &record).unwrap();
        assert_eq!(
            std::fs::read(&p1).unwrap(),
            std::fs::read(&p2).unwrap()
        );
        let text = std::fs::read_to_string(&p1).unwrap();
        assert!(text.starts_with("# meta\nt,dt,ke,rel_ke_change,max_div_u,rho_osc\n"));
    }
}
