//! Model parameters, equation of state and conserved-state storage.
//!
//! The state carries the cell-centred density `rho` and momentum `q = rho u`
//! of the scaled isentropic/isothermal Euler system
//!
//! ```text
//!   d_t rho + div q                                   = 0
//!   d_t q   + div(q (x) q / rho) + grad p / eps^2     = 0,     p(rho) = rho^gamma.
//! ```

use crate::error::{Result, SolverError};
use crate::grid::GridSpec;

/// Scaled Mach number and EOS exponent.
#[derive(Debug, Clone, Copy)]
pub struct ModelParams {
    /// Scaled Mach number, `eps > 0`.
    pub epsilon: f64,
    /// Pressure-law exponent; 1 is isothermal, larger values isentropic.
    pub gamma: f64,
}

impl ModelParams {
    pub fn new(epsilon: f64, gamma: f64) -> Result<Self> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(SolverError::InvalidParams(format!(
                "epsilon must be positive and finite, got {epsilon}"
            )));
        }
        if !(gamma >= 1.0) || !gamma.is_finite() {
            return Err(SolverError::InvalidParams(format!(
                "gamma must be >= 1 and finite, got {gamma}"
            )));
        }
        Ok(ModelParams { epsilon, gamma })
    }
}

/// Power-law pressure `p(rho) = rho^gamma`.
pub fn pressure(rho: f64, gamma: f64) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(SolverError::NonPositiveDensity(rho));
    }
    Ok(rho.powf(gamma))
}

/// The split pressure term `p(rho) - rho = rho (rho^{gamma-1} - 1)`.
///
/// Evaluated as `rho * expm1((gamma - 1) * log1p(rho - 1))`, which keeps full
/// relative precision when `rho` is within a few ulps of 1. A direct
/// `rho.powf(gamma) - rho` loses all significant digits there, and the
/// stiff `1/eps^2` scaling then amplifies that rounding noise into the
/// momentum update. Requires `rho > 0`; exactly zero at `rho = 1` and for
/// `gamma = 1`.
#[inline]
pub fn pressure_deviation(rho: f64, gamma: f64) -> f64 {
    pressure_deviation_from_delta(rho - 1.0, gamma)
}

/// [`pressure_deviation`] parameterized by `delta = rho - 1`, for callers
/// that track the density deviation at better than ulp-of-one precision.
#[inline]
pub fn pressure_deviation_from_delta(delta: f64, gamma: f64) -> f64 {
    (1.0 + delta) * f64::exp_m1((gamma - 1.0) * f64::ln_1p(delta))
}

/// Cell-centred conserved fields on a [`GridSpec`].
///
/// `rho > 0` holds at every cell on construction; the time stepper re-checks
/// it after every stage. `q[c]` is the momentum component along axis `c`.
#[derive(Debug, Clone)]
pub struct ConservedState {
    pub rho: Vec<f64>,
    pub q: Vec<Vec<f64>>,
    pub time: f64,
}

impl ConservedState {
    pub fn new(rho: Vec<f64>, q: Vec<Vec<f64>>, time: f64, grid: &GridSpec) -> Result<Self> {
        let total = grid.num_cells();
        if rho.len() != total {
            return Err(SolverError::ShapeMismatch {
                expected: total,
                got: rho.len(),
            });
        }
        if q.len() != grid.dim() {
            return Err(SolverError::InvalidState(format!(
                "momentum needs {} components, got {}",
                grid.dim(),
                q.len()
            )));
        }
        for (c, qc) in q.iter().enumerate() {
            if qc.len() != total {
                return Err(SolverError::InvalidState(format!(
                    "momentum component {c} has {} cells, expected {total}",
                    qc.len()
                )));
            }
        }
        match min_of(&rho) {
            Some(m) if m > 0.0 => {}
            Some(m) => {
                return Err(SolverError::InvalidState(format!(
                    "density must be positive everywhere, min = {m}"
                )))
            }
            None => return Err(SolverError::InvalidState("empty density field".into())),
        }
        Ok(ConservedState { rho, q, time })
    }

    /// Spatially uniform state.
    pub fn uniform(grid: &GridSpec, rho0: f64, q0: &[f64]) -> Result<Self> {
        let total = grid.num_cells();
        let q = (0..grid.dim())
            .map(|c| vec![q0.get(c).copied().unwrap_or(0.0); total])
            .collect();
        Self::new(vec![rho0; total], q, 0.0, grid)
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    /// Primitive velocity `u = q / rho`, componentwise per cell.
    pub fn velocity(&self) -> Vec<Vec<f64>> {
        self.q
            .iter()
            .map(|qc| {
                qc.iter()
                    .zip(&self.rho)
                    .map(|(&q, &r)| q / r)
                    .collect()
            })
            .collect()
    }

    pub fn min_rho(&self) -> f64 {
        min_of(&self.rho).unwrap_or(f64::NAN)
    }
}

fn min_of(v: &[f64]) -> Option<f64> {
    v.iter().copied().reduce(f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn pressure_examples() {
        assert_eq!(pressure(1.0, 2.0).unwrap(), 1.0);
        assert_eq!(pressure(2.0, 2.0).unwrap(), 4.0);
        assert_eq!(pressure(1.5, 1.0).unwrap(), 1.5);
        assert!(pressure(0.0, 2.0).is_err());
        assert!(pressure(-1.0, 1.4).is_err());
    }

    #[test]
    fn pressure_is_increasing() {
        let mut last = 0.0;
        for k in 1..50 {
            let p = pressure(0.1 * k as f64, 1.4).unwrap();
            assert!(p > last);
            last = p;
        }
    }

    #[test]
    fn deviation_matches_direct_form_at_moderate_density() {
        for &gamma in &[1.0, 1.4, 2.0, 3.0] {
            for k in 1..40 {
                let rho = 0.2 + 0.1 * k as f64;
                let direct = rho.powf(gamma) - rho;
                let dev = pressure_deviation(rho, gamma);
                assert_relative_eq!(dev, direct, epsilon = 1e-12, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn deviation_vanishes_at_equilibrium() {
        for &gamma in &[1.0, 1.4, 2.0, 5.0] {
            assert_eq!(pressure_deviation(1.0, gamma), 0.0);
        }
        // isothermal law: p = rho exactly, any density
        assert_eq!(pressure_deviation(3.7, 1.0), 0.0);
    }

    #[test]
    fn deviation_keeps_relative_precision_near_one() {
        // rho = 1 + delta with delta far below the absolute rounding of powf
        let rho = 1.0 + 3.0e-14;
        let delta = rho - 1.0; // exact by Sterbenz
        let dev = pressure_deviation(rho, 2.0);
        // p - rho = rho (rho - 1) = delta (1 + delta)
        assert_relative_eq!(dev, delta * (1.0 + delta), max_relative = 1e-13);
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::new(1e-3, 2.0).is_ok());
        assert!(ModelParams::new(0.0, 2.0).is_err());
        assert!(ModelParams::new(-1.0, 2.0).is_err());
        assert!(ModelParams::new(1.0, 0.9).is_err());
    }

    #[test]
    fn velocity_is_per_cell_division() {
        let grid = GridSpec::unit_square(4).unwrap();
        let mut st = ConservedState::uniform(&grid, 2.0, &[1.0, 0.0]).unwrap();
        let u = st.velocity();
        assert!(u[0].iter().all(|&v| v == 0.5));
        assert!(u[1].iter().all(|&v| v == 0.0));

        // random field against an explicit elementwise loop
        for (i, r) in st.rho.iter_mut().enumerate() {
            *r = 1.0 + 0.3 * ((i * 7 % 11) as f64) / 11.0;
        }
        for c in 0..2 {
            for (i, q) in st.q[c].iter_mut().enumerate() {
                *q = ((i * 13 % 17) as f64 - 8.0) / 17.0;
            }
        }
        let u = st.velocity();
        for c in 0..2 {
            for i in 0..grid.num_cells() {
                assert_eq!(u[c][i], st.q[c][i] / st.rho[i]);
            }
        }
    }

    #[test]
    fn state_rejects_nonpositive_density() {
        let grid = GridSpec::unit_square(4).unwrap();
        let mut rho = vec![1.0; grid.num_cells()];
        rho[5] = 0.0;
        let q = vec![vec![0.0; grid.num_cells()]; 2];
        assert!(ConservedState::new(rho, q, 0.0, &grid).is_err());
    }

    #[test]
    fn uniform_rest_state_is_trivial() {
        let grid = GridSpec::unit_square(8).unwrap();
        let st = ConservedState::uniform(&grid, 1.3, &[0.0, 0.0]).unwrap();
        assert_eq!(st.min_rho(), 1.3);
        let u = st.velocity();
        assert!(u.iter().all(|uc| uc.iter().all(|&v| v == 0.0)));
    }
}
