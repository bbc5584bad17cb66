//! Asymptotic-preserving IMEX-RK finite-volume solver for the scaled
//! isentropic/isothermal Euler equations on periodic grids.
//!
//! The momentum flux is split by adding and subtracting the density
//! gradient: the nonlinear convective part and the equilibrium deviation
//! `grad(p - rho)/eps^2` are integrated explicitly with a Rusanov flux,
//! while the linear `grad(rho)/eps^2` part is implicit. Eliminating the
//! implicit momentum from the implicit mass update turns each stage into a
//! scalar Helmholtz-type solve for the stage density followed by an
//! explicit momentum correction, so the scheme is linearly implicit with a
//! Mach-independent CFL restriction.
//!
//! Modules:
//! - [`grid`], [`model`]: periodic structured grids, conserved state, EOS.
//! - [`tableaux`]: double Butcher tableaux registry and validation.
//! - [`spatial`]: difference/average operators, MUSCL reconstruction,
//!   Rusanov and central fluxes.
//! - [`elliptic`]: the stage Helmholtz operator and its conjugate-gradient
//!   solver.
//! - [`stepper`]: the IMEX-RK integrator and time loop.
//! - [`problems`]: traveling vortex, stationary vortex, well-prepared data.
//! - [`diagnostics`]: norms, convergence rates, kinetic energy, Mach field.
//! - [`reference`]: dense coupled-system and LU reference solves used by
//!   the validation suite.
//! - [`config`], [`driver`], [`output`]: CLI-facing configuration,
//!   experiment orchestration and file formats.

pub mod config;
pub mod diagnostics;
pub mod driver;
pub mod elliptic;
pub mod error;
pub mod grid;
pub mod model;
pub mod output;
pub mod problems;
pub mod reference;
pub mod spatial;
pub mod stepper;
pub mod tableaux;

pub use error::{Result, SolverError};
pub use grid::GridSpec;
pub use model::{ConservedState, ModelParams};
