//! Run configuration: defaults, flat `key = value` config files and
//! command-line overrides, merged with precedence defaults < file < flags.

use crate::elliptic::Stencil;
use crate::problems::EtaRelation;
use crate::spatial::Limiter;
use crate::tableaux;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}:{line}: malformed line (expected `key = value`)")]
    Malformed { path: String, line: usize },
    #[error("{path}:{line}: unknown key {key:?}")]
    UnknownKey {
        path: String,
        line: usize,
        key: String,
    },
    #[error("invalid value for {key}: {message}")]
    InvalidValue { key: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    TravelingVortex,
    StationaryVortex,
    WellPrepared,
}

impl ProblemKind {
    pub fn name(&self) -> &'static str {
        match self {
            ProblemKind::TravelingVortex => "traveling_vortex",
            ProblemKind::StationaryVortex => "stationary_vortex",
            ProblemKind::WellPrepared => "well_prepared",
        }
    }
}

impl std::str::FromStr for ProblemKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "traveling_vortex" => Ok(ProblemKind::TravelingVortex),
            "stationary_vortex" => Ok(ProblemKind::StationaryVortex),
            "well_prepared" => Ok(ProblemKind::WellPrepared),
            other => Err(format!(
                "unknown problem {other:?} (expected traveling_vortex|stationary_vortex|well_prepared)"
            )),
        }
    }
}

/// Fully merged run configuration. Validation happens before any allocation
/// or file output.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub problem: ProblemKind,
    pub n: usize,
    pub epsilon: f64,
    pub gamma: f64,
    pub tableau: String,
    pub cfl: f64,
    pub t_end: f64,
    pub limiter: Limiter,
    pub stencil: Stencil,
    pub elliptic_tol: f64,
    pub eta_relation: EtaRelation,
    pub out_dir: PathBuf,
    /// Steps between field dumps; 0 writes the final state only.
    pub dump_cadence: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            problem: ProblemKind::TravelingVortex,
            n: 40,
            epsilon: 1e-2,
            gamma: 2.0,
            tableau: tableaux::DP2_A242.to_string(),
            cfl: 0.45,
            t_end: 0.1,
            limiter: Limiter::Minmod,
            stencil: Stencil::ExactComposition,
            elliptic_tol: 1e-12,
            eta_relation: EtaRelation::Balanced,
            out_dir: PathBuf::from("."),
            dump_cadence: 0,
        }
    }
}

/// Optional command-line overrides, applied after the config file.
#[derive(Debug, Clone, Default)]
pub struct ConfigOverrides {
    pub problem: Option<String>,
    pub n: Option<usize>,
    pub epsilon: Option<f64>,
    pub gamma: Option<f64>,
    pub tableau: Option<String>,
    pub cfl: Option<f64>,
    pub t_end: Option<f64>,
    pub limiter: Option<String>,
    pub stencil: Option<String>,
    pub elliptic_tol: Option<f64>,
    pub eta_relation: Option<String>,
    pub out_dir: Option<PathBuf>,
    pub dump_cadence: Option<usize>,
}

impl RunConfig {
    /// Defaults, then the config file (if any), then flag overrides; the
    /// merged result is validated as a whole.
    pub fn from_sources(
        file: Option<&Path>,
        overrides: &ConfigOverrides,
    ) -> Result<RunConfig, ConfigError> {
        let mut cfg = RunConfig::default();
        if let Some(path) = file {
            cfg.apply_file(path)?;
        }
        cfg.apply_overrides(overrides)?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let display = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: display.clone(),
            source,
        })?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or(ConfigError::Malformed {
                path: display.clone(),
                line,
            })?;
            let key = key.trim();
            let value = value.trim();
            if !self.apply_key(key, value)? {
                return Err(ConfigError::UnknownKey {
                    path: display.clone(),
                    line,
                    key: key.to_string(),
                });
            }
        }
        Ok(())
    }

    fn apply_key(&mut self, key: &str, value: &str) -> Result<bool, ConfigError> {
        match key {
            "problem" => self.problem = parse(key, value)?,
            "n" => self.n = parse(key, value)?,
            "epsilon" => self.epsilon = parse(key, value)?,
            "gamma" => self.gamma = parse(key, value)?,
            "tableau" => self.tableau = value.to_string(),
            "cfl" => self.cfl = parse(key, value)?,
            "t_end" => self.t_end = parse(key, value)?,
            "limiter" => self.limiter = parse(key, value)?,
            "stencil" => self.stencil = parse(key, value)?,
            "elliptic_tol" => self.elliptic_tol = parse(key, value)?,
            "eta_relation" => self.eta_relation = parse(key, value)?,
            "out" => self.out_dir = PathBuf::from(value),
            "dump_cadence" => self.dump_cadence = parse(key, value)?,
            _ => return Ok(false),
        }
        Ok(true)
    }

    fn apply_overrides(&mut self, o: &ConfigOverrides) -> Result<(), ConfigError> {
        if let Some(v) = &o.problem {
            self.problem = parse("problem", v)?;
        }
        if let Some(v) = o.n {
            self.n = v;
        }
        if let Some(v) = o.epsilon {
            self.epsilon = v;
        }
        if let Some(v) = o.gamma {
            self.gamma = v;
        }
        if let Some(v) = &o.tableau {
            self.tableau = v.clone();
        }
        if let Some(v) = o.cfl {
            self.cfl = v;
        }
        if let Some(v) = o.t_end {
            self.t_end = v;
        }
        if let Some(v) = &o.limiter {
            self.limiter = parse("limiter", v)?;
        }
        if let Some(v) = &o.stencil {
            self.stencil = parse("stencil", v)?;
        }
        if let Some(v) = o.elliptic_tol {
            self.elliptic_tol = v;
        }
        if let Some(v) = &o.eta_relation {
            self.eta_relation = parse("eta_relation", v)?;
        }
        if let Some(v) = &o.out_dir {
            self.out_dir = v.clone();
        }
        if let Some(v) = o.dump_cadence {
            self.dump_cadence = v;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let fail = |key: &str, message: String| -> Result<(), ConfigError> {
            Err(ConfigError::InvalidValue {
                key: key.to_string(),
                message,
            })
        };
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return fail(
                "cfl",
                format!("the CFL number must lie in (0, 1), got {}", self.cfl),
            );
        }
        if self.n < 4 {
            return fail("n", format!("need at least 4 cells per axis, got {}", self.n));
        }
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return fail(
                "epsilon",
                format!("must be positive and finite, got {}", self.epsilon),
            );
        }
        if !(self.gamma >= 1.0) || !self.gamma.is_finite() {
            return fail("gamma", format!("must be >= 1, got {}", self.gamma));
        }
        if !(self.t_end >= 0.0) || !self.t_end.is_finite() {
            return fail("t_end", format!("must be nonnegative, got {}", self.t_end));
        }
        if !(self.elliptic_tol > 0.0) {
            return fail(
                "elliptic_tol",
                format!("must be positive, got {}", self.elliptic_tol),
            );
        }
        if let Err(e) = tableaux::get_tableau(&self.tableau) {
            return fail("tableau", e.to_string());
        }
        Ok(())
    }

    /// Deterministic one-line provenance comment for output files.
    pub fn metadata_comment(&self) -> String {
        format!(
            "# problem={} n={} epsilon={:e} gamma={} tableau={} cfl={} t_end={} limiter={} stencil={} eta_relation={}",
            self.problem.name(),
            self.n,
            self.epsilon,
            self.gamma,
            self.tableau,
            self.cfl,
            self.t_end,
            match self.limiter {
                Limiter::Minmod => "minmod",
                Limiter::MonotonizedCentral => "mc",
                Limiter::Unlimited => "none",
            },
            match self.stencil {
                Stencil::ExactComposition => "composed",
                Stencil::CompactLaplacian => "compact",
            },
            match self.eta_relation {
                EtaRelation::Balanced => "balanced",
                EtaRelation::Paper => "paper",
            },
        )
    }
}

fn parse<T>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T: std::str::FromStr,
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e: T::Err| ConfigError::InvalidValue {
        key: key.to_string(),
        message: format!("{e} (got {value:?})"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_config(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn empty_file_keeps_defaults() {
        let f = write_config("# nothing but a comment\n\n");
        let cfg = RunConfig::from_sources(Some(f.path()), &ConfigOverrides::default()).unwrap();
        assert_eq!(cfg.cfl, 0.45);
        assert_eq!(cfg.tableau, tableaux::DP2_A242);
        assert_eq!(cfg.gamma, 2.0);
        assert_eq!(cfg.limiter, Limiter::Minmod);
    }

    #[test]
    fn flags_override_file() {
        let f = write_config("epsilon = 1e-2\nn = 32\n");
        let overrides = ConfigOverrides {
            epsilon: Some(1e-3),
            ..Default::default()
        };
        let cfg = RunConfig::from_sources(Some(f.path()), &overrides).unwrap();
        assert_eq!(cfg.epsilon, 1e-3);
        assert_eq!(cfg.n, 32);
    }

    #[test]
    fn unknown_key_is_a_hard_error() {
        let f = write_config("epsilonn = 1e-2\n");
        let err = RunConfig::from_sources(Some(f.path()), &ConfigOverrides::default())
            .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("epsilonn"), "{msg}");
        assert!(msg.contains(":1"), "{msg}");
    }

    #[test]
    fn cfl_out_of_range_is_rejected() {
        let f = write_config("cfl = 1.5\n");
        let err = RunConfig::from_sources(Some(f.path()), &ConfigOverrides::default())
            .unwrap_err();
        assert!(err.to_string().contains("(0, 1)"), "{err}");
    }

    #[test]
    fn invalid_enum_value_names_the_key() {
        let f = write_config("limiter = vanleer\n");
        let err = RunConfig::from_sources(Some(f.path()), &ConfigOverrides::default())
            .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("limiter"), "{msg}");
    }

    #[test]
    fn unknown_tableau_is_rejected_with_catalog() {
        let overrides = ConfigOverrides {
            tableau: Some("RK4".into()),
            ..Default::default()
        };
        let err = RunConfig::from_sources(None, &overrides).unwrap_err();
        assert!(err.to_string().contains("DP1-A(2,4,2)"), "{err}");
    }

    #[test]
    fn metadata_comment_is_deterministic() {
        let cfg = RunConfig::default();
        assert_eq!(cfg.metadata_comment(), cfg.metadata_comment());
        assert!(cfg.metadata_comment().starts_with('#'));
    }
}
