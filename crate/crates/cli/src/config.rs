//! Run configuration shared by the subcommands.

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::report::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

/// A single leaky parameter or an evenly spaced grid.
#[derive(Clone, Debug, PartialEq)]
pub enum AlphaSpec {
    Single(f64),
    Grid { start: f64, stop: f64, points: usize },
}

impl AlphaSpec {
    /// Parses `start:stop:points`.
    pub fn parse_grid(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("grid must be start:stop:points, got {s:?}"));
        }
        let start: f64 = parts[0].trim().parse().map_err(|_| format!("bad grid start {:?}", parts[0]))?;
        let stop: f64 = parts[1].trim().parse().map_err(|_| format!("bad grid stop {:?}", parts[1]))?;
        let points: usize = parts[2].trim().parse().map_err(|_| format!("bad grid point count {:?}", parts[2]))?;
        if points < 2 {
            return Err("a grid needs at least 2 points".into());
        }
        if !start.is_finite() || !stop.is_finite() {
            return Err("grid bounds must be finite".into());
        }
        Ok(AlphaSpec::Grid { start, stop, points })
    }

    pub fn values(&self) -> Vec<f64> {
        match *self {
            AlphaSpec::Single(a) => vec![a],
            AlphaSpec::Grid { start, stop, points } => {
                (0..points).map(|i| start + (stop - start) * i as f64 / (points - 1) as f64).collect()
            }
        }
    }
}

/// Named tolerances with their defaults.
pub const TOLERANCE_DEFAULTS: [(&str, f64); 7] = [
    ("spectrum", 1e-10),
    ("critical_residual", 1e-12),
    ("mc_sigma", 3.0),
    ("mc_pass_fraction", 0.99),
    ("gradient_fd", 1e-6),
    ("alpha_one_fd", 1e-5),
    ("critical_point", 1e-12),
];

#[derive(Clone, Debug, PartialEq)]
pub struct Tolerances {
    values: BTreeMap<&'static str, f64>,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { values: TOLERANCE_DEFAULTS.iter().copied().collect() }
    }
}

impl Tolerances {
    pub fn get(&self, name: &str) -> f64 {
        self.values[name]
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<(), CliError> {
        let key = TOLERANCE_DEFAULTS
            .iter()
            .map(|(k, _)| *k)
            .find(|k| *k == name)
            .ok_or_else(|| CliError::usage(format!("unknown tolerance {name:?}")))?;
        if !(value > 0.0 && value.is_finite()) {
            return Err(CliError::usage(format!("tolerance {name} must be positive, got {value}")));
        }
        self.values.insert(key, value);
        Ok(())
    }

    /// Applies `name=value` overrides.
    pub fn apply(&mut self, overrides: &[String]) -> Result<(), CliError> {
        for o in overrides {
            let (name, value) =
                o.split_once('=').ok_or_else(|| CliError::usage(format!("tolerance override must be name=value, got {o:?}")))?;
            let value: f64 = value.trim().parse().map_err(|_| CliError::usage(format!("bad tolerance value in {o:?}")))?;
            self.set(name.trim(), value)?;
        }
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'static str, f64)> + '_ {
        self.values.iter().map(|(k, v)| (*k, *v))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub k: Option<usize>,
    pub alpha: Option<AlphaSpec>,
    pub mc_samples: usize,
    pub mc_trials: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub cache_dir: Option<PathBuf>,
    pub output: OutputFormat,
    /// Adds `1e-3` to entry `(0,0)` of every assembled Hessian before the spectrum check.
    pub inject_hessian_perturbation: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            k: None,
            alpha: None,
            mc_samples: 100_000,
            mc_trials: 1000,
            seed: 0,
            tolerances: Tolerances::default(),
            cache_dir: None,
            output: OutputFormat::Text,
            inject_hessian_perturbation: false,
        }
    }
}

/// Size of the injected Hessian perturbation.
pub const PERTURBATION: f64 = 1e-3;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g = AlphaSpec::parse_grid("0:3.5:11").unwrap();
        let v = g.values();
        assert_eq!(v.len(), 11);
        assert_eq!(v[0], 0.0);
        assert_eq!(v[10], 3.5);
        assert!(AlphaSpec::parse_grid("0:1:1").is_err());
        assert!(AlphaSpec::parse_grid("0:1").is_err());
        assert!(AlphaSpec::parse_grid("a:1:3").is_err());
    }

    #[test]
    fn tolerance_overrides() {
        let mut t = Tolerances::default();
        t.apply(&["spectrum=1e-8".into()]).unwrap();
        assert_eq!(t.get("spectrum"), 1e-8);
        assert!(t.apply(&["nope=1".into()]).is_err());
        assert!(t.apply(&["spectrum=-1".into()]).is_err());
        assert!(t.apply(&["spectrum".into()]).is_err());
    }
}
