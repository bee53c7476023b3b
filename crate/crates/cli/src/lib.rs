//! Scenario runner for the Dirac Wigner phase-space simulator: config
//! parsing, time series, binary snapshots, heatmaps and parameter sweeps.

pub mod config;
pub mod error;
pub mod heatmap;
pub mod plot;
pub mod runner;
pub mod snapshot;
pub mod sweep;

pub use config::{parse_config, parse_config_str, ScenarioConfig, ScenarioKind};
pub use error::CliError;
pub use runner::{run, RunOutcome};
pub use sweep::{sweep, SweepParam};

use std::path::PathBuf;

/// Command-line overrides applied on top of a parsed config.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub grid: Option<(usize, usize)>,
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub snapshot_every: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, mut c: ScenarioConfig) -> Result<ScenarioConfig, config::ConfigError> {
        if let Some(out) = &self.out {
            c.output_dir = out.clone();
        }
        if let Some((n_x, n_p)) = self.grid {
            c.grid.n_x = n_x;
            c.grid.n_p = n_p;
        }
        if let Some(dt) = self.dt {
            c.dt = dt;
        }
        if let Some(t) = self.t_end {
            c.t_end = t;
        }
        if let Some(k) = self.snapshot_every {
            c.snapshot_every = k;
        }
        config::validate(c, "command line")
    }
}

/// Parses `NxM` into `(n_x, n_p)`.
pub fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected NxM, got `{s}`"))?;
    let n = |v: &str| v.trim().parse::<usize>().map_err(|_| format!("`{v}` is not a grid size"));
    Ok((n(a)?, n(b)?))
}
