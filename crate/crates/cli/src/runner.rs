//! Runs one scenario: builds the initial state, evolves it and writes
//! `series.csv`, snapshots, heatmaps and a `run.json` summary.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use dwps_core::observables::{ObservableRecord, ObservableSeries};
use dwps_core::phase_grid::{make_grid, PhaseGrid};
use dwps_core::propagator::{EvolveReport, Propagator};
use dwps_core::states::{cat_state, gaussian_wavepacket, majorana_pair, wigner_from_spinor};
use dwps_core::PhaseFieldF64;
use serde_json::json;

use crate::config::{InitialState, ScenarioConfig};
use crate::error::CliError;
use crate::heatmap::write_heatmap;
use crate::snapshot::{write_snapshot, PayloadKind, Snapshot};

pub const SERIES_HEADER: &str =
    "t,norm,negativity,transmission,antiparticle_fraction,energy,p_mean,p2_mean,x_mean,negativity_abs,min_w0";

/// One CSV row at 17 significant digits.
pub fn csv_row(r: &ObservableRecord<f64>) -> String {
    [
        r.t,
        r.norm,
        r.negativity,
        r.transmission,
        r.antiparticle_fraction,
        r.energy,
        r.p_mean,
        r.p2_mean,
        r.x_mean,
        r.negativity.abs(),
        r.negativity_min,
    ]
    .iter()
    .map(|v| format!("{v:.16e}"))
    .collect::<Vec<_>>()
    .join(",")
}

pub fn grid(c: &ScenarioConfig) -> Result<PhaseGrid<f64>, CliError> {
    let g = &c.grid;
    Ok(make_grid(g.n_x, g.n_p, g.x_min, g.x_max, g.p_min, g.p_max)?)
}

/// The X_P Wigner matrix of the configured initial spinor.
pub fn initial_state(c: &ScenarioConfig, grid: &PhaseGrid<f64>) -> Result<PhaseFieldF64, CliError> {
    let psi = match c.state {
        InitialState::Gaussian => gaussian_wavepacket(&c.packet, grid)?,
        InitialState::Majorana => majorana_pair(&gaussian_wavepacket(&c.packet, grid)?)?.0,
        InitialState::Cat => cat_state(&c.packet, grid)?,
    };
    Ok(wigner_from_spinor(&psi, grid)?)
}

pub struct RunOutcome {
    pub dir: PathBuf,
    pub series: ObservableSeries<f64>,
    pub report: EvolveReport,
    pub elapsed: Duration,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

struct Outputs<'a> {
    config: &'a ScenarioConfig,
    dir: &'a Path,
    csv: BufWriter<File>,
    a0: Box<dyn Fn(f64) -> Vec<f64> + 'a>,
}

impl Outputs<'_> {
    fn row(&mut self, r: &ObservableRecord<f64>) -> Result<(), CliError> {
        let path = self.dir.join("series.csv");
        writeln!(self.csv, "{}", csv_row(r)).map_err(|e| CliError::io(&path, e))
    }

    fn snapshot(&self, q: &PhaseFieldF64, step: usize, t: f64) -> Result<(), CliError> {
        let c = self.config;
        let snap_path = self.dir.join(format!("snap_{step:06}.dwps"));
        let wrap = |source| CliError::Snapshot { path: snap_path.clone(), source };
        let snap = Snapshot::of_kind(q, t, c.snapshot_payload).map_err(wrap)?;
        write_snapshot(&snap, &snap_path).map_err(wrap)?;
        if c.heatmaps {
            let w0 = match c.snapshot_payload {
                PayloadKind::W0Real => snap,
                PayloadKind::FullMatrix => Snapshot::w0(q, t).map_err(wrap)?,
            };
            let stem = format!("w0_{step:06}");
            write_heatmap(&w0, &(self.a0)(t), self.dir, &stem)
                .map_err(|e| CliError::io(&self.dir.join(format!("{stem}.png")), e))?;
        }
        Ok(())
    }
}

/// Evolves the scenario and writes every output into `config.output_dir`.
pub fn run(config: &ScenarioConfig) -> Result<RunOutcome, CliError> {
    let start = Instant::now();
    let dir = config.output_dir.clone();
    fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;

    let grid = grid(config)?;
    let potential = config.potential();
    let prop = Propagator::new(grid, config.propagator_config(), potential.clone())?;
    let mut q = initial_state(config, &grid)?;

    let csv_path = dir.join("series.csv");
    let file = File::create(&csv_path).map_err(|e| CliError::io(&csv_path, e))?;
    let x_axis = grid.x_axis();
    let mut out = Outputs {
        config,
        dir: &dir,
        csv: BufWriter::new(file),
        a0: Box::new(move |t| x_axis.iter().map(|&x| potential.a0(t, x)).collect()),
    };
    writeln!(out.csv, "{SERIES_HEADER}").map_err(|e| CliError::io(&csv_path, e))?;

    let cadence = if config.snapshot_every > 0 {
        gcd(config.observe_every, config.snapshot_every)
    } else {
        config.observe_every
    };
    let mut series = ObservableSeries::new();
    // an output failure stops the evolution; it is reported in place of
    // the placeholder error returned to the propagator
    let mut failure: Option<CliError> = None;
    let result = prop.evolve(&mut q, 0.0, config.t_end, cadence, |o| {
        let last = o.time == config.t_end;
        let mut work = || -> Result<(), CliError> {
            if o.step % config.observe_every == 0 || last {
                let r = ObservableRecord::measure(o.state, o.time, config.potential.threshold, config.packet.mass)?;
                out.row(&r)?;
                series.push(r)?;
            }
            if config.snapshot_every > 0 && (o.step % config.snapshot_every == 0 || last) {
                out.snapshot(o.state, o.step, o.time)?;
                log::info!("{}: t = {:.3}", config.name, o.time);
            }
            Ok(())
        };
        work().map_err(|e| {
            failure = Some(e);
            dwps_core::Error::InvalidConfig("output failed".into())
        })
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let report = result?;
    out.csv.flush().map_err(|e| CliError::io(&csv_path, e))?;

    let elapsed = start.elapsed();
    let summary = json!({
        "name": config.name,
        "kind": config.kind.as_str(),
        "steps": report.steps,
        "final_time": report.final_time,
        "elapsed_seconds": elapsed.as_secs_f64(),
        "boundary_warnings": report.warnings.iter().map(|w| json!({
            "step": w.step,
            "time": w.time,
            "axis": format!("{:?}", w.axis),
            "edge_weight": w.edge_weight,
        })).collect::<Vec<_>>(),
    });
    let summary_path = dir.join("run.json");
    fs::write(&summary_path, format!("{summary:#}\n")).map_err(|e| CliError::io(&summary_path, e))?;
    if !report.warnings.is_empty() {
        log::warn!("{}: {} boundary warnings, see run.json", config.name, report.warnings.len());
    }
    Ok(RunOutcome { dir: dir.clone(), series, report, elapsed })
}
