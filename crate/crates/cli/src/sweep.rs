//! Parameter sweeps: one run per value in its own sub-directory, then a
//! combined CSV and an overlay plot in the base output directory.

use std::fmt;
use std::fs;
use std::str::FromStr;

use crate::config::{validate, ScenarioConfig, ScenarioKind};
use crate::error::CliError;
use crate::plot::{overlay, Series};
use crate::runner::{csv_row, run, RunOutcome, SERIES_HEADER};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepParam {
    Dephasing,
    PTilde,
    Height,
}

impl SweepParam {
    pub fn key(self) -> &'static str {
        match self {
            SweepParam::Dephasing => "D",
            SweepParam::PTilde => "p_tilde",
            SweepParam::Height => "height",
        }
    }

    pub fn apply(self, c: &mut ScenarioConfig, v: f64) {
        match self {
            SweepParam::Dephasing => c.dephasing = v,
            SweepParam::PTilde => c.packet.p_tilde = v,
            SweepParam::Height => c.potential.height = v,
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for SweepParam {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "D" | "dephasing" => Ok(SweepParam::Dephasing),
            "p_tilde" => Ok(SweepParam::PTilde),
            "height" => Ok(SweepParam::Height),
            _ => Err(format!("cannot sweep `{s}` (expected D, p_tilde or height)")),
        }
    }
}

/// The quantity drawn in the overlay plot.
pub fn plotted_column(kind: ScenarioKind) -> &'static str {
    match kind {
        ScenarioKind::KleinStep | ScenarioKind::KleinBarrier => "transmission",
        _ => "negativity_abs",
    }
}

pub struct SweepOutcome {
    pub values: Vec<f64>,
    pub runs: Vec<RunOutcome>,
}

/// Runs `base` once per value of `param`, sequentially.
pub fn sweep(base: &ScenarioConfig, param: SweepParam, values: &[f64]) -> Result<SweepOutcome, CliError> {
    if values.is_empty() {
        return Err(CliError::Sweep {
            total: 0,
            failures: vec![("values".into(), CliError::Check("empty value list".into()))],
        });
    }
    if param == SweepParam::Height && base.potential.shape == crate::config::Shape::None {
        return Err(CliError::Sweep {
            total: values.len(),
            failures: vec![("height".into(), CliError::Check(format!("kind {} has no potential height", base.kind)))],
        });
    }
    let root = base.output_dir.clone();
    fs::create_dir_all(&root).map_err(|e| CliError::io(&root, e))?;

    let mut done = Vec::new();
    let mut failures = Vec::new();
    for &v in values {
        let label = format!("{param}_{v}");
        let mut c = base.clone();
        param.apply(&mut c, v);
        c.name = format!("{}_{label}", base.name);
        c.output_dir = root.join(&label);
        match validate(c, &label).map_err(CliError::from).and_then(|c| run(&c)) {
            Ok(o) => done.push((v, o)),
            Err(e) => {
                log::error!("{label}: {e}");
                failures.push((label, e));
            }
        }
    }

    let mut csv = format!("{param},{SERIES_HEADER}\n");
    for (v, o) in &done {
        for r in o.series.records() {
            csv.push_str(&format!("{v:.16e},{}\n", csv_row(r)));
        }
    }
    let csv_path = root.join("sweep.csv");
    fs::write(&csv_path, csv).map_err(|e| CliError::io(&csv_path, e))?;

    let column = plotted_column(base.kind);
    let data: Vec<(Vec<f64>, Vec<f64>)> = done
        .iter()
        .map(|(_, o)| {
            let rs = o.series.records();
            let y = rs
                .iter()
                .map(|r| if column == "transmission" { r.transmission } else { r.negativity.abs() })
                .collect();
            (rs.iter().map(|r| r.t).collect(), y)
        })
        .collect();
    let lines: Vec<Series<'_>> = data.iter().map(|(t, y)| Series { t, y }).collect();
    let png = root.join(format!("sweep_{column}.png"));
    overlay(&lines).save(&png).map_err(|e| CliError::io(&png, std::io::Error::other(e)))?;

    if !failures.is_empty() {
        return Err(CliError::Sweep { total: values.len(), failures });
    }
    let (values, runs) = done.into_iter().unzip();
    Ok(SweepOutcome { values, runs })
}
