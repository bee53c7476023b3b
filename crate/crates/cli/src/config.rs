//! Scenario configuration: a plain-text `key = value` file with optional
//! `[section]` headers and `#` comments.
//!
//! Every key belongs to one section. It may be written inside that section
//! or before the first header. Unknown keys and sections, duplicates and
//! malformed values are reported with their line numbers; constraint
//! violations are collected and reported together.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use dwps_core::phase_grid::make_grid;
use dwps_core::potential::{Potential, Profile};
use dwps_core::propagator::{MassSplit, PropagatorConfig, Splitting, CAUSALITY_SAFETY};
use dwps_core::states::WavepacketSpec;

use crate::snapshot::PayloadKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScenarioKind {
    MajoranaFree,
    MajoranaMass,
    CatFree,
    KleinStep,
    KleinBarrier,
    Custom,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 6] = [
        ScenarioKind::MajoranaFree,
        ScenarioKind::MajoranaMass,
        ScenarioKind::CatFree,
        ScenarioKind::KleinStep,
        ScenarioKind::KleinBarrier,
        ScenarioKind::Custom,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioKind::MajoranaFree => "MAJORANA_FREE",
            ScenarioKind::MajoranaMass => "MAJORANA_MASS",
            ScenarioKind::CatFree => "CAT_FREE",
            ScenarioKind::KleinStep => "KLEIN_STEP",
            ScenarioKind::KleinBarrier => "KLEIN_BARRIER",
            ScenarioKind::Custom => "CUSTOM",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown kind `{s}` (expected one of {})", names(&Self::ALL.map(Self::as_str))))
    }
}

/// How the initial spinor is built from the packet parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitialState {
    Gaussian,
    Majorana,
    Cat,
}

impl FromStr for InitialState {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_uppercase().as_str() {
            "GAUSSIAN" => Ok(InitialState::Gaussian),
            "MAJORANA" => Ok(InitialState::Majorana),
            "CAT" => Ok(InitialState::Cat),
            _ => Err(format!("unknown state `{s}` (expected GAUSSIAN, MAJORANA or CAT)")),
        }
    }
}

/// Shape of the scalar potential `A⁰(x)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    None,
    Step,
    Barrier,
}

impl FromStr for Shape {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_uppercase().as_str() {
            "NONE" => Ok(Shape::None),
            "STEP" => Ok(Shape::Step),
            "BARRIER" => Ok(Shape::Barrier),
            _ => Err(format!("unknown shape `{s}` (expected NONE, STEP or BARRIER)")),
        }
    }
}

fn parse_splitting(s: &str) -> Result<Splitting, String> {
    match s.to_ascii_uppercase().as_str() {
        "FIRST_ORDER" => Ok(Splitting::FirstOrder),
        "STRANG" => Ok(Splitting::Strang),
        _ => Err(format!("unknown splitting `{s}` (expected FIRST_ORDER or STRANG)")),
    }
}

fn parse_mass_split(s: &str) -> Result<MassSplit, String> {
    match s.to_ascii_uppercase().as_str() {
        "HALF" => Ok(MassSplit::Half),
        "KINETIC" => Ok(MassSplit::Kinetic),
        _ => Err(format!("unknown mass_split `{s}` (expected HALF or KINETIC)")),
    }
}

fn parse_payload(s: &str) -> Result<PayloadKind, String> {
    match s.to_ascii_uppercase().as_str() {
        "W0_REAL" => Ok(PayloadKind::W0Real),
        "FULL_MATRIX" => Ok(PayloadKind::FullMatrix),
        _ => Err(format!("unknown snapshot_payload `{s}` (expected W0_REAL or FULL_MATRIX)")),
    }
}

fn parse_bool(s: &str) -> Result<bool, String> {
    match s.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(format!("expected a boolean, got `{s}`")),
    }
}

fn parse_num<T: FromStr>(s: &str) -> Result<T, String> {
    s.parse().map_err(|_| format!("expected a number, got `{s}`"))
}

fn names(list: &[&str]) -> String {
    list.join(", ")
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridConfig {
    pub n_x: usize,
    pub n_p: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub p_min: f64,
    pub p_max: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { n_x: 512, n_p: 512, x_min: -20.0, x_max: 20.0, p_min: -20.0, p_max: 20.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PotentialConfig {
    pub shape: Shape,
    /// Peak value of `A⁰`.
    pub height: f64,
    /// Step position.
    pub center: f64,
    /// Barrier half width.
    pub half_width: f64,
    pub steepness: f64,
    /// `m(x) = m + mass_curvature x²`
    pub mass_curvature: f64,
    /// Transmission counts the weight with `x` beyond this point.
    pub threshold: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub kind: ScenarioKind,
    pub state: InitialState,
    pub grid: GridConfig,
    pub packet: WavepacketSpec<f64>,
    pub potential: PotentialConfig,
    pub dephasing: f64,
    pub dt: f64,
    pub t_end: f64,
    pub splitting: Splitting,
    pub mass_split: MassSplit,
    pub causality_check: bool,
    /// Steps between rows of `series.csv`.
    pub observe_every: usize,
    /// Steps between snapshots and heatmaps; zero disables them.
    pub snapshot_every: usize,
    pub snapshot_payload: PayloadKind,
    pub heatmaps: bool,
    pub output_dir: PathBuf,
}

impl ScenarioConfig {
    /// Defaults of a built-in kind.
    pub fn for_kind(kind: ScenarioKind) -> Self {
        let mut c = Self {
            name: kind.as_str().to_ascii_lowercase(),
            kind,
            state: InitialState::Gaussian,
            grid: GridConfig::default(),
            packet: WavepacketSpec::default(),
            potential: PotentialConfig {
                shape: Shape::None,
                height: 0.0,
                center: 0.0,
                half_width: 0.0,
                steepness: 4.0,
                mass_curvature: 0.0,
                threshold: 0.0,
            },
            dephasing: 0.0,
            dt: 0.01,
            t_end: 12.0,
            splitting: Splitting::FirstOrder,
            mass_split: MassSplit::Half,
            causality_check: true,
            observe_every: 10,
            snapshot_every: 100,
            snapshot_payload: PayloadKind::W0Real,
            heatmaps: true,
            output_dir: PathBuf::new(),
        };
        match kind {
            ScenarioKind::MajoranaFree => c.state = InitialState::Majorana,
            ScenarioKind::MajoranaMass => {
                c.state = InitialState::Majorana;
                c.potential.mass_curvature = 0.05;
            }
            ScenarioKind::CatFree => c.state = InitialState::Cat,
            ScenarioKind::KleinStep => {
                c.packet.x0 = -5.0;
                c.potential.shape = Shape::Step;
                c.potential.height = 10.0;
                c.potential.center = 5.0;
                c.potential.threshold = 5.0;
            }
            ScenarioKind::KleinBarrier => {
                c.packet.x0 = -10.0;
                c.potential.shape = Shape::Barrier;
                c.potential.height = 10.0;
                c.potential.half_width = 4.0;
                c.potential.threshold = 4.0;
                c.t_end = 24.0;
                c.grid = GridConfig { n_x: 512, n_p: 256, x_min: -32.0, x_max: 32.0, ..GridConfig::default() };
            }
            ScenarioKind::Custom => {}
        }
        c.output_dir = PathBuf::from("out").join(&c.name);
        c
    }

    pub fn potential(&self) -> Potential<f64> {
        let m = self.packet.mass;
        let pc = &self.potential;
        let mut pot = Potential::free(m);
        pot.a0 = match pc.shape {
            Shape::None => Profile::Zero,
            Shape::Step => Profile::TanhStep { height: pc.height, center: pc.center, steepness: pc.steepness },
            Shape::Barrier => Profile::TanhBarrier {
                height: pc.height,
                half_width: pc.half_width,
                steepness: pc.steepness,
            },
        };
        if pc.mass_curvature != 0.0 {
            pot.mass = Profile::Quadratic { base: m, curvature: pc.mass_curvature };
        }
        pot
    }

    pub fn propagator_config(&self) -> PropagatorConfig<f64> {
        PropagatorConfig {
            dt: self.dt,
            dephasing: self.dephasing,
            splitting: self.splitting,
            causality_check: self.causality_check,
            mass_split: self.mass_split,
        }
    }

    /// Every violated constraint, in a fixed order.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            v.push(format!("name `{}` must be non-empty and contain no path separators", self.name));
        }
        let g = &self.grid;
        if let Err(e) = make_grid(g.n_x, g.n_p, g.x_min, g.x_max, g.p_min, g.p_max) {
            v.push(e.to_string());
        }
        if let Err(e) = self.packet.validate() {
            v.push(e.to_string());
        }
        if !(self.packet.x0 > g.x_min && self.packet.x0 < g.x_max) {
            v.push(format!("x0 = {} lies outside the x range [{}, {}]", self.packet.x0, g.x_min, g.x_max));
        }
        if !(self.packet.p_tilde.abs() < g.p_max.abs().min(g.p_min.abs())) {
            v.push(format!("p_tilde = {} lies outside the p range [{}, {}]", self.packet.p_tilde, g.p_min, g.p_max));
        }
        let pc = &self.potential;
        for (key, value) in [
            ("height", pc.height),
            ("center", pc.center),
            ("half_width", pc.half_width),
            ("steepness", pc.steepness),
            ("mass_curvature", pc.mass_curvature),
        ] {
            if !value.is_finite() {
                v.push(format!("{key} = {value} must be finite"));
            }
        }
        if pc.shape == Shape::Barrier && !(pc.half_width > 0.0) {
            v.push(format!("half_width = {} must be positive", pc.half_width));
        }
        if pc.shape != Shape::None && !(pc.steepness > 0.0) {
            v.push(format!("steepness = {} must be positive", pc.steepness));
        }
        if pc.mass_curvature < 0.0 {
            v.push(format!("mass_curvature = {} must be non-negative", pc.mass_curvature));
        }
        if !(pc.threshold >= g.x_min && pc.threshold <= g.x_max) {
            v.push(format!("threshold = {} lies outside the x range [{}, {}]", pc.threshold, g.x_min, g.x_max));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            v.push(format!("dt = {} must be positive", self.dt));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            v.push(format!("t_end = {} must be positive", self.t_end));
        }
        if !(self.dephasing.is_finite() && self.dephasing >= 0.0) {
            v.push(format!("D = {} must be non-negative", self.dephasing));
        } else if self.causality_check && self.packet.mass > 0.0 {
            let bound = CAUSALITY_SAFETY / (4.0 * self.packet.mass);
            if self.dephasing >= bound {
                v.push(format!(
                    "D = {} violates the causality bound D < {CAUSALITY_SAFETY}/(4m) = {bound} (set causality_check = false to override)",
                    self.dephasing
                ));
            }
        }
        if self.observe_every == 0 {
            v.push("observe_every must be at least 1".into());
        }
        v
    }
}

/// One problem found in a config file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Issue {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError {
    pub source_name: String,
    pub issues: Vec<Issue>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid config {}:", self.source_name)?;
        for i in &self.issues {
            write!(f, "\n  {i}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

const SECTIONS: [(&str, &[&str]); 6] = [
    ("", &["name", "kind"]),
    ("grid", &["n_x", "n_p", "x_min", "x_max", "p_min", "p_max"]),
    ("packet", &["state", "p_tilde", "mass", "x0", "width"]),
    ("potential", &["shape", "height", "center", "half_width", "steepness", "mass_curvature", "threshold"]),
    ("evolution", &["dt", "t_end", "D", "splitting", "mass_split", "causality_check"]),
    ("output", &["dir", "observe_every", "snapshot_every", "snapshot_payload", "heatmaps"]),
];

/// Keys that only a CUSTOM scenario may set.
const CUSTOM_ONLY: [&str; 6] = ["state", "shape", "center", "half_width", "steepness", "mass_curvature"];

fn canonical(key: &str) -> &str {
    match key {
        "m" => "mass",
        "dephasing" => "D",
        _ => key,
    }
}

fn section_of(key: &str) -> Option<&'static str> {
    SECTIONS.iter().find(|(_, keys)| keys.contains(&key)).map(|(s, _)| *s)
}

#[derive(Clone, Debug)]
struct Entry {
    value: String,
    line: usize,
}

fn tokenize(text: &str) -> Result<BTreeMap<&'static str, Entry>, Vec<Issue>> {
    let mut entries: BTreeMap<&'static str, Entry> = BTreeMap::new();
    let mut issues = Vec::new();
    let mut section: Option<&str> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let mut err = |message: String| issues.push(Issue { line: Some(line), message });
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            match rest.strip_suffix(']').map(str::trim) {
                Some(name) if SECTIONS.iter().any(|(s, _)| !s.is_empty() && *s == name) => {
                    section = SECTIONS.iter().map(|(s, _)| *s).find(|s| *s == name);
                }
                Some(name) => err(format!("unknown section [{name}]")),
                None => err(format!("malformed section header `{content}`")),
            }
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            err(format!("expected `key = value`, got `{content}`"));
            continue;
        };
        let (key, value) = (canonical(key.trim()), value.trim());
        if value.is_empty() {
            err(format!("missing value for `{key}`"));
            continue;
        }
        let Some(home) = section_of(key) else {
            err(format!("unknown key `{key}`"));
            continue;
        };
        if let Some(s) = section {
            if s != home {
                let place = if home.is_empty() { "the top level".to_string() } else { format!("[{home}]") };
                err(format!("key `{key}` belongs in {place}, not [{s}]"));
                continue;
            }
        }
        let key: &'static str = SECTIONS
            .iter()
            .flat_map(|(_, keys)| keys.iter())
            .find(|k| **k == key)
            .expect("known key");
        if let Some(prev) = entries.get(key) {
            err(format!("duplicate key `{key}` (first set on line {})", prev.line));
            continue;
        }
        entries.insert(key, Entry { value: value.to_string(), line });
    }
    if issues.is_empty() {
        Ok(entries)
    } else {
        Err(issues)
    }
}

/// Parses config text; `source_name` only labels error messages.
pub fn parse_config_str(text: &str, source_name: &str) -> Result<ScenarioConfig, ConfigError> {
    let fail = |issues| ConfigError { source_name: source_name.to_string(), issues };
    let entries = tokenize(text).map_err(fail)?;

    let kind = match entries.get("kind") {
        None => return Err(fail(vec![Issue { line: None, message: "missing required key `kind`".into() }])),
        Some(e) => e
            .value
            .parse::<ScenarioKind>()
            .map_err(|message| fail(vec![Issue { line: Some(e.line), message }]))?,
    };
    let mut c = ScenarioConfig::for_kind(kind);
    let mut issues = Vec::new();
    let mut dir_set = false;

    for (&key, e) in &entries {
        let at = Some(e.line);
        if kind != ScenarioKind::Custom && CUSTOM_ONLY.contains(&key) {
            issues.push(Issue { line: at, message: format!("`{key}` is fixed by kind {kind}; use kind = CUSTOM") });
            continue;
        }
        if key == "height" && !matches!(kind, ScenarioKind::KleinStep | ScenarioKind::KleinBarrier | ScenarioKind::Custom) {
            issues.push(Issue { line: at, message: format!("kind {kind} has no scalar potential to set `height` on") });
            continue;
        }
        let v = e.value.as_str();
        let result: Result<(), String> = (|| {
            match key {
                "kind" => {}
                "name" => c.name = v.to_string(),
                "n_x" => c.grid.n_x = parse_num(v)?,
                "n_p" => c.grid.n_p = parse_num(v)?,
                "x_min" => c.grid.x_min = parse_num(v)?,
                "x_max" => c.grid.x_max = parse_num(v)?,
                "p_min" => c.grid.p_min = parse_num(v)?,
                "p_max" => c.grid.p_max = parse_num(v)?,
                "state" => c.state = v.parse()?,
                "p_tilde" => c.packet.p_tilde = parse_num(v)?,
                "mass" => c.packet.mass = parse_num(v)?,
                "x0" => c.packet.x0 = parse_num(v)?,
                "width" => c.packet.width = parse_num(v)?,
                "shape" => c.potential.shape = v.parse()?,
                "height" => c.potential.height = parse_num(v)?,
                "center" => c.potential.center = parse_num(v)?,
                "half_width" => c.potential.half_width = parse_num(v)?,
                "steepness" => c.potential.steepness = parse_num(v)?,
                "mass_curvature" => c.potential.mass_curvature = parse_num(v)?,
                "threshold" => c.potential.threshold = parse_num(v)?,
                "dt" => c.dt = parse_num(v)?,
                "t_end" => c.t_end = parse_num(v)?,
                "D" => c.dephasing = parse_num(v)?,
                "splitting" => c.splitting = parse_splitting(v)?,
                "mass_split" => c.mass_split = parse_mass_split(v)?,
                "causality_check" => c.causality_check = parse_bool(v)?,
                "dir" => {
                    c.output_dir = PathBuf::from(v);
                    dir_set = true;
                }
                "observe_every" => c.observe_every = parse_num(v)?,
                "snapshot_every" => c.snapshot_every = parse_num(v)?,
                "snapshot_payload" => c.snapshot_payload = parse_payload(v)?,
                "heatmaps" => c.heatmaps = parse_bool(v)?,
                other => unreachable!("key table out of sync: {other}"),
            }
            Ok(())
        })();
        if let Err(message) = result {
            issues.push(Issue { line: at, message: format!("{key}: {message}") });
        }
    }
    if !dir_set {
        c.output_dir = PathBuf::from("out").join(&c.name);
    }
    if kind == ScenarioKind::Custom && !entries.contains_key("threshold") {
        c.potential.threshold = match c.potential.shape {
            Shape::None => 0.0,
            Shape::Step => c.potential.center,
            Shape::Barrier => c.potential.half_width,
        };
    }
    if !issues.is_empty() {
        return Err(fail(issues));
    }
    validate(c, source_name)
}

/// Checks every constraint and reports all violations at once.
pub fn validate(c: ScenarioConfig, source_name: &str) -> Result<ScenarioConfig, ConfigError> {
    let issues: Vec<Issue> = c.violations().into_iter().map(|message| Issue { line: None, message }).collect();
    if issues.is_empty() {
        Ok(c)
    } else {
        Err(ConfigError { source_name: source_name.to_string(), issues })
    }
}

/// Reads and validates a config file.
pub fn parse_config(path: &Path) -> Result<ScenarioConfig, ConfigError> {
    let name = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|e| ConfigError {
        source_name: name.clone(),
        issues: vec![Issue { line: None, message: format!("cannot read file: {e}") }],
    })?;
    parse_config_str(&text, &name)
}
