//! TOML experiment configs, their execution, and the JSON/CSV/SVG outputs.
//!
//! ```toml
//! [sequence]
//! gallery = "example1"          # or: map = { breakpoints = [...], values = [...] }
//!
//! [process]
//! x0 = 0.0
//! delta = 0.19
//! horizon = 200
//! trials = 100000
//! seed = 1
//!
//! [analysis]
//! kind = "trap"
//! region = [0.8, 1.19]
//! within_steps = 10
//!
//! [output]
//! json = "example1-escape.json"
//! ```
//!
//! Unknown keys are rejected. Parse errors carry the TOML line and column;
//! range errors are anchored to the line of the offending key.

pub mod json;
mod run;

pub use run::{run_experiment, Outcome, RunFailure};

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gallery::{self, BuildParams, EntryKind, GalleryItem};
use crate::maps::{MapSequence, PiecewiseLinearMap};

pub const VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Error, PartialEq)]
#[error("{}{message}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub sequence: SequenceSpec,
    #[serde(default)]
    pub process: ProcessSpec,
    pub analysis: AnalysisSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

/// A gallery entry or an inline map. Setting `amplitude` on a map turns it
/// into the sequence `f_n = clamp(f + amplitude · rate^n)`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gallery: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub map: Option<PiecewiseLinearMap>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProcessSpec {
    pub tail_index: usize,
    pub x0: f64,
    pub delta: f64,
    pub horizon: usize,
    pub trials: usize,
    pub seed: u64,
}

impl Default for ProcessSpec {
    fn default() -> Self {
        Self {
            tail_index: 0,
            x0: 0.0,
            delta: 0.0,
            horizon: 1000,
            trials: 1000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub json: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub svg: Option<String>,
}

fn default_min_visits() -> usize {
    10
}
fn default_scan_tol() -> f64 {
    1e-10
}
fn default_resolution() -> usize {
    1 << 14
}
fn default_orbit_length() -> usize {
    1_000_000
}
fn default_hull_tol() -> f64 {
    1e-3
}
fn default_start() -> f64 {
    0.3
}
fn default_max_period() -> usize {
    1
}
fn default_pairs() -> usize {
    1000
}
fn default_ly_horizon() -> usize {
    10_000
}
fn default_liminf() -> f64 {
    1e-3
}
fn default_limsup() -> f64 {
    1e-1
}
fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum AnalysisSpec {
    /// Trajectories only; pair with `output.csv`.
    Simulate {},
    Recurrence {
        center: f64,
        radius: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        burn_in: Option<usize>,
        #[serde(default = "default_min_visits")]
        min_visits: usize,
        /// Defaults to `process.delta · {0.25, 0.5, 0.9}`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        deltas: Option<Vec<f64>>,
    },
    Trap {
        region: [f64; 2],
        within_steps: usize,
    },
    Chain {
        delta_prime: f64,
        start: f64,
        target_center: f64,
        target_radius: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        spacing: Option<f64>,
    },
    Periodic {
        period: usize,
        #[serde(default = "default_scan_tol")]
        tol: f64,
        #[serde(default = "default_resolution")]
        resolution: usize,
    },
    Decompose {
        level: u32,
        #[serde(default = "default_orbit_length")]
        orbit_length: usize,
        #[serde(default = "default_hull_tol")]
        tol: f64,
        #[serde(default = "default_start")]
        start: f64,
        #[serde(default)]
        lattice: bool,
    },
    Shadow {
        eps: f64,
        window: [usize; 2],
        #[serde(default = "default_max_period")]
        max_period: usize,
    },
    Liyorke {
        #[serde(default = "default_pairs")]
        pairs: usize,
        #[serde(default = "default_ly_horizon")]
        horizon: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pair_seed: Option<u64>,
        #[serde(default = "default_liminf")]
        liminf: f64,
        #[serde(default = "default_limsup")]
        limsup: f64,
        #[serde(default = "yes")]
        lattice: bool,
    },
}

impl AnalysisSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            AnalysisSpec::Simulate {} => "simulate",
            AnalysisSpec::Recurrence { .. } => "recurrence",
            AnalysisSpec::Trap { .. } => "trap",
            AnalysisSpec::Chain { .. } => "chain",
            AnalysisSpec::Periodic { .. } => "periodic",
            AnalysisSpec::Decompose { .. } => "decompose",
            AnalysisSpec::Shadow { .. } => "shadow",
            AnalysisSpec::Liyorke { .. } => "liyorke",
        }
    }
}

/// Line (1-based) of `key = …` inside `[section]`, or of the section header.
fn locate(source: &str, section: &str, key: Option<&str>) -> Option<usize> {
    let mut in_section = false;
    let mut header = None;
    for (i, raw) in source.lines().enumerate() {
        let line = raw.trim();
        if line.starts_with('[') {
            in_section = line.trim_start_matches('[').trim_end_matches(']').trim() == section;
            if in_section {
                header = Some(i + 1);
            }
            continue;
        }
        if in_section {
            if let Some(k) = key {
                let lhs = line.split('=').next().unwrap_or("").trim();
                if line.contains('=') && lhs == k {
                    return Some(i + 1);
                }
            }
        }
    }
    header
}

/// toml reports an unknown field against the whole table; point at the key.
fn unknown_key_line(source: &str, span: std::ops::Range<usize>, message: &str) -> Option<usize> {
    let key = message.strip_prefix("unknown field `")?.split('`').next()?;
    let first = line_col(source, span.start);
    let text = source.get(span)?;
    text.lines()
        .position(|l| l.split('=').next().is_some_and(|lhs| lhs.trim() == key) && l.contains('='))
        .map(|i| first + i)
}

fn line_col(source: &str, offset: usize) -> usize {
    source[..offset.min(source.len())].matches('\n').count() + 1
}

impl ExperimentConfig {
    pub fn from_toml_str(source: &str) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig = toml::from_str(source).map_err(|e| ConfigError {
            line: e.span().map(|s| unknown_key_line(source, s.clone(), e.message()).unwrap_or(line_col(source, s.start))),
            message: e.message().trim().to_string(),
        })?;
        cfg.validate().map_err(|(section, key, message)| ConfigError {
            line: locate(source, section, key),
            message: match key {
                Some(k) => format!("[{section}] {k}: {message}"),
                None => format!("[{section}]: {message}"),
            },
        })?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let src = std::fs::read_to_string(path).map_err(|e| ConfigError {
            line: None,
            message: format!("{}: {e}", path.display()),
        })?;
        Self::from_toml_str(&src).map_err(|e| ConfigError {
            message: format!("{}: {}", path.display(), e.message),
            ..e
        })
    }

    /// Range checks; the error names the section and key to anchor.
    pub fn validate(&self) -> Result<(), (&'static str, Option<&'static str>, String)> {
        let s = &self.sequence;
        let seq_err = |key, msg: String| Err(("sequence", key, msg));
        match (&s.gallery, &s.map) {
            (Some(_), Some(_)) => return seq_err(Some("map"), "give either gallery or map, not both".into()),
            (None, None) => return seq_err(None, "missing gallery or map".into()),
            (Some(name), None) => {
                let Some(entry) = gallery::entries().iter().find(|e| e.name == name) else {
                    let names: Vec<&str> = gallery::entries().iter().map(|e| e.name).collect();
                    return seq_err(Some("gallery"), format!("unknown gallery entry {name:?}; expected one of {}", names.join(", ")));
                };
                for (key, set) in [("lambda", s.lambda.is_some()), ("depth", s.depth.is_some())] {
                    if set && !entry.params.contains(&key) {
                        return seq_err(Some(key), format!("not a parameter of {name}"));
                    }
                }
                if entry.kind == EntryKind::Sequence && entry.name != "contraction-decay" && (s.amplitude.is_some() || s.rate.is_some()) {
                    return seq_err(Some("amplitude"), format!("{name} is already a sequence"));
                }
            }
            (None, Some(_)) => {
                for (key, set) in [("lambda", s.lambda.is_some()), ("depth", s.depth.is_some())] {
                    if set {
                        return seq_err(Some(key), "only applies to gallery entries".into());
                    }
                }
            }
        }
        if let Some(l) = s.lambda {
            if !(l > 0.5 && l < 1.0) {
                return seq_err(Some("lambda"), format!("must lie in (1/2, 1), got {l}"));
            }
        }
        if let Some(a) = s.amplitude {
            if !a.is_finite() {
                return seq_err(Some("amplitude"), format!("must be finite, got {a}"));
            }
        }
        if s.rate.is_some() && s.amplitude.is_none() {
            return seq_err(Some("rate"), "requires amplitude".into());
        }
        if let Some(r) = s.rate {
            if !(0.0..1.0).contains(&r) {
                return seq_err(Some("rate"), format!("must lie in [0, 1), got {r}"));
            }
        }

        let p = &self.process;
        let perr = |key, msg: String| Err(("process", Some(key), msg));
        if !(0.0..=1.0).contains(&p.x0) {
            return perr("x0", format!("must lie in [0, 1], got {}", p.x0));
        }
        if !(p.delta >= 0.0 && p.delta.is_finite()) {
            return perr("delta", format!("must be finite and non-negative, got {}", p.delta));
        }
        if p.horizon == 0 {
            return perr("horizon", "must be at least 1".into());
        }
        if p.trials == 0 {
            return perr("trials", "must be at least 1".into());
        }

        let aerr = |key, msg: String| Err(("analysis", Some(key), msg));
        match &self.analysis {
            AnalysisSpec::Simulate {} => {}
            AnalysisSpec::Recurrence { center, radius, burn_in, min_visits, deltas } => {
                if !(0.0..=1.0).contains(center) {
                    return aerr("center", format!("must lie in [0, 1], got {center}"));
                }
                if !(*radius > 0.0) {
                    return aerr("radius", format!("must be positive, got {radius}"));
                }
                if *min_visits == 0 {
                    return aerr("min_visits", "must be at least 1".into());
                }
                if burn_in.is_some_and(|b| b >= p.horizon) {
                    return aerr("burn_in", format!("must be below the horizon {}", p.horizon));
                }
                if let Some(ds) = deltas {
                    if ds.is_empty() {
                        return aerr("deltas", "must not be empty".into());
                    }
                    if let Some(d) = ds.iter().find(|d| !(**d >= 0.0 && d.is_finite())) {
                        return aerr("deltas", format!("must be finite and non-negative, got {d}"));
                    }
                }
            }
            AnalysisSpec::Trap { region, within_steps } => {
                if !(region[0] <= region[1]) {
                    return aerr("region", format!("lower end {} exceeds upper end {}", region[0], region[1]));
                }
                if *within_steps == 0 {
                    return aerr("within_steps", "must be at least 1".into());
                }
            }
            AnalysisSpec::Chain { delta_prime, start, target_radius, spacing, .. } => {
                if !(*delta_prime > 0.0) {
                    return aerr("delta_prime", format!("must be positive, got {delta_prime}"));
                }
                if !(0.0..=1.0).contains(start) {
                    return aerr("start", format!("must lie in [0, 1], got {start}"));
                }
                if !(*target_radius > 0.0) {
                    return aerr("target_radius", format!("must be positive, got {target_radius}"));
                }
                if let Some(h) = spacing {
                    if !(*h > 0.0 && *h < delta_prime / 2.0) {
                        return aerr("spacing", format!("must lie in (0, delta_prime/2), got {h}"));
                    }
                }
            }
            AnalysisSpec::Periodic { period, tol, resolution } => {
                if *period == 0 {
                    return aerr("period", "must be at least 1".into());
                }
                if !(*tol > 0.0) {
                    return aerr("tol", format!("must be positive, got {tol}"));
                }
                if *resolution < 2 {
                    return aerr("resolution", "must be at least 2".into());
                }
            }
            AnalysisSpec::Decompose { level, orbit_length, tol, start, .. } => {
                if *level > 20 {
                    return aerr("level", format!("must be at most 20, got {level}"));
                }
                if *orbit_length < 2 {
                    return aerr("orbit_length", "must be at least 2".into());
                }
                if !(*tol > 0.0) {
                    return aerr("tol", format!("must be positive, got {tol}"));
                }
                if !(0.0..=1.0).contains(start) {
                    return aerr("start", format!("must lie in [0, 1], got {start}"));
                }
            }
            AnalysisSpec::Shadow { eps, window, max_period } => {
                if !(*eps > 0.0) {
                    return aerr("eps", format!("must be positive, got {eps}"));
                }
                if window[0] > window[1] || window[1] > p.horizon {
                    return aerr("window", format!("must satisfy start <= end <= horizon ({})", p.horizon));
                }
                if *max_period == 0 {
                    return aerr("max_period", "must be at least 1".into());
                }
            }
            AnalysisSpec::Liyorke { pairs, horizon, liminf, limsup, .. } => {
                if *pairs == 0 {
                    return aerr("pairs", "must be at least 1".into());
                }
                if *horizon < 100 {
                    return aerr("horizon", "must be at least 100".into());
                }
                if !(*liminf > 0.0 && liminf < limsup) {
                    return aerr("liminf", format!("need 0 < liminf < limsup, got {liminf}, {limsup}"));
                }
            }
        }
        Ok(())
    }

    /// Fill every defaulted value so the embedded config is complete.
    pub fn resolved(&self) -> Self {
        let mut c = self.clone();
        let (horizon, delta, seed) = (c.process.horizon, c.process.delta, c.process.seed);
        match &mut c.analysis {
            AnalysisSpec::Recurrence { burn_in, deltas, .. } => {
                burn_in.get_or_insert(horizon / 10);
                deltas.get_or_insert_with(|| vec![0.25 * delta, 0.5 * delta, 0.9 * delta]);
            }
            AnalysisSpec::Chain { delta_prime, spacing, .. } => {
                spacing.get_or_insert(*delta_prime / 8.0);
            }
            AnalysisSpec::Liyorke { pair_seed, .. } => {
                pair_seed.get_or_insert(seed);
            }
            _ => {}
        }
        if c.sequence.amplitude.is_some() {
            c.sequence.rate.get_or_insert(0.5);
        }
        if c.sequence.gallery.as_deref().is_some_and(|g| g == "example2") {
            c.sequence.depth.get_or_insert(3);
        }
        if c.sequence.gallery.as_deref().is_some_and(|g| g == "example2" || g == "truncated-tent") {
            c.sequence.lambda.get_or_insert(gallery::LAMBDA);
        }
        c
    }

    pub fn build_sequence(&self) -> Result<MapSequence, gallery::GalleryError> {
        let s = &self.sequence;
        let item = match (&s.gallery, &s.map) {
            (Some(name), _) => gallery::build(
                name,
                &BuildParams {
                    lambda: s.lambda,
                    depth: s.depth,
                    amplitude: s.amplitude,
                    rate: s.rate,
                },
            )?,
            (None, Some(f)) => GalleryItem::Map(f.clone()),
            (None, None) => unreachable!("validated"),
        };
        Ok(match (item, s.amplitude) {
            (GalleryItem::Map(f), Some(a)) => MapSequence::additive_decay(f, a, s.rate.unwrap_or(0.5)),
            (item, _) => item.into_sequence(),
        })
    }
}
