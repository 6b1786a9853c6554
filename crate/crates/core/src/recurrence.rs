//! Finite-horizon proxies for recurrence, absorption and escape.
//!
//! "Visits `U` infinitely often with probability one" is replaced by "at
//! least `r` visits to the open ball `U` at steps in `(B, N]`" and estimated
//! over `M` seeded trajectories.

use serde::Serialize;
use thiserror::Error;

use crate::maps::{Interval, MapSequence};
use crate::stats::{Proportion, Summary};
use crate::stochproc::{fold_batch, Executor, ProcessConfig, ProcessError, Trajectory};

#[derive(Debug, Error)]
pub enum RecurrenceError {
    #[error("ball radius must be positive, got {0}")]
    BadRadius(f64),
    #[error("min_visits must be at least 1")]
    ZeroVisits,
    #[error("burn-in {burn_in} must be below the horizon {horizon}")]
    BadBurnIn { burn_in: usize, horizon: usize },
    #[error("noise level must be finite and non-negative, got {0}")]
    BadDeltaPrime(f64),
    #[error("no noise levels given")]
    NoDeltas,
    #[error("within_steps must be at least 1")]
    ZeroWithin,
    #[error(transparent)]
    Process(#[from] ProcessError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecurrenceQuery {
    pub center: f64,
    pub radius: f64,
    /// Defaults to `horizon / 10`.
    pub burn_in: Option<usize>,
    pub min_visits: usize,
    pub horizon: usize,
    pub deltas: Vec<f64>,
    pub trials: usize,
}

impl RecurrenceQuery {
    /// `δ′ ∈ δ·{0.25, 0.5, 0.9}`, `r = 10`, `B = N/10`, `M = 10⁴`.
    pub fn with_defaults(center: f64, radius: f64, delta: f64, horizon: usize) -> Self {
        Self {
            center,
            radius,
            burn_in: None,
            min_visits: 10,
            horizon,
            deltas: vec![0.25 * delta, 0.5 * delta, 0.9 * delta],
            trials: 10_000,
        }
    }

    pub fn burn_in(&self) -> usize {
        self.burn_in.unwrap_or(self.horizon / 10)
    }

    pub fn validate(&self) -> Result<(), RecurrenceError> {
        if !(self.radius > 0.0) {
            return Err(RecurrenceError::BadRadius(self.radius));
        }
        if self.min_visits == 0 {
            return Err(RecurrenceError::ZeroVisits);
        }
        if self.burn_in() >= self.horizon {
            return Err(RecurrenceError::BadBurnIn {
                burn_in: self.burn_in(),
                horizon: self.horizon,
            });
        }
        if self.deltas.is_empty() {
            return Err(RecurrenceError::NoDeltas);
        }
        if let Some(&d) = self.deltas.iter().find(|d| !d.is_finite() || **d < 0.0) {
            return Err(RecurrenceError::BadDeltaPrime(d));
        }
        if self.trials == 0 {
            return Err(ProcessError::NoTrials.into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct TrialVisits {
    visits: usize,
    first_hit: Option<usize>,
    gaps: Summary,
}

fn count_visits(states: &[f64], center: f64, radius: f64, burn_in: usize) -> TrialVisits {
    let mut out = TrialVisits::default();
    let mut last = None;
    for (n, &x) in states.iter().enumerate().skip(burn_in + 1) {
        if (x - center).abs() < radius {
            out.visits += 1;
            if let Some(prev) = last {
                out.gaps.push((n - prev) as f64);
            } else {
                out.first_hit = Some(n);
            }
            last = Some(n);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecurrenceEntry {
    pub delta_prime: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub trials: usize,
    pub r: usize,
    pub burn_in: usize,
    pub horizon: usize,
    pub seed: u64,
    /// Trajectory counts by visit number, in bins of `bin_width`.
    pub histogram: Vec<u64>,
    pub bin_width: usize,
    /// Absolute step of the first visit after burn-in, over trajectories
    /// that visit at all.
    pub first_hit: Summary,
    /// Steps between consecutive visits, pooled over trajectories.
    pub return_gap: Summary,
    #[serde(skip)]
    pub visit_counts: Vec<usize>,
}

impl RecurrenceEntry {
    /// The estimate re-evaluated with a different visit threshold on the
    /// same trajectories.
    pub fn estimate_for_min_visits(&self, r: usize) -> f64 {
        let hits = self.visit_counts.iter().filter(|&&v| v >= r).count();
        hits as f64 / self.visit_counts.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecurrenceReport {
    pub center: f64,
    pub radius: f64,
    pub tail_index: usize,
    pub entries: Vec<RecurrenceEntry>,
}

const HISTOGRAM_BINS: usize = 20;

/// For each `δ′`, the fraction of `(f_{k,∞}, δ′)`-processes from `x0` with
/// at least `r` visits to `B(center, radius)` after burn-in.
pub fn estimate_recurrence(
    seq: &MapSequence,
    tail_index: usize,
    x0: f64,
    query: &RecurrenceQuery,
    seed: u64,
    exec: &Executor,
) -> Result<RecurrenceReport, RecurrenceError> {
    query.validate()?;
    let burn_in = query.burn_in();
    let span = query.horizon - burn_in;
    let bin_width = span.div_ceil(HISTOGRAM_BINS).max(1);
    let mut entries = Vec::with_capacity(query.deltas.len());
    for &dp in &query.deltas {
        let cfg = ProcessConfig {
            seq: seq.clone(),
            tail_index,
            x0,
            delta: dp,
            horizon: query.horizon,
            master_seed: seed,
        };
        let per_trial = fold_batch(&cfg, query.trials, exec, |t| {
            count_visits(&t.states, query.center, query.radius, burn_in)
        })?;
        let hits = per_trial.iter().filter(|v| v.visits >= query.min_visits).count();
        let p = Proportion::from_counts(hits as u64, query.trials as u64);
        let mut histogram = vec![0u64; span / bin_width + 1];
        let mut first_hit = Summary::default();
        let mut return_gap = Summary::default();
        for v in &per_trial {
            histogram[v.visits / bin_width] += 1;
            if let Some(n) = v.first_hit {
                first_hit.push(n as f64);
            }
            return_gap = return_gap.merge(v.gaps);
        }
        entries.push(RecurrenceEntry {
            delta_prime: dp,
            estimate: p.estimate,
            stderr: p.stderr,
            trials: query.trials,
            r: query.min_visits,
            burn_in,
            horizon: query.horizon,
            seed,
            histogram,
            bin_width,
            first_hit,
            return_gap,
            visit_counts: per_trial.iter().map(|v| v.visits).collect(),
        });
    }
    Ok(RecurrenceReport {
        center: query.center,
        radius: query.radius,
        tail_index,
        entries,
    })
}

/// Entry and exit of one path with respect to a closed region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TrapStatus {
    pub trial: usize,
    pub first_entry: Option<usize>,
    /// First step after entry at which the path is outside the region.
    pub first_exit: Option<usize>,
}

impl TrapStatus {
    pub fn of(trial: usize, states: &[f64], region: Interval) -> Self {
        let first_entry = states.iter().position(|&x| region.contains(x));
        let first_exit = first_entry.and_then(|m| {
            states[m..]
                .iter()
                .position(|&x| !region.contains(x))
                .map(|j| m + j)
        });
        Self {
            trial,
            first_entry,
            first_exit,
        }
    }

    pub fn stayed(&self) -> bool {
        self.first_exit.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrapReport {
    pub region: Interval,
    pub trajectories: usize,
    pub entered: usize,
    pub exited: usize,
    /// No trajectory leaves the region after entering it.
    pub trapped: bool,
    pub per_trajectory: Vec<TrapStatus>,
}

impl TrapReport {
    pub fn from_statuses(region: Interval, per_trajectory: Vec<TrapStatus>) -> Self {
        let entered = per_trajectory.iter().filter(|s| s.first_entry.is_some()).count();
        let exited = per_trajectory.iter().filter(|s| s.first_exit.is_some()).count();
        Self {
            region,
            trajectories: per_trajectory.len(),
            entered,
            exited,
            trapped: exited == 0,
            per_trajectory,
        }
    }
}

/// Whether every trajectory that enters `region` stays in it.
pub fn detect_trap(trajectories: &[Trajectory], region: Interval) -> TrapReport {
    TrapReport::from_statuses(
        region,
        trajectories
            .iter()
            .map(|t| TrapStatus::of(t.trial, &t.states, region))
            .collect(),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EscapeReport {
    pub region: Interval,
    pub within_steps: usize,
    /// Fraction of trajectories in the region at some step `≤ within_steps`.
    pub probability: Proportion,
    /// Entry and exit over the full simulated horizon.
    pub trap: TrapReport,
}

/// Escape (entry) probability into `region` within `within_steps` steps,
/// with a trap check over `max(cfg.horizon, within_steps)` steps.
/// Per-trajectory trap statuses are kept; states are not.
pub fn escape_probability(
    cfg: &ProcessConfig,
    region: Interval,
    within_steps: usize,
    trials: usize,
    exec: &Executor,
) -> Result<EscapeReport, RecurrenceError> {
    if within_steps == 0 {
        return Err(RecurrenceError::ZeroWithin);
    }
    let cfg = ProcessConfig {
        horizon: cfg.horizon.max(within_steps),
        ..cfg.clone()
    };
    let statuses = fold_batch(&cfg, trials, exec, |t| TrapStatus::of(t.trial, &t.states, region))?;
    let hits = statuses
        .iter()
        .filter(|s| s.first_entry.is_some_and(|m| m <= within_steps))
        .count();
    Ok(EscapeReport {
        region,
        within_steps,
        probability: Proportion::from_counts(hits as u64, trials as u64),
        trap: TrapReport::from_statuses(region, statuses),
    })
}
