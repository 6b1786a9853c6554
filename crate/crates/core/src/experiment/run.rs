use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};

use super::{json as exact, AnalysisSpec, ExperimentConfig, VERSION};
use crate::chains::{find_delta_chain, ChainSearch};
use crate::maps::{Interval, Lattice, MapSequence};
use crate::periodic::{
    decompose_levels, find_periodic_points, liyorke_scan, random_pairs, shadow_test, shadowing_candidates,
    DecomposeOptions, LiYorkeOptions, ScanOptions, DEFAULT_LATTICE,
};
use crate::plot;
use crate::recurrence::{escape_probability, estimate_recurrence, RecurrenceQuery};
use crate::stats::{Proportion, Summary};
use crate::stochproc::{fold_batch, simulate_batch, write_csv, Executor, ProcessConfig, Trajectory};

/// Everything a successful run produces.
#[derive(Debug)]
pub struct Outcome {
    pub config: ExperimentConfig,
    pub result: Value,
    pub trajectories: Option<Vec<Trajectory>>,
    pub svg: String,
}

/// An analysis that ran but failed; `diagnostics` goes into the report.
#[derive(Debug)]
pub struct RunFailure {
    pub config: ExperimentConfig,
    pub message: String,
    pub diagnostics: Value,
}

impl Outcome {
    pub fn report(&self) -> String {
        exact::to_string(&json!({
            "version": VERSION,
            "config": self.config,
            "analysis": self.config.analysis.kind(),
            "status": "ok",
            "result": self.result,
        }))
        .expect("report serializes")
    }

    pub fn csv(&self) -> Option<String> {
        let trajs = self.trajectories.as_ref()?;
        let mut buf = Vec::new();
        write_csv(&mut buf, trajs).expect("in-memory csv");
        Some(String::from_utf8(buf).expect("csv is UTF-8"))
    }
}

impl RunFailure {
    pub fn report(&self) -> String {
        exact::to_string(&json!({
            "version": VERSION,
            "config": self.config,
            "analysis": self.config.analysis.kind(),
            "status": "failed",
            "error": {
                "message": self.message,
                "diagnostics": self.diagnostics,
            },
        }))
        .expect("report serializes")
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("result serializes")
}

#[derive(Serialize)]
struct SimulateResult {
    trials: usize,
    horizon: usize,
    delta: f64,
    max_link_error: f64,
    min_state: f64,
    max_state: f64,
    final_state: Summary,
}

#[derive(Serialize)]
struct ShadowOutcome {
    candidate: usize,
    period: usize,
    points: Vec<f64>,
    best_count: usize,
    passed_count: usize,
}

#[derive(Serialize)]
struct ShadowReport {
    eps: f64,
    window: [usize; 2],
    delta: f64,
    passed: Proportion,
    sup_error: Summary,
    outcomes: Vec<ShadowOutcome>,
}

const LISTED_PAIRS: usize = 100;

/// Execute the configured analysis. The config is resolved first and that
/// resolved form is what the report embeds.
pub fn run_experiment(cfg: &ExperimentConfig, exec: &Executor) -> Result<Outcome, RunFailure> {
    let cfg = cfg.resolved();
    let fail = |message: String, diagnostics: Value| RunFailure {
        config: cfg.clone(),
        message,
        diagnostics,
    };
    let seq = cfg
        .build_sequence()
        .map_err(|e| fail(format!("building the sequence failed: {e}"), json!({ "detail": format!("{e:?}") })))?;
    let f = seq.limit().clone();
    let p = &cfg.process;
    let process = ProcessConfig {
        seq: seq.clone(),
        tail_index: p.tail_index,
        x0: p.x0,
        delta: p.delta,
        horizon: p.horizon,
        master_seed: p.seed,
    };
    let title = format!("{} ({})", cfg.analysis.kind(), seq.kind_tag());
    let mut svg = plot::svg_map(&title, &f);
    let mut trajectories = None;
    let process_fail = |e: &dyn std::fmt::Display| fail(e.to_string(), json!({ "stage": "simulation" }));

    let result = match &cfg.analysis {
        AnalysisSpec::Simulate {} => {
            let trajs = simulate_batch(&process, p.trials, exec).map_err(|e| process_fail(&e))?;
            let mut final_state = Summary::default();
            let (mut lo, mut hi, mut link) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
            for t in &trajs {
                final_state.push(*t.states.last().unwrap());
                link = link.max(t.max_link_error(&seq));
                for &x in &t.states {
                    lo = lo.min(x);
                    hi = hi.max(x);
                }
            }
            let shown: Vec<&[f64]> = trajs.iter().take(6).map(|t| t.states.as_slice()).collect();
            svg = plot::svg_trajectories(&title, &shown);
            let r = SimulateResult {
                trials: p.trials,
                horizon: p.horizon,
                delta: p.delta,
                max_link_error: link,
                min_state: lo,
                max_state: hi,
                final_state,
            };
            trajectories = Some(trajs);
            to_value(&r)
        }
        AnalysisSpec::Recurrence { center, radius, burn_in, min_visits, deltas } => {
            let q = RecurrenceQuery {
                center: *center,
                radius: *radius,
                burn_in: *burn_in,
                min_visits: *min_visits,
                horizon: p.horizon,
                deltas: deltas.clone().expect("resolved"),
                trials: p.trials,
            };
            let r = estimate_recurrence(&seq, p.tail_index, p.x0, &q, p.seed, exec).map_err(|e| process_fail(&e))?;
            to_value(&r)
        }
        AnalysisSpec::Trap { region, within_steps } => {
            let region = Interval::new(region[0], region[1]);
            let r = escape_probability(&process, region, *within_steps, p.trials, exec).map_err(|e| process_fail(&e))?;
            let exits: Vec<_> = r.trap.per_trajectory.iter().filter(|s| !s.stayed()).take(LISTED_PAIRS).collect();
            json!({
                "region": r.region,
                "within_steps": r.within_steps,
                "probability": r.probability,
                "trap": {
                    "trajectories": r.trap.trajectories,
                    "entered": r.trap.entered,
                    "exited": r.trap.exited,
                    "trapped": r.trap.trapped,
                    "first_exits": exits,
                },
            })
        }
        AnalysisSpec::Chain { delta_prime, start, target_center, target_radius, spacing } => {
            let r = find_delta_chain(&f, *delta_prime, *start, *target_center, *target_radius, *spacing)
                .map_err(|e| fail(e.to_string(), json!({ "stage": "chain search" })))?;
            if let ChainSearch::Found { chain, .. } = &r {
                let pts = chain.points.clone();
                svg = plot::svg_trajectories(&title, &[&pts]);
            }
            to_value(&r)
        }
        AnalysisSpec::Periodic { period, tol, resolution } => {
            let opts = ScanOptions {
                tol: *tol,
                resolution: *resolution,
                ..ScanOptions::default()
            };
            let r = find_periodic_points(&f, *period, &opts).map_err(|e| fail(e.to_string(), json!({ "stage": "scan" })))?;
            json!({ "points": r.points(), "scan": r })
        }
        AnalysisSpec::Decompose { level, orbit_length, tol, start, lattice } => {
            let opts = DecomposeOptions {
                start: *start,
                transient: None,
                lattice: lattice.then_some(Lattice(DEFAULT_LATTICE)),
            };
            let levels = decompose_levels(&f, *level, *orbit_length, *tol, &opts)
                .map_err(|e| fail(format!("decomposition failed: {e}"), to_value(&e)))?;
            json!({ "levels": levels })
        }
        AnalysisSpec::Shadow { eps, window, max_period } => {
            let cands = shadowing_candidates(&f, *max_period, &ScanOptions::default())
                .map_err(|e| fail(e.to_string(), json!({ "stage": "candidates" })))?;
            if cands.is_empty() {
                return Err(fail("the limit map has no periodic orbits up to max_period".into(), json!({})));
            }
            let per_trial = fold_batch(&process, p.trials, exec, |t| {
                shadow_test(&t.states, &cands, *eps, (window[0], window[1])).expect("window validated")
            })
            .map_err(|e| process_fail(&e))?;
            let mut counts: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
            let mut sup = Summary::default();
            for r in &per_trial {
                let c = counts.entry(r.best.candidate).or_default();
                c.0 += 1;
                c.1 += r.passed as usize;
                sup.push(r.best.sup_error);
            }
            let passed = per_trial.iter().filter(|r| r.passed).count();
            to_value(&ShadowReport {
                eps: *eps,
                window: *window,
                delta: p.delta,
                passed: Proportion::from_counts(passed as u64, p.trials as u64),
                sup_error: sup,
                outcomes: counts
                    .into_iter()
                    .map(|(i, (best_count, passed_count))| ShadowOutcome {
                        candidate: i,
                        period: cands[i].period,
                        points: cands[i].points.clone(),
                        best_count,
                        passed_count,
                    })
                    .collect(),
            })
        }
        AnalysisSpec::Liyorke { pairs, horizon, pair_seed, liminf, limsup, lattice } => {
            let opts = LiYorkeOptions {
                horizon: *horizon,
                tail_start: None,
                liminf_threshold: *liminf,
                limsup_threshold: *limsup,
                lattice: lattice.then_some(Lattice(DEFAULT_LATTICE)),
            };
            let shifted: MapSequence = seq.tail_shift(p.tail_index);
            let r = liyorke_scan(&shifted, &random_pairs(pair_seed.expect("resolved"), *pairs), &opts, exec)
                .map_err(|e| fail(e.to_string(), json!({ "stage": "scan" })))?;
            let flagged: Vec<_> = r.pairs.iter().filter(|s| s.flagged).take(LISTED_PAIRS).collect();
            json!({
                "options": r.options,
                "pairs_tested": r.pairs.len(),
                "flagged": r.flagged,
                "flagged_pairs": flagged,
            })
        }
    };

    Ok(Outcome {
        config: cfg,
        result,
        trajectories,
        svg,
    })
}
