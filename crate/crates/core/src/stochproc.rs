//! Seeded simulation of randomly perturbed nonautonomous processes
//! `X_{n+1} = f_{k+n}(X_n) + ξ_n`, with `ξ_n` uniform on `[-δ, δ)`.
//!
//! Every trial owns its own ChaCha8 stream: the master seed keys the
//! generator and the trial index selects the stream, so the noise at
//! `(master_seed, trial, step)` is fixed no matter how trials are scheduled.

use std::borrow::Cow;
use std::io::{Read, Write};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::maps::{MapSequence, PiecewiseLinearMap};

#[derive(Debug, Error)]
pub enum ProcessError {
    #[error("noise half-width must be finite and non-negative, got {0}")]
    BadDelta(f64),
    #[error("horizon must be at least 1")]
    ZeroHorizon,
    #[error("initial point {0} is outside [0, 1]")]
    BadStart(f64),
    #[error("at least one trial is required")]
    NoTrials,
    #[error("{trials} trials x {states} states exceeds the cap of {cap} stored states; use a streaming fold")]
    ResourceExhausted { trials: usize, states: usize, cap: usize },
    #[error("failed to build worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("malformed trajectory csv: {0}")]
    MalformedCsv(String),
}

/// Parameters of one `(f_{k,∞}, δ)`-process.
#[derive(Debug, Clone)]
pub struct ProcessConfig {
    pub seq: MapSequence,
    pub tail_index: usize,
    pub x0: f64,
    pub delta: f64,
    pub horizon: usize,
    pub master_seed: u64,
}

impl ProcessConfig {
    pub fn validate(&self) -> Result<(), ProcessError> {
        if !self.delta.is_finite() || self.delta < 0.0 {
            return Err(ProcessError::BadDelta(self.delta));
        }
        if self.horizon == 0 {
            return Err(ProcessError::ZeroHorizon);
        }
        if !(0.0..=1.0).contains(&self.x0) {
            return Err(ProcessError::BadStart(self.x0));
        }
        Ok(())
    }

    pub fn with_delta(&self, delta: f64) -> Self {
        Self {
            delta,
            ..self.clone()
        }
    }

    /// The maps applied at steps `0..horizon`.
    fn window(&self) -> Vec<Cow<'_, PiecewiseLinearMap>> {
        (0..self.horizon)
            .map(|n| self.seq.generator(self.tail_index + n))
            .collect()
    }
}

/// One realized perturbed orbit. States are stored unclamped.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub states: Vec<f64>,
    pub tail_index: usize,
    pub delta: f64,
    pub seed: u64,
    pub trial: usize,
}

impl Trajectory {
    /// `max_n |X_{n+1} - f_{k+n}(X_n)|`; a valid process has this `≤ δ`.
    pub fn max_link_error(&self, seq: &MapSequence) -> f64 {
        let seq = seq.tail_shift(self.tail_index);
        self.states
            .windows(2)
            .enumerate()
            .map(|(n, w)| (w[1] - seq.generator(n).eval(w[0])).abs())
            .fold(0.0, f64::max)
    }

    /// `max_n |X_{n+1} - f(X_n)|` against a single map.
    pub fn max_link_error_for(&self, f: &PiecewiseLinearMap) -> f64 {
        self.states
            .windows(2)
            .map(|w| (w[1] - f.eval(w[0])).abs())
            .fold(0.0, f64::max)
    }
}

/// Uniform noise on `[-δ, δ)` for one trial.
#[derive(Debug, Clone)]
pub struct NoiseStream {
    rng: ChaCha8Rng,
    delta: f64,
}

impl NoiseStream {
    pub fn new(master_seed: u64, trial: usize, delta: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(trial as u64);
        Self { rng, delta }
    }

    /// The perturbation at `step` without drawing the earlier ones.
    pub fn at(master_seed: u64, trial: usize, step: usize, delta: f64) -> f64 {
        let mut s = Self::new(master_seed, trial, delta);
        // each f64 consumes two 32-bit words
        s.rng.set_word_pos(2 * step as u128);
        s.draw()
    }

    /// Uniform on `[0, 1)`.
    #[inline]
    pub fn unit(&mut self) -> f64 {
        self.rng.gen::<f64>()
    }

    #[inline]
    pub fn draw(&mut self) -> f64 {
        2.0 * self.delta * self.unit() - self.delta
    }
}

/// Worker pool for trial-level parallelism. Results never depend on the
/// number of workers.
#[derive(Clone)]
pub struct Executor {
    pool: Option<Arc<rayon::ThreadPool>>,
    sequential: bool,
    /// Upper bound on `trials * (horizon + 1)` for materialized batches.
    pub max_states: usize,
}

impl std::fmt::Debug for Executor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Executor")
            .field("workers", &self.workers())
            .field("max_states", &self.max_states)
            .finish()
    }
}

pub const DEFAULT_MAX_STATES: usize = 50_000_000;

impl Default for Executor {
    /// Rayon's global pool.
    fn default() -> Self {
        Self {
            pool: None,
            sequential: false,
            max_states: DEFAULT_MAX_STATES,
        }
    }
}

impl Executor {
    pub fn sequential() -> Self {
        Self {
            sequential: true,
            ..Self::default()
        }
    }

    /// `workers == 0` means rayon's global pool; `1` runs on the calling thread.
    pub fn with_workers(workers: usize) -> Result<Self, ProcessError> {
        match workers {
            0 => Ok(Self::default()),
            1 => Ok(Self::sequential()),
            n => Ok(Self {
                pool: Some(Arc::new(
                    rayon::ThreadPoolBuilder::new().num_threads(n).build()?,
                )),
                ..Self::default()
            }),
        }
    }

    pub fn workers(&self) -> usize {
        match (&self.pool, self.sequential) {
            (_, true) => 1,
            (Some(p), _) => p.current_num_threads(),
            (None, _) => rayon::current_num_threads(),
        }
    }

    /// `f(0), …, f(count - 1)`, in index order.
    pub fn map_indexed<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        if self.sequential {
            return (0..count).map(f).collect();
        }
        let run = || (0..count).into_par_iter().map(&f).collect();
        match &self.pool {
            Some(pool) => pool.install(run),
            None => run(),
        }
    }
}

fn run_trial(
    window: &[Cow<'_, PiecewiseLinearMap>],
    cfg: &ProcessConfig,
    trial: usize,
) -> Trajectory {
    let mut noise = NoiseStream::new(cfg.master_seed, trial, cfg.delta);
    let mut states = Vec::with_capacity(window.len() + 1);
    let mut x = cfg.x0;
    states.push(x);
    for f in window {
        x = f.eval(x) + noise.draw();
        states.push(x);
    }
    Trajectory {
        states,
        tail_index: cfg.tail_index,
        delta: cfg.delta,
        seed: cfg.master_seed,
        trial,
    }
}

/// One trajectory `X_0 … X_N` on stream `trial`.
pub fn simulate(cfg: &ProcessConfig, trial: usize) -> Result<Trajectory, ProcessError> {
    cfg.validate()?;
    Ok(run_trial(&cfg.window(), cfg, trial))
}

/// Trajectories for trials `0..trials`, ordered by trial index.
pub fn simulate_batch(
    cfg: &ProcessConfig,
    trials: usize,
    exec: &Executor,
) -> Result<Vec<Trajectory>, ProcessError> {
    let states = cfg.horizon.saturating_add(1);
    if trials.saturating_mul(states) > exec.max_states {
        return Err(ProcessError::ResourceExhausted {
            trials,
            states,
            cap: exec.max_states,
        });
    }
    fold_batch(cfg, trials, exec, Trajectory::clone)
}

/// Simulate trials `0..trials` and reduce each to `T` as soon as it is
/// produced; only the per-trial summaries are kept.
pub fn fold_batch<T, F>(
    cfg: &ProcessConfig,
    trials: usize,
    exec: &Executor,
    summarize: F,
) -> Result<Vec<T>, ProcessError>
where
    T: Send,
    F: Fn(&Trajectory) -> T + Sync + Send,
{
    cfg.validate()?;
    if trials == 0 {
        return Err(ProcessError::NoTrials);
    }
    let window = cfg.window();
    Ok(exec.map_indexed(trials, |t| summarize(&run_trial(&window, cfg, t))))
}

/// Format with 17 significant digits; parses back to the identical `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write `trial,step,x` rows.
pub fn write_csv<W: Write>(out: W, trajectories: &[Trajectory]) -> Result<(), ProcessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["trial", "step", "x"])?;
    for t in trajectories {
        for (step, x) in t.states.iter().enumerate() {
            w.write_record([t.trial.to_string(), step.to_string(), fmt_f64(*x)])?;
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Trial paths read back from a `trial,step,x` dump.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvPath {
    pub trial: usize,
    pub states: Vec<f64>,
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<CsvPath>, ProcessError> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().collect::<Vec<_>>() != ["trial", "step", "x"] {
        return Err(ProcessError::MalformedCsv(format!(
            "expected header trial,step,x, got {}",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut paths: Vec<CsvPath> = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let bad = |what: &str| ProcessError::MalformedCsv(format!("row {}: {what}", line + 2));
        let trial: usize = rec[0].trim().parse().map_err(|_| bad("trial"))?;
        let step: usize = rec[1].trim().parse().map_err(|_| bad("step"))?;
        let x: f64 = rec[2].trim().parse().map_err(|_| bad("x"))?;
        match paths.last_mut() {
            Some(p) if p.trial == trial && step == p.states.len() => p.states.push(x),
            _ if step == 0 => paths.push(CsvPath {
                trial,
                states: vec![x],
            }),
            _ => return Err(bad("steps must start at 0 and increase by one per trial")),
        }
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;

    fn cfg(seq: MapSequence, x0: f64, delta: f64, horizon: usize) -> ProcessConfig {
        ProcessConfig {
            seq,
            tail_index: 0,
            x0,
            delta,
            horizon,
            master_seed: 7,
        }
    }

    #[test]
    fn noiseless_process_is_the_deterministic_orbit() {
        let seq = MapSequence::example1();
        let c = ProcessConfig {
            tail_index: 3,
            ..cfg(seq.clone(), 0.6, 0.0, 20)
        };
        let t = simulate(&c, 0).unwrap();
        for (n, x) in t.states.iter().enumerate() {
            assert_eq!(*x, seq.compose_prefix(3, n, 0.6));
        }
    }

    #[test]
    fn same_trial_is_bit_identical() {
        let c = cfg(MapSequence::constant(gallery::tent()), 0.3, 0.01, 50);
        assert_eq!(simulate(&c, 4).unwrap(), simulate(&c, 4).unwrap());
        assert_ne!(simulate(&c, 4).unwrap().states, simulate(&c, 5).unwrap().states);
    }

    #[test]
    fn example1_steps_respect_noise_bound() {
        let c = cfg(MapSequence::example1(), 0.0, 0.19, 200);
        for t in simulate_batch(&c, 200, &Executor::sequential()).unwrap() {
            assert!(t.max_link_error(&c.seq) <= 0.19);
            assert_eq!(t.states[0], 0.0);
        }
    }

    #[test]
    fn batch_of_one_is_trial_zero() {
        let c = cfg(MapSequence::example1(), 0.0, 0.19, 30);
        let b = simulate_batch(&c, 1, &Executor::default()).unwrap();
        assert_eq!(b, vec![simulate(&c, 0).unwrap()]);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let c = cfg(MapSequence::example1(), 0.0, 0.19, 64);
        let one = simulate_batch(&c, 100, &Executor::with_workers(1).unwrap()).unwrap();
        let eight = simulate_batch(&c, 100, &Executor::with_workers(8).unwrap()).unwrap();
        assert_eq!(one, eight);
    }

    #[test]
    fn random_access_matches_sequential_draws() {
        let mut s = NoiseStream::new(11, 3, 0.2);
        for step in 0..20 {
            assert_eq!(s.draw(), NoiseStream::at(11, 3, step, 0.2));
        }
    }

    #[test]
    fn batch_respects_memory_cap() {
        let c = cfg(MapSequence::example1(), 0.0, 0.19, 99);
        let exec = Executor {
            max_states: 1000,
            ..Executor::sequential()
        };
        assert!(matches!(
            simulate_batch(&c, 11, &exec),
            Err(ProcessError::ResourceExhausted { .. })
        ));
        assert_eq!(simulate_batch(&c, 10, &exec).unwrap().len(), 10);
        // folds are not capped
        assert_eq!(fold_batch(&c, 50, &exec, |t| t.trial).unwrap().len(), 50);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let base = cfg(MapSequence::example1(), 0.0, 0.1, 10);
        assert!(matches!(simulate(&base.with_delta(-0.1), 0), Err(ProcessError::BadDelta(_))));
        assert!(matches!(
            simulate(&ProcessConfig { horizon: 0, ..base.clone() }, 0),
            Err(ProcessError::ZeroHorizon)
        ));
        assert!(matches!(
            simulate(&ProcessConfig { x0: 1.5, ..base.clone() }, 0),
            Err(ProcessError::BadStart(_))
        ));
        assert!(matches!(fold_batch(&base, 0, &Executor::sequential(), |_| ()), Err(ProcessError::NoTrials)));
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let c = cfg(MapSequence::example1(), 0.0, 0.19, 25);
        let ts = simulate_batch(&c, 3, &Executor::sequential()).unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, &ts).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("trial,step,x\n0,0,0.0000000000000000e0\n"));
        let back = read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.len(), 3);
        for (t, p) in ts.iter().zip(&back) {
            assert_eq!(p.trial, t.trial);
            assert_eq!(p.states, t.states);
        }
    }

    #[test]
    fn csv_rejects_gaps() {
        let text = "trial,step,x\n0,0,0.1\n0,2,0.3\n";
        assert!(matches!(read_csv(text.as_bytes()), Err(ProcessError::MalformedCsv(_))));
        assert!(read_csv("a,b\n".as_bytes()).is_err());
    }
}
