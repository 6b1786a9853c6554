//! δ-chains of a single map: certified search on a grid, validation, and
//! the probability that noise follows a prescribed corridor.

use std::collections::VecDeque;

use serde::Serialize;
use thiserror::Error;

use crate::maps::{Interval, PiecewiseLinearMap};
use crate::stats::Proportion;
use crate::stochproc::{Executor, NoiseStream};

#[derive(Debug, Error, PartialEq)]
pub enum ChainError {
    #[error("delta' must be positive, got {0}")]
    BadDelta(f64),
    #[error("target radius must be positive, got {0}")]
    BadRadius(f64),
    #[error("start {0} is outside [0, 1]")]
    BadStart(f64),
    #[error("grid spacing {h} must be positive and below delta'/2 = {half}")]
    CoarseGrid { h: f64, half: f64 },
    #[error("corridor half-width {w} must lie in (0, delta = {delta}]")]
    BadWindow { w: f64, delta: f64 },
    #[error("corridor length must be at least 1")]
    ZeroLength,
}

/// `z_0 … z_n` with `|f(z_i) - z_{i+1}| < δ′` at every link.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaChain {
    pub points: Vec<f64>,
    pub delta_prime: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChainValidation {
    pub valid: bool,
    pub max_link_error: f64,
    /// `δ′ - max_link_error`.
    pub slack: f64,
}

pub fn validate_chain(f: &PiecewiseLinearMap, chain: &DeltaChain) -> ChainValidation {
    let mut max_err: f64 = 0.0;
    let mut valid = true;
    for w in chain.points.windows(2) {
        let e = (f.eval(w[0]) - w[1]).abs();
        valid &= e < chain.delta_prime;
        max_err = max_err.max(e);
    }
    ChainValidation {
        valid,
        max_link_error: max_err,
        slack: chain.delta_prime - max_err,
    }
}

/// Nodes `i / n`, `i = 0..=n`, with `n = ⌈1/h⌉`; an edge `a → b` exists
/// iff `|f(a) - b| < δ′ - h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReachabilityGrid {
    pub h: f64,
    pub cells: usize,
    pub delta_prime: f64,
}

impl ReachabilityGrid {
    pub fn new(delta_prime: f64, h: f64) -> Result<Self, ChainError> {
        if !(delta_prime > 0.0) {
            return Err(ChainError::BadDelta(delta_prime));
        }
        if !(h > 0.0 && h < delta_prime / 2.0) {
            return Err(ChainError::CoarseGrid { h, half: delta_prime / 2.0 });
        }
        Ok(Self {
            h,
            cells: (1.0 / h).ceil() as usize,
            delta_prime,
        })
    }

    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        i as f64 / self.cells as f64
    }

    fn margin(&self) -> f64 {
        self.delta_prime - self.h
    }

    /// Nodes `b` with `|y - b| < δ′ - h`, in increasing order.
    fn successors(&self, y: f64) -> impl Iterator<Item = usize> + '_ {
        let m = self.margin();
        let n = self.cells as f64;
        let lo = ((y - m) * n).floor().max(0.0) as usize;
        let hi = (((y + m) * n).ceil().max(0.0) as usize).min(self.cells);
        (lo..=hi).filter(move |&i| (y - self.node(i)).abs() < m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "lowercase")]
pub enum ChainSearch {
    Found { chain: DeltaChain, validation: ChainValidation },
    /// Nothing reaches the target; `reachable` is the union of reached
    /// nodes, merged into maximal runs of adjacent nodes.
    NotFound { reachable: Vec<Interval> },
}

impl ChainSearch {
    pub fn chain(&self) -> Option<&DeltaChain> {
        match self {
            ChainSearch::Found { chain, .. } => Some(chain),
            ChainSearch::NotFound { .. } => None,
        }
    }
}

/// Breadth-first δ′-chain search from `start` into the open ball
/// `B(target_center, target_radius)`. The first link leaves `start`
/// itself; later links run between grid nodes. Default spacing `δ′/8`.
pub fn find_delta_chain(
    f: &PiecewiseLinearMap,
    delta_prime: f64,
    start: f64,
    target_center: f64,
    target_radius: f64,
    spacing: Option<f64>,
) -> Result<ChainSearch, ChainError> {
    if !(target_radius > 0.0) {
        return Err(ChainError::BadRadius(target_radius));
    }
    if !(0.0..=1.0).contains(&start) {
        return Err(ChainError::BadStart(start));
    }
    let grid = ReachabilityGrid::new(delta_prime, spacing.unwrap_or(delta_prime / 8.0))?;
    let in_target = |x: f64| (x - target_center).abs() < target_radius;
    let finish = |points: Vec<f64>| {
        let chain = DeltaChain { points, delta_prime };
        let validation = validate_chain(f, &chain);
        debug_assert!(validation.valid);
        ChainSearch::Found { chain, validation }
    };

    let y0 = f.eval(start);
    if in_target(y0) {
        return Ok(finish(vec![start, y0]));
    }

    const ROOT: u32 = u32::MAX;
    const UNSEEN: u32 = u32::MAX - 1;
    let mut parent = vec![UNSEEN; grid.cells + 1];
    let mut queue = VecDeque::new();
    let path_to = |parent: &[u32], mut i: usize| {
        let mut pts = vec![grid.node(i)];
        while parent[i] != ROOT {
            i = parent[i] as usize;
            pts.push(grid.node(i));
        }
        pts.push(start);
        pts.reverse();
        pts
    };

    for b in grid.successors(y0) {
        parent[b] = ROOT;
        if in_target(grid.node(b)) {
            return Ok(finish(path_to(&parent, b)));
        }
        queue.push_back(b);
    }
    while let Some(a) = queue.pop_front() {
        let y = f.eval(grid.node(a));
        for b in grid.successors(y) {
            if parent[b] != UNSEEN {
                continue;
            }
            parent[b] = a as u32;
            if in_target(grid.node(b)) {
                return Ok(finish(path_to(&parent, b)));
            }
            queue.push_back(b);
        }
    }

    let mut reachable: Vec<Interval> = Vec::new();
    let mut run: Option<(usize, usize)> = None;
    for (i, &p) in parent.iter().enumerate() {
        if p == UNSEEN {
            continue;
        }
        run = match run {
            Some((lo, hi)) if hi + 1 == i => Some((lo, i)),
            Some((lo, hi)) => {
                reachable.push(Interval::new(grid.node(lo), grid.node(hi)));
                Some((i, i))
            }
            None => Some((i, i)),
        };
    }
    if let Some((lo, hi)) = run {
        reachable.push(Interval::new(grid.node(lo), grid.node(hi)));
    }
    Ok(ChainSearch::NotFound { reachable })
}

/// `(w/δ)^N`: probability that `N` independent uniform `[-δ, δ]` draws
/// each land in a fixed window of length `2w`.
pub fn corridor_probability(steps: usize, w: f64, delta: f64) -> Result<f64, ChainError> {
    if steps == 0 {
        return Err(ChainError::ZeroLength);
    }
    if !(w > 0.0 && w <= delta) {
        return Err(ChainError::BadWindow { w, delta });
    }
    Ok((w / delta).powi(steps as i32))
}

/// Monte Carlo estimate of the corridor event with the window `[-w, w)`;
/// batch `m` uses noise stream `m`.
pub fn corridor_monte_carlo(
    steps: usize,
    w: f64,
    delta: f64,
    batches: usize,
    seed: u64,
    exec: &Executor,
) -> Result<Proportion, ChainError> {
    corridor_probability(steps, w, delta)?;
    let hits = exec.map_indexed(batches, |m| {
        let mut noise = NoiseStream::new(seed, m, delta);
        (0..steps).all(|_| {
            let xi = noise.draw();
            -w <= xi && xi < w
        })
    });
    Ok(Proportion::from_counts(
        hits.iter().filter(|&&h| h).count() as u64,
        batches as u64,
    ))
}
