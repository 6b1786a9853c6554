use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::maps::{Lattice, MapSequence};
use crate::stochproc::Executor;

/// `10^9 + 7`: odd, and 2 has multiplicative order `(q - 1) / 2` modulo it,
/// so tent orbits on this grid have very long periods.
pub const DEFAULT_LATTICE: u64 = 1_000_000_007;

#[derive(Debug, Error, PartialEq)]
pub enum LiYorkeError {
    #[error("horizon must be at least 100, got {0}")]
    ShortHorizon(usize),
    #[error("tail start {tail_start} must be below the horizon {horizon}")]
    BadTail { tail_start: usize, horizon: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LiYorkeOptions {
    pub horizon: usize,
    /// First step of the tail used for min/max; defaults to `horizon / 2`.
    pub tail_start: Option<usize>,
    pub liminf_threshold: f64,
    pub limsup_threshold: f64,
    /// Orbits are computed on this grid; `None` uses raw `f64` iteration.
    pub lattice: Option<Lattice>,
}

impl Default for LiYorkeOptions {
    fn default() -> Self {
        Self {
            horizon: 10_000,
            tail_start: None,
            liminf_threshold: 1e-3,
            limsup_threshold: 1e-1,
            lattice: Some(Lattice(DEFAULT_LATTICE)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairStat {
    pub x: f64,
    pub y: f64,
    pub min_distance: f64,
    pub max_distance: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiYorkeReport {
    pub options: LiYorkeOptions,
    pub flagged: usize,
    pub pairs: Vec<PairStat>,
}

/// `count` pairs drawn uniformly from the unit square.
pub fn random_pairs(seed: u64, count: usize) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| (rng.gen(), rng.gen())).collect()
}

/// Tail min and max of `|F_n(x) - F_n(y)|` with `F_n = f_n ∘ … ∘ f_0`.
/// A pair is flagged as a suspected scrambled pair when the min falls
/// below the liminf threshold and the max exceeds the limsup threshold.
pub fn liyorke_scan(
    seq: &MapSequence,
    pairs: &[(f64, f64)],
    opts: &LiYorkeOptions,
    exec: &Executor,
) -> Result<LiYorkeReport, LiYorkeError> {
    if opts.horizon < 100 {
        return Err(LiYorkeError::ShortHorizon(opts.horizon));
    }
    let tail_start = opts.tail_start.unwrap_or(opts.horizon / 2);
    if tail_start >= opts.horizon {
        return Err(LiYorkeError::BadTail {
            tail_start,
            horizon: opts.horizon,
        });
    }
    let window = seq.window(opts.horizon);
    let snap = |x: f64| opts.lattice.map_or(x, |l| l.snap(x));

    let stats = exec.map_indexed(pairs.len(), |i| {
        let (x0, y0) = pairs[i];
        let (mut x, mut y) = (snap(x0), snap(y0));
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for (n, f) in window.iter().enumerate() {
            x = snap(f.eval(x));
            y = snap(f.eval(y));
            if n >= tail_start {
                let d = (x - y).abs();
                lo = lo.min(d);
                hi = hi.max(d);
            }
        }
        PairStat {
            x: x0,
            y: y0,
            min_distance: lo,
            max_distance: hi,
            flagged: lo < opts.liminf_threshold && hi > opts.limsup_threshold,
        }
    });
    Ok(LiYorkeReport {
        options: *opts,
        flagged: stats.iter().filter(|s| s.flagged).count(),
        pairs: stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;
    use crate::maps::PiecewiseLinearMap;

    #[test]
    fn constant_map_flags_nothing() {
        let seq = MapSequence::constant(PiecewiseLinearMap::constant(0.3).unwrap());
        let r = liyorke_scan(&seq, &random_pairs(1, 50), &LiYorkeOptions::default(), &Executor::sequential()).unwrap();
        assert_eq!(r.flagged, 0);
        assert!(r.pairs.iter().all(|p| p.max_distance == 0.0));
    }

    #[test]
    fn tent_lattice_orbits_do_not_collapse() {
        let seq = MapSequence::constant(gallery::tent());
        let opts = LiYorkeOptions {
            horizon: 2000,
            ..LiYorkeOptions::default()
        };
        let r = liyorke_scan(&seq, &random_pairs(2, 20), &opts, &Executor::sequential()).unwrap();
        assert!(r.pairs.iter().all(|p| p.max_distance > 0.5));
        // raw f64 iteration collapses every tent orbit onto 0
        let raw = LiYorkeOptions { lattice: None, ..opts };
        let r = liyorke_scan(&seq, &random_pairs(2, 20), &raw, &Executor::sequential()).unwrap();
        assert!(r.pairs.iter().all(|p| p.max_distance == 0.0));
    }

    #[test]
    fn rejects_short_horizons() {
        let seq = MapSequence::constant(gallery::tent());
        let opts = LiYorkeOptions {
            horizon: 99,
            ..LiYorkeOptions::default()
        };
        assert_eq!(
            liyorke_scan(&seq, &[], &opts, &Executor::sequential()),
            Err(LiYorkeError::ShortHorizon(99))
        );
        let opts = LiYorkeOptions {
            horizon: 100,
            tail_start: Some(100),
            ..LiYorkeOptions::default()
        };
        assert!(liyorke_scan(&seq, &[], &opts, &Executor::sequential()).is_err());
    }
}
