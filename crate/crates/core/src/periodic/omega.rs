use serde::Serialize;
use thiserror::Error;

use crate::maps::{Interval, Lattice, PiecewiseLinearMap};

#[derive(Debug, Error, Clone, PartialEq, Serialize)]
#[serde(tag = "error", rename_all = "kebab-case")]
pub enum DecomposeError {
    #[error("level-{level} clusters overlap (margin {margin:e}); the map is not of type 2^inf at this level or the orbit is too short")]
    Overlap {
        level: u32,
        margin: f64,
        hulls: Vec<Interval>,
    },
    #[error("level-{level} cluster {index} is not mapped into the tol-neighborhood of its successor hull (excess {excess:e})")]
    NotInvariant { level: u32, index: usize, excess: f64 },
    #[error("orbit length {length} leaves fewer than 2^{level} tail points after the transient")]
    OrbitTooShort { level: u32, length: usize },
    #[error("level {level} is too deep")]
    LevelTooDeep { level: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecomposeOptions {
    pub start: f64,
    /// Steps discarded before hulls are collected; defaults to half the orbit.
    pub transient: Option<usize>,
    /// Iterate on a rational grid instead of raw `f64`.
    pub lattice: Option<Lattice>,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        Self {
            start: 0.3,
            transient: None,
            lattice: None,
        }
    }
}

/// Convex hulls `U(1,k) … U(2^k,k)` of the cyclic portions of an orbit tail.
/// `hulls[0]` is the leftmost hull and `g` maps `hulls[i]` into
/// `hulls[(i + 1) % 2^k]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalDecomposition {
    pub level: u32,
    pub hulls: Vec<Interval>,
    /// Smallest gap between distinct hulls; absent at level 0.
    pub margin: Option<f64>,
    /// Largest distance from `g(x)`, `x` a sampled point of cluster `i`,
    /// to `U(i+1)`.
    pub invariance_excess: f64,
    /// Largest amount by which the full image `g(U(i))` sticks out of
    /// `U(i+1)`. Informational: a hull that straddles a turning point in a
    /// gap of the attractor maps past the attractor.
    pub hull_image_excess: f64,
    /// For each hull, the index of the enclosing hull one level up.
    pub parents: Option<Vec<usize>>,
}

impl IntervalDecomposition {
    /// Hulls sorted left to right, with their cyclic indices.
    pub fn spatial_order(&self) -> Vec<(usize, Interval)> {
        let mut v: Vec<(usize, Interval)> = self.hulls.iter().copied().enumerate().collect();
        v.sort_by(|a, b| a.1.lo.total_cmp(&b.1.lo));
        v
    }
}

fn orbit_tail(g: &PiecewiseLinearMap, length: usize, opts: &DecomposeOptions) -> (usize, Vec<f64>) {
    let transient = opts.transient.unwrap_or(length / 2).min(length);
    let step = |x: f64| match opts.lattice {
        Some(l) => l.snap(g.eval(x)),
        None => g.eval(x),
    };
    let mut x = opts.lattice.map_or(opts.start, |l| l.snap(opts.start));
    for _ in 0..transient {
        x = step(x);
    }
    let mut tail = Vec::with_capacity(length - transient);
    for _ in transient..length {
        tail.push(x);
        x = step(x);
    }
    (transient, tail)
}

fn level_from_tail(
    g: &PiecewiseLinearMap,
    level: u32,
    first_step: usize,
    tail: &[f64],
    tol: f64,
) -> Result<IntervalDecomposition, DecomposeError> {
    if level >= usize::BITS - 1 {
        return Err(DecomposeError::LevelTooDeep { level });
    }
    let m = 1usize << level;
    if tail.len() < m {
        return Err(DecomposeError::OrbitTooShort {
            level,
            length: first_step + tail.len(),
        });
    }
    // hull per residue of the absolute step index
    let mut by_residue = vec![Interval { lo: f64::INFINITY, hi: f64::NEG_INFINITY }; m];
    for (i, &x) in tail.iter().enumerate() {
        let h = &mut by_residue[(first_step + i) % m];
        h.lo = h.lo.min(x);
        h.hi = h.hi.max(x);
    }

    let mut sorted = by_residue.clone();
    sorted.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let margin = sorted
        .windows(2)
        .map(|w| w[1].lo - w[0].hi)
        .fold(f64::INFINITY, f64::min);
    if m > 1 && margin <= 0.0 {
        return Err(DecomposeError::Overlap {
            level,
            margin,
            hulls: by_residue,
        });
    }

    let anchor = (0..m)
        .min_by(|&a, &b| by_residue[a].lo.total_cmp(&by_residue[b].lo))
        .unwrap();
    let hulls: Vec<Interval> = (0..m).map(|i| by_residue[(anchor + i) % m]).collect();

    // g(M(i)) ⊆ U(i+1), checked on the sampled cluster points
    let mut excess_by_residue = vec![0.0f64; m];
    for (i, &x) in tail.iter().enumerate() {
        let r = (first_step + i) % m;
        let next = by_residue[(r + 1) % m];
        let y = g.eval(x);
        excess_by_residue[r] = excess_by_residue[r].max((next.lo - y).max(y - next.hi).max(0.0));
    }
    let mut excess: f64 = 0.0;
    let mut hull_image_excess: f64 = 0.0;
    for i in 0..m {
        let e = excess_by_residue[(anchor + i) % m];
        if e > tol {
            return Err(DecomposeError::NotInvariant {
                level,
                index: i,
                excess: e,
            });
        }
        excess = excess.max(e);
        let img = g.image(hulls[i]);
        let next = hulls[(i + 1) % m];
        hull_image_excess = hull_image_excess.max((next.lo - img.lo).max(img.hi - next.hi).max(0.0));
    }

    Ok(IntervalDecomposition {
        level,
        hulls,
        margin: (m > 1).then_some(margin),
        invariance_excess: excess,
        hull_image_excess,
        parents: None,
    })
}

/// Level-`level` decomposition of the ω-limit set reached from `opts.start`.
pub fn decompose_omega(
    g: &PiecewiseLinearMap,
    level: u32,
    orbit_length: usize,
    tol: f64,
    opts: &DecomposeOptions,
) -> Result<IntervalDecomposition, DecomposeError> {
    let (first, tail) = orbit_tail(g, orbit_length, opts);
    level_from_tail(g, level, first, &tail, tol)
}

/// Levels `0..=max_level` from one orbit, with the nesting tree filled in.
pub fn decompose_levels(
    g: &PiecewiseLinearMap,
    max_level: u32,
    orbit_length: usize,
    tol: f64,
    opts: &DecomposeOptions,
) -> Result<Vec<IntervalDecomposition>, DecomposeError> {
    let (first, tail) = orbit_tail(g, orbit_length, opts);
    let mut levels: Vec<IntervalDecomposition> = Vec::new();
    for level in 0..=max_level {
        let mut d = level_from_tail(g, level, first, &tail, tol)?;
        if let Some(up) = levels.last() {
            let parents = d
                .hulls
                .iter()
                .map(|h| {
                    up.hulls
                        .iter()
                        .position(|p| p.contains_interval(h))
                        .expect("residue classes refine")
                })
                .collect();
            d.parents = Some(parents);
        }
        levels.push(d);
    }
    Ok(levels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;

    #[test]
    fn level_zero_is_one_hull() {
        let g = gallery::truncated_tent(gallery::LAMBDA).unwrap();
        let d = decompose_omega(&g, 0, 10_000, 1e-3, &DecomposeOptions::default()).unwrap();
        assert_eq!(d.hulls.len(), 1);
        assert_eq!(d.margin, None);
        assert!(d.hulls[0].lo < d.hulls[0].hi);
    }

    #[test]
    fn level_one_hulls_are_exchanged() {
        let g = gallery::truncated_tent(gallery::LAMBDA).unwrap();
        let d = decompose_omega(&g, 1, 100_000, 1e-3, &DecomposeOptions::default()).unwrap();
        assert_eq!(d.hulls.len(), 2);
        let (a, b) = (d.hulls[0], d.hulls[1]);
        assert!(a.hi < b.lo);
        // invariance oracle: an independent orbit, checked point by point
        let mut x = 0.3;
        for n in 0..100_000 {
            let y = g.eval(x);
            if n >= 50_000 {
                let (from, to) = if a.contains(x) { (a, b) } else { (b, a) };
                assert!(from.contains(x));
                assert!(to.inflate(1e-3).contains(y));
            }
            x = y;
        }
    }

    #[test]
    fn full_tent_clusters_overlap() {
        let opts = DecomposeOptions {
            start: 0.123456789,
            lattice: Some(Lattice(crate::periodic::DEFAULT_LATTICE)),
            ..DecomposeOptions::default()
        };
        let err = decompose_omega(&gallery::tent(), 1, 100_000, 1e-3, &opts).unwrap_err();
        match err {
            // the tail is dense, so both residue classes span nearly all of [0, 1]
            DecomposeError::Overlap { level: 1, hulls, .. } => {
                assert!(hulls.iter().all(|h| h.width() > 0.99));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn too_short_orbit() {
        let g = gallery::truncated_tent(gallery::LAMBDA).unwrap();
        assert!(matches!(
            decompose_omega(&g, 4, 20, 1e-3, &DecomposeOptions::default()),
            Err(DecomposeError::OrbitTooShort { .. })
        ));
    }

    #[test]
    fn levels_nest() {
        let g = gallery::truncated_tent(gallery::LAMBDA).unwrap();
        let levels = decompose_levels(&g, 3, 100_000, 1e-3, &DecomposeOptions::default()).unwrap();
        for w in levels.windows(2) {
            let parents = w[1].parents.as_ref().unwrap();
            for (h, &p) in w[1].hulls.iter().zip(parents) {
                assert!(w[0].hulls[p].contains_interval(h));
            }
        }
    }
}
