//! Finite-depth modification of the truncated tent around its period-`2^k`
//! orbits, `k = 1..=K`.
//!
//! Around each period-`2^k` point `x` sitting in the gap between the two
//! level-`k+1` hulls inside a level-`k` hull, `g` is replaced on
//! `(x - ε_k, x + ε_k)`. At one chosen index the middle fifth-pair carries a
//! scaled copy of the graph of `g` flanked by flat shoulders; at every other
//! index the map is a slope-1 translation. The outer fifths are affine joins
//! back to `g`.

use serde::Serialize;
use thiserror::Error;

use super::{truncated_tent, GalleryError, LAMBDA};
use crate::maps::{Interval, MapError, PiecewiseLinearMap};
use crate::periodic::{decompose_levels, find_periodic_points, DecomposeError, DecomposeOptions, PeriodicError, ScanOptions};

#[derive(Debug, Error)]
pub enum Example2Error {
    #[error("bad lambda: {0}")]
    Lambda(String),
    #[error("hull decomposition failed: {0}")]
    Decompose(#[from] DecomposeError),
    #[error(transparent)]
    Periodic(#[from] PeriodicError),
    #[error("level {level}, hull {index}: no period-{period} point in the gap ({gap_lo}, {gap_hi})")]
    MissingPoint {
        level: u32,
        index: usize,
        period: usize,
        gap_lo: f64,
        gap_hi: f64,
    },
    #[error("level {level}, hull {index}: {count} period-{period} candidates in the gap, expected one")]
    AmbiguousPoint {
        level: u32,
        index: usize,
        period: usize,
        count: usize,
    },
    #[error("intervals {a:?} and {b:?} overlap or leave [0, 1]")]
    Overlap { a: Interval, b: Interval },
    #[error("assembled map is invalid: {0}")]
    Map(#[from] MapError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Example2Options {
    pub depth: u32,
    pub lambda: f64,
    /// Orbit length used for the hull decomposition.
    pub orbit_length: usize,
    /// Invariance tolerance of the hull decomposition.
    pub hull_tol: f64,
    /// Bisection tolerance for the periodic points.
    pub point_tol: f64,
}

impl Default for Example2Options {
    fn default() -> Self {
        Self {
            depth: 3,
            lambda: LAMBDA,
            orbit_length: 400_000,
            hull_tol: 1e-3,
            point_tol: 1e-14,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PieceKind {
    /// `g` itself.
    Base,
    /// Affine from `(lo, y0)` to `(hi, y1)`.
    Join { y0: f64, y1: f64 },
    /// `t ↦ t + offset`.
    Translation { offset: f64 },
    Shoulder { value: f64 },
    /// `t ↦ b + side · g((t - a) / side)`.
    Copy { a: f64, b: f64, side: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    #[serde(flatten)]
    pub kind: PieceKind,
}

impl Piece {
    pub fn eval(&self, g: &PiecewiseLinearMap, t: f64) -> f64 {
        match self.kind {
            PieceKind::Base => g.eval(t),
            PieceKind::Join { y0, y1 } => y0 + (y1 - y0) * (t - self.lo) / (self.hi - self.lo),
            PieceKind::Translation { offset } => t + offset,
            PieceKind::Shoulder { value } => value,
            PieceKind::Copy { a, b, side } => b + side * g.eval((t - a) / side),
        }
    }

    /// Abscissae where the piece may bend, including both ends.
    fn corners(&self, g: &PiecewiseLinearMap) -> Vec<f64> {
        let mut v = vec![self.lo];
        match self.kind {
            PieceKind::Base => v.extend(g.breakpoints().iter().copied().filter(|&s| self.lo < s && s < self.hi)),
            PieceKind::Copy { a, side, .. } => v.extend(
                g.breakpoints()
                    .iter()
                    .map(|&s| a + side * s)
                    .filter(|&s| self.lo < s && s < self.hi),
            ),
            _ => {}
        }
        v.push(self.hi);
        v
    }
}

/// Data for one level `k`, indexed by cyclic hull index.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Example2Level {
    pub k: u32,
    pub points: Vec<f64>,
    pub eps_each: Vec<f64>,
    pub eps: f64,
    pub chosen: usize,
    /// `|g^(2^k)(x) - x|` per point.
    pub residuals: Vec<f64>,
    pub intervals: Vec<Interval>,
    /// Gaps between the two child hulls, one per point.
    pub gaps: Vec<Interval>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Example2 {
    pub options: Example2Options,
    #[serde(skip)]
    pub base: PiecewiseLinearMap,
    pub map: PiecewiseLinearMap,
    pub levels: Vec<Example2Level>,
    pub pieces: Vec<Piece>,
    /// Largest mismatch between adjacent piece formulas at their shared end.
    pub max_junction_gap: f64,
}

impl Example2 {
    /// Union of the level-`k` intervals `I_k^(i)`.
    pub fn trap_region(&self, k: u32) -> Option<&[Interval]> {
        self.levels.iter().find(|l| l.k == k).map(|l| l.intervals.as_slice())
    }

    /// Whether `x` lies outside every modified interval.
    pub fn outside_modifications(&self, x: f64) -> bool {
        self.levels
            .iter()
            .flat_map(|l| &l.intervals)
            .all(|iv| !(iv.lo < x && x < iv.hi))
    }
}

fn locate_levels(g: &PiecewiseLinearMap, opts: &Example2Options) -> Result<Vec<Example2Level>, Example2Error> {
    let hulls = decompose_levels(g, opts.depth + 1, opts.orbit_length, opts.hull_tol, &DecomposeOptions::default())?;
    let mut levels = Vec::new();
    for k in 1..=opts.depth {
        let here = &hulls[k as usize];
        let below = &hulls[k as usize + 1];
        let parents = below.parents.as_ref().expect("levels above 0 carry parents");
        let period = 1usize << k;
        let mut points = Vec::with_capacity(period);
        let mut gaps = Vec::with_capacity(period);
        let mut eps_each = Vec::with_capacity(period);
        for i in 0..here.hulls.len() {
            let mut kids: Vec<Interval> = below
                .hulls
                .iter()
                .zip(parents)
                .filter(|(_, &p)| p == i)
                .map(|(h, _)| *h)
                .collect();
            kids.sort_by(|a, b| a.lo.total_cmp(&b.lo));
            let gap = Interval::new(kids[0].hi, kids[1].lo);
            let scan = find_periodic_points(
                g,
                period,
                &ScanOptions {
                    tol: opts.point_tol,
                    resolution: 1 << 12,
                    ..ScanOptions::default()
                }
                .restricted(gap),
            )?;
            let found: Vec<f64> = scan.points().into_iter().filter(|&x| gap.lo < x && x < gap.hi).collect();
            let x = match (found.len(), scan.plateaus.len()) {
                (1, 0) => found[0],
                (0, 0) => {
                    return Err(Example2Error::MissingPoint {
                        level: k,
                        index: i,
                        period,
                        gap_lo: gap.lo,
                        gap_hi: gap.hi,
                    })
                }
                (n, p) => {
                    return Err(Example2Error::AmbiguousPoint {
                        level: k,
                        index: i,
                        period,
                        count: n + p,
                    })
                }
            };
            eps_each.push((x - gap.lo).min(gap.hi - x));
            points.push(x);
            gaps.push(gap);
        }
        let chosen = (0..points.len())
            .min_by(|&a, &b| eps_each[a].total_cmp(&eps_each[b]))
            .unwrap();
        let eps = eps_each[chosen];
        levels.push(Example2Level {
            k,
            residuals: points.iter().map(|&x| (g.iterate(x, period) - x).abs()).collect(),
            intervals: points.iter().map(|&x| Interval::new(x - eps, x + eps)).collect(),
            points,
            eps_each,
            eps,
            chosen,
            gaps,
        });
    }
    Ok(levels)
}

fn region_pieces(g: &PiecewiseLinearMap, x: f64, eps: f64, chosen: bool) -> Vec<Piece> {
    let (l1, l0, r0, r1) = (x - eps, x - 0.8 * eps, x + 0.8 * eps, x + eps);
    let gx = g.eval(x);
    let (left_in, right_in, middle) = if chosen {
        let side = 0.8 * eps;
        let a = x - 0.4 * eps;
        let b = gx - 0.4 * eps;
        let copy = PieceKind::Copy { a, b, side };
        let sl = b + side * g.eval(0.0);
        let sr = b + side * g.eval(1.0);
        (
            sl,
            sr,
            vec![
                Piece { lo: l0, hi: a, kind: PieceKind::Shoulder { value: sl } },
                Piece { lo: a, hi: a + side, kind: copy },
                Piece { lo: a + side, hi: r0, kind: PieceKind::Shoulder { value: sr } },
            ],
        )
    } else {
        let offset = gx - x;
        (
            l0 + offset,
            r0 + offset,
            vec![Piece { lo: l0, hi: r0, kind: PieceKind::Translation { offset } }],
        )
    };
    let mut v = vec![Piece { lo: l1, hi: l0, kind: PieceKind::Join { y0: g.eval(l1), y1: left_in } }];
    v.extend(middle);
    v.push(Piece { lo: r0, hi: r1, kind: PieceKind::Join { y0: right_in, y1: g.eval(r1) } });
    v
}

/// The depth-`K` map and its construction report. Depth 0 returns `g`.
pub fn example2_map(opts: &Example2Options) -> Result<Example2, Example2Error> {
    let g = truncated_tent(opts.lambda).map_err(|e| match e {
        GalleryError::Map(m) => Example2Error::Map(m),
        other => Example2Error::Lambda(other.to_string()),
    })?;
    let levels = if opts.depth == 0 { Vec::new() } else { locate_levels(&g, opts)? };

    let mut regions: Vec<(Interval, f64, f64, bool)> = Vec::new();
    for l in &levels {
        for (i, (&x, iv)) in l.points.iter().zip(&l.intervals).enumerate() {
            regions.push((*iv, x, l.eps, i == l.chosen));
        }
    }
    regions.sort_by(|a, b| a.0.lo.total_cmp(&b.0.lo));
    for w in regions.windows(2) {
        if w[0].0.hi > w[1].0.lo {
            return Err(Example2Error::Overlap { a: w[0].0, b: w[1].0 });
        }
    }
    if let (Some(first), Some(last)) = (regions.first(), regions.last()) {
        if first.0.lo <= 0.0 || last.0.hi >= 1.0 {
            let bad = if first.0.lo <= 0.0 { first.0 } else { last.0 };
            return Err(Example2Error::Overlap { a: bad, b: Interval::new(0.0, 1.0) });
        }
    }

    let mut pieces = Vec::new();
    let mut cursor = 0.0;
    for &(iv, x, eps, chosen) in &regions {
        if iv.lo > cursor {
            pieces.push(Piece { lo: cursor, hi: iv.lo, kind: PieceKind::Base });
        }
        pieces.extend(region_pieces(&g, x, eps, chosen));
        cursor = iv.hi;
    }
    if cursor < 1.0 {
        pieces.push(Piece { lo: cursor, hi: 1.0, kind: PieceKind::Base });
    }

    let mut max_junction_gap: f64 = 0.0;
    for w in pieces.windows(2) {
        max_junction_gap = max_junction_gap.max((w[0].eval(&g, w[0].hi) - w[1].eval(&g, w[1].lo)).abs());
    }

    let mut xs: Vec<f64> = Vec::new();
    let mut ys: Vec<f64> = Vec::new();
    for p in &pieces {
        for t in p.corners(&g) {
            if xs.last().is_some_and(|&last| t <= last) {
                continue;
            }
            xs.push(t);
            ys.push(p.eval(&g, t));
        }
    }
    let map = PiecewiseLinearMap::new(xs, ys)?;

    Ok(Example2 {
        options: *opts,
        base: g,
        map,
        levels,
        pieces,
        max_junction_gap,
    })
}
