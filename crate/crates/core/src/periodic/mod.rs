//! Periodic structure of a single interval map: periodic points and
//! intervals of periodic points, attractivity, the cyclic hull
//! decomposition of a `2^∞`-type attractor, shadowing of perturbed
//! trajectories by periodic orbits, and a Li-Yorke pair detector.

mod liyorke;
mod omega;
mod shadow;

pub use liyorke::{liyorke_scan, random_pairs, LiYorkeError, LiYorkeOptions, LiYorkeReport, PairStat, DEFAULT_LATTICE};
pub use omega::{decompose_omega, decompose_levels, DecomposeError, DecomposeOptions, IntervalDecomposition};
pub use shadow::{shadow_test, shadowing_candidates, ShadowError, ShadowMatch, ShadowResult};

use serde::Serialize;
use thiserror::Error;

use crate::maps::{Interval, PiecewiseLinearMap};

#[derive(Debug, Error, PartialEq)]
pub enum PeriodicError {
    #[error("period must be at least 1")]
    ZeroPeriod,
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error("scan resolution must be at least 2 cells, got {0}")]
    BadResolution(usize),
    #[error("search domain [{0}, {1}] is not a sub-interval of [0, 1]")]
    BadDomain(f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Attractivity {
    Attractive,
    Repelling,
    Neutral,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodicOrbit {
    pub period: usize,
    /// Cyclic order, starting from the leftmost point.
    pub points: Vec<f64>,
    pub label: Attractivity,
    /// Central finite difference of `f^period` at `points[0]`.
    pub multiplier: f64,
    /// False when the orbit sits inside an interval of periodic points.
    pub isolated: bool,
    /// Probe samples disagreed with the multiplier test.
    pub inconclusive: bool,
}

/// A maximal interval on which `f^period(x) = x` (within the flat tolerance).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Plateau {
    pub period: usize,
    pub interval: Interval,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodicScan {
    pub period: usize,
    pub orbits: Vec<PeriodicOrbit>,
    pub plateaus: Vec<Plateau>,
    /// Set when roots may have been missed: two roots closer than two grid
    /// cells, or a near-tangency of `f^n - id` without a sign change.
    pub possible_misses: bool,
}

impl PeriodicScan {
    /// All orbit points, sorted.
    pub fn points(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = self.orbits.iter().flat_map(|o| o.points.iter().copied()).collect();
        pts.sort_by(f64::total_cmp);
        pts
    }
}

/// Sampling used to label a periodic orbit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeOptions {
    pub radius: f64,
    pub steps: usize,
    pub samples: usize,
    pub converge_tol: f64,
    pub fd_step: f64,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        Self {
            radius: 1e-3,
            steps: 2000,
            samples: 16,
            converge_tol: 1e-9,
            fd_step: 1e-7,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanOptions {
    pub tol: f64,
    /// Number of grid cells over `domain`.
    pub resolution: usize,
    pub domain: Interval,
    /// `|f^n(x) - x|` at or below this counts as zero.
    pub flat_tol: f64,
    pub probe: ProbeOptions,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            resolution: 1 << 14,
            domain: Interval::new(0.0, 1.0),
            flat_tol: 1e-12,
            probe: ProbeOptions::default(),
        }
    }
}

impl ScanOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }

    pub fn restricted(self, domain: Interval) -> Self {
        Self { domain, ..self }
    }
}

/// Bisection for a sign change of `g` on `[a, b]`; stops when the bracket
/// is no wider than `tol` and returns its midpoint.
pub fn bisect<G: Fn(f64) -> f64>(g: G, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let mut ga = g(a);
    while b - a > tol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let gm = g(m);
        if gm == 0.0 {
            return m;
        }
        if (gm < 0.0) == (ga < 0.0) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Boundary between a point where `inside` holds and one where it fails.
fn bisect_predicate<P: Fn(f64) -> bool>(inside: P, mut yes: f64, mut no: f64, tol: f64) -> f64 {
    while (no - yes).abs() > tol {
        let m = 0.5 * (yes + no);
        if m == yes || m == no {
            break;
        }
        if inside(m) {
            yes = m;
        } else {
            no = m;
        }
    }
    yes
}

fn proper_divisors(n: usize) -> impl Iterator<Item = usize> {
    (1..n).filter(move |d| n % d == 0)
}

/// Whether `x` is (numerically) a periodic point of some proper divisor of `n`.
fn has_smaller_period(f: &PiecewiseLinearMap, x: f64, n: usize, tol: f64) -> bool {
    proper_divisors(n).any(|d| (f.iterate(x, d) - x).abs() < 10.0 * tol)
}

/// Periodic points of exact period `n` and plateaus of period-`n` points.
pub fn find_periodic_points(
    f: &PiecewiseLinearMap,
    n: usize,
    opts: &ScanOptions,
) -> Result<PeriodicScan, PeriodicError> {
    if n == 0 {
        return Err(PeriodicError::ZeroPeriod);
    }
    if !(opts.tol > 0.0) {
        return Err(PeriodicError::BadTolerance(opts.tol));
    }
    if opts.resolution < 2 {
        return Err(PeriodicError::BadResolution(opts.resolution));
    }
    let Interval { lo: a, hi: b } = opts.domain;
    if !(0.0 <= a && a < b && b <= 1.0) {
        return Err(PeriodicError::BadDomain(a, b));
    }

    let g = |x: f64| f.iterate(x, n) - x;
    let is_zero = |x: f64| g(x).abs() <= opts.flat_tol;
    let cells = opts.resolution;
    let cell = (b - a) / cells as f64;
    let xs: Vec<f64> = (0..=cells).map(|i| if i == cells { b } else { a + (b - a) * (i as f64 / cells as f64) }).collect();
    let gs: Vec<f64> = xs.iter().map(|&x| g(x)).collect();
    let zero: Vec<bool> = gs.iter().map(|v| v.abs() <= opts.flat_tol).collect();

    let mut roots = Vec::new();
    let mut plateaus = Vec::new();
    let mut i = 0;
    while i <= cells {
        if zero[i] {
            let start = i;
            while i < cells && zero[i + 1] {
                i += 1;
            }
            let end = i;
            if end - start >= 2 {
                let lo = if start > 0 {
                    bisect_predicate(is_zero, xs[start], xs[start - 1], opts.tol)
                } else {
                    xs[start]
                };
                let hi = if end < cells {
                    bisect_predicate(is_zero, xs[end], xs[end + 1], opts.tol)
                } else {
                    xs[end]
                };
                let interval = Interval::new(lo, hi);
                if !has_smaller_period(f, interval.midpoint(), n, opts.tol) {
                    plateaus.push(Plateau { period: n, interval });
                }
            } else {
                roots.extend(&xs[start..=end]);
            }
        } else if i < cells && !zero[i + 1] && (gs[i] < 0.0) != (gs[i + 1] < 0.0) {
            roots.push(bisect(g, xs[i], xs[i + 1], opts.tol));
        }
        i += 1;
    }

    let lipschitz = f.max_abs_slope().max(1.0).powi(n as i32);
    let mut possible_misses = (1..cells).any(|i| {
        let (l, m, r) = (gs[i - 1], gs[i], gs[i + 1]);
        !zero[i - 1]
            && !zero[i]
            && !zero[i + 1]
            && (l < 0.0) == (m < 0.0)
            && (m < 0.0) == (r < 0.0)
            && m.abs() < l.abs()
            && m.abs() < r.abs()
            && m.abs() <= (1.0 + lipschitz) * cell
    });

    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|x, y| (*x - *y).abs() < 10.0 * opts.tol);
    roots.retain(|&x| !has_smaller_period(f, x, n, opts.tol));
    if roots.windows(2).any(|w| w[1] - w[0] < 2.0 * cell) {
        possible_misses = true;
    }

    let match_tol = (10.0 * opts.tol * lipschitz).min(1e-3).max(10.0 * opts.tol);
    let mut used = vec![false; roots.len()];
    let mut orbits = Vec::new();
    for r in 0..roots.len() {
        if used[r] {
            continue;
        }
        used[r] = true;
        let mut points = vec![roots[r]];
        let mut y = roots[r];
        for _ in 1..n {
            y = f.eval(y);
            // prefer the refined root over the propagated iterate
            let nearest = (0..roots.len())
                .filter(|&j| !used[j])
                .min_by(|&p, &q| (roots[p] - y).abs().total_cmp(&(roots[q] - y).abs()));
            match nearest {
                Some(j) if (roots[j] - y).abs() <= match_tol => {
                    used[j] = true;
                    y = roots[j];
                }
                _ => {}
            }
            points.push(y);
        }
        let start = (0..n).min_by(|&p, &q| points[p].total_cmp(&points[q])).unwrap();
        points.rotate_left(start);
        let isolated = !plateaus.iter().any(|p: &Plateau| p.interval.contains(points[0]));
        orbits.push(orbit_with_label(f, n, points, isolated, &opts.probe));
    }

    Ok(PeriodicScan {
        period: n,
        orbits,
        plateaus,
        possible_misses,
    })
}

/// Label a candidate orbit and attach its multiplier.
pub(crate) fn orbit_with_label(
    f: &PiecewiseLinearMap,
    period: usize,
    points: Vec<f64>,
    isolated: bool,
    probe: &ProbeOptions,
) -> PeriodicOrbit {
    let mut orbit = PeriodicOrbit {
        period,
        points,
        label: Attractivity::Neutral,
        multiplier: f64::NAN,
        isolated,
        inconclusive: false,
    };
    let c = classify_attractivity(f, &orbit, probe);
    orbit.label = c.label;
    orbit.multiplier = c.multiplier;
    orbit.inconclusive = c.inconclusive;
    orbit
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Classification {
    pub label: Attractivity,
    pub multiplier: f64,
    pub inconclusive: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Fate {
    Converged,
    Left,
    Stayed,
}

/// Attractivity by the orbit-convergence definition: probe points near
/// `points[0]` are iterated under `f^period`. The finite-difference
/// multiplier is a cross-check; `|multiplier| ≈ 1` is always neutral.
pub fn classify_attractivity(
    f: &PiecewiseLinearMap,
    orbit: &PeriodicOrbit,
    probe: &ProbeOptions,
) -> Classification {
    let x = orbit.points[0];
    let n = orbit.period;
    let multiplier = {
        let (l, r) = ((x - probe.fd_step).max(0.0), (x + probe.fd_step).min(1.0));
        (f.iterate(r, n) - f.iterate(l, n)) / (r - l)
    };

    let half = (probe.samples / 2).max(1);
    let fates: Vec<Fate> = (1..=half)
        .flat_map(|j| {
            let d = probe.radius * j as f64 / half as f64;
            [x - d, x + d]
        })
        .filter(|&s| (0.0..=1.0).contains(&s) && s != x)
        .map(|mut y| {
            // a probe that leaves is not followed further: plain f64 tent
            // orbits collapse onto 0 and would read as converging
            for _ in 0..probe.steps {
                y = f.iterate(y, n);
                if (y - x).abs() > probe.radius {
                    return Fate::Left;
                }
                if (y - x).abs() <= probe.converge_tol {
                    return Fate::Converged;
                }
            }
            Fate::Stayed
        })
        .collect();

    let sampled = if !fates.is_empty() && fates.iter().all(|&s| s == Fate::Converged) {
        Attractivity::Attractive
    } else if !fates.is_empty() && fates.iter().all(|&s| s == Fate::Left) {
        Attractivity::Repelling
    } else {
        Attractivity::Neutral
    };
    let by_multiplier = if (multiplier.abs() - 1.0).abs() <= 1e-6 {
        Attractivity::Neutral
    } else if multiplier.abs() < 1.0 {
        Attractivity::Attractive
    } else {
        Attractivity::Repelling
    };
    let label = if by_multiplier == Attractivity::Neutral {
        Attractivity::Neutral
    } else {
        sampled
    };
    Classification {
        label,
        multiplier,
        inconclusive: sampled != by_multiplier,
    }
}
