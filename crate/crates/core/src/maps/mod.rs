//! Continuous piecewise-linear self-maps of the unit interval.
//!
//! A map is stored as its breakpoints and the ordinates at those
//! breakpoints. Arguments outside `[0, 1]` are clamped before evaluation,
//! so every map extends to the whole real line with `g(R \ I) ⊆ g(∂I)`.

mod sequence;

pub use sequence::{MapSequence, SequenceKind};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MapError {
    #[error("a map needs at least two breakpoints, got {0}")]
    TooFewBreakpoints(usize),
    #[error("{breakpoints} breakpoints but {values} values")]
    LengthMismatch { breakpoints: usize, values: usize },
    #[error("breakpoints must start at 0 and end at 1, got [{first}, {last}]")]
    BadEndpoints { first: f64, last: f64 },
    #[error("breakpoints not strictly increasing at index {0}")]
    NotIncreasing(usize),
    #[error("value {value} at index {index} is outside [0, 1]")]
    ValueOutOfRange { index: usize, value: f64 },
    #[error("non-finite number at index {0}")]
    NonFinite(usize),
}

/// Clamp a real argument into the unit interval.
#[inline]
pub fn clamp_unit(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

/// The grid `{0, 1/q, …, 1}` with round-to-nearest.
///
/// Iterating `x ↦ snap(f(x))` gives a deterministic pseudo-orbit with
/// per-step error at most `1/(2q)`. For odd `q` the grid is invariant under
/// maps with integer slopes and dyadic vertices such as the tent, whose
/// plain `f64` orbits collapse onto 0 after about 55 steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lattice(pub u64);

impl Lattice {
    #[inline]
    pub fn snap(&self, x: f64) -> f64 {
        let q = self.0 as f64;
        (clamp_unit(x) * q).round() / q
    }
}

/// A closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "empty interval [{lo}, {hi}]");
        Self { lo, hi }
    }

    #[inline]
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    /// `self` grown by `r` on both sides.
    pub fn inflate(&self, r: f64) -> Self {
        Self::new(self.lo - r, self.hi + r)
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }
}

/// Continuous piecewise-linear map `[0, 1] → [0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MapLiteral", into = "MapLiteral")]
pub struct PiecewiseLinearMap {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

/// Flat serialized form `{breakpoints: [...], values: [...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapLiteral {
    pub breakpoints: Vec<f64>,
    pub values: Vec<f64>,
}

impl TryFrom<MapLiteral> for PiecewiseLinearMap {
    type Error = MapError;
    fn try_from(lit: MapLiteral) -> Result<Self, MapError> {
        Self::new(lit.breakpoints, lit.values)
    }
}

impl From<PiecewiseLinearMap> for MapLiteral {
    fn from(map: PiecewiseLinearMap) -> Self {
        MapLiteral {
            breakpoints: map.xs,
            values: map.ys,
        }
    }
}

impl PiecewiseLinearMap {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self, MapError> {
        if breakpoints.len() != values.len() {
            return Err(MapError::LengthMismatch {
                breakpoints: breakpoints.len(),
                values: values.len(),
            });
        }
        if breakpoints.len() < 2 {
            return Err(MapError::TooFewBreakpoints(breakpoints.len()));
        }
        for (i, (x, y)) in breakpoints.iter().zip(&values).enumerate() {
            if !x.is_finite() || !y.is_finite() {
                return Err(MapError::NonFinite(i));
            }
            if !(0.0..=1.0).contains(y) {
                return Err(MapError::ValueOutOfRange { index: i, value: *y });
            }
        }
        let (first, last) = (breakpoints[0], breakpoints[breakpoints.len() - 1]);
        if first != 0.0 || last != 1.0 {
            return Err(MapError::BadEndpoints { first, last });
        }
        if let Some(i) = breakpoints.windows(2).position(|w| w[0] >= w[1]) {
            return Err(MapError::NotIncreasing(i + 1));
        }
        Ok(Self {
            xs: breakpoints,
            ys: values,
        })
    }

    /// Build from `(x, y)` vertices.
    pub fn from_points(points: &[(f64, f64)]) -> Result<Self, MapError> {
        let (xs, ys) = points.iter().copied().unzip();
        Self::new(xs, ys)
    }

    pub fn constant(c: f64) -> Result<Self, MapError> {
        Self::new(vec![0.0, 1.0], vec![c, c])
    }

    pub fn identity() -> Self {
        Self {
            xs: vec![0.0, 1.0],
            ys: vec![0.0, 1.0],
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[f64] {
        &self.ys
    }

    pub fn vertices(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }

    /// Value at `clamp(x)`.
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        interpolate(&self.xs, &self.ys, x)
    }

    /// `n`-fold iterate; `n = 0` gives `clamp(x)`.
    pub fn iterate(&self, x: f64, n: usize) -> f64 {
        (0..n).fold(clamp_unit(x), |y, _| self.eval(y))
    }

    /// Slope of segment `i` (between breakpoints `i` and `i + 1`).
    pub fn segment_slope(&self, i: usize) -> f64 {
        (self.ys[i + 1] - self.ys[i]) / (self.xs[i + 1] - self.xs[i])
    }

    pub fn max_abs_slope(&self) -> f64 {
        (0..self.xs.len() - 1)
            .map(|i| self.segment_slope(i).abs())
            .fold(0.0, f64::max)
    }

    /// Exact sup-norm distance on `[0, 1]`.
    ///
    /// The difference of two PL maps is PL on the union of their breakpoint
    /// sets, so the maximum is attained at one of those abscissas.
    pub fn sup_distance(&self, other: &Self) -> f64 {
        merge_breakpoints(&self.xs, &other.xs)
            .into_iter()
            .map(|x| (self.eval(x) - other.eval(x)).abs())
            .fold(0.0, f64::max)
    }

    /// Exact image of `[lo, hi] ∩ [0, 1]`.
    pub fn image(&self, interval: Interval) -> Interval {
        let lo = clamp_unit(interval.lo);
        let hi = clamp_unit(interval.hi);
        let (mut min, mut max) = (self.eval(lo), self.eval(lo));
        let inner = self.xs.iter().copied().filter(|&x| lo < x && x < hi);
        for x in inner.chain(std::iter::once(hi)) {
            let y = self.eval(x);
            min = min.min(y);
            max = max.max(y);
        }
        Interval::new(min, max)
    }

    /// The map `x ↦ clamp(self(x) + shift)`, built exactly with the extra
    /// breakpoints where the shifted graph crosses 0 or 1.
    pub fn shifted(&self, shift: f64) -> Self {
        let mut xs = Vec::with_capacity(self.xs.len() + 2);
        let mut ys = Vec::with_capacity(self.xs.len() + 2);
        let raw = |i: usize| self.ys[i] + shift;
        for i in 0..self.xs.len() {
            if i > 0 {
                let (a, b) = (raw(i - 1), raw(i));
                for level in [0.0, 1.0] {
                    if (a - level) * (b - level) < 0.0 {
                        let t = (level - a) / (b - a);
                        let x = self.xs[i - 1] + t * (self.xs[i] - self.xs[i - 1]);
                        if x > *xs.last().unwrap() && x < self.xs[i] {
                            xs.push(x);
                            ys.push(level);
                        }
                    }
                }
            }
            xs.push(self.xs[i]);
            ys.push(clamp_unit(raw(i)));
        }
        Self { xs, ys }
    }
}

/// Sorted union of two ascending breakpoint lists.
pub(crate) fn merge_breakpoints(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = a.iter().chain(b).copied().collect();
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// Linear interpolation of `(xs, ys)` at `clamp(x)`; `xs` ascending from 0
/// to 1. The result is clamped into the segment's ordinate range so
/// rounding can never leave `[0, 1]`.
#[inline]
pub(crate) fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let x = clamp_unit(x);
    let n = xs.len();
    let i = xs.partition_point(|&b| b <= x).clamp(1, n - 1) - 1;
    let (x0, x1, y0, y1) = (xs[i], xs[i + 1], ys[i], ys[i + 1]);
    if x == x0 {
        return y0;
    }
    if x == x1 {
        return y1;
    }
    let y = y0 + (y1 - y0) * ((x - x0) / (x1 - x0));
    y.clamp(y0.min(y1), y0.max(y1))
}
