//! Exact constructors for the named maps and sequences.

mod example2;

pub use example2::{example2_map, Example2, Example2Error, Example2Level, Example2Options, Piece, PieceKind};

use serde::Serialize;
use thiserror::Error;

use crate::maps::{MapError, MapSequence, PiecewiseLinearMap};

/// Parameter of the truncated tent, stored to seven decimals.
pub const LAMBDA: f64 = 0.8249080;

#[derive(Debug, Error)]
pub enum GalleryError {
    #[error("unknown gallery entry {0:?}")]
    Unknown(String),
    #[error("lambda must lie in (1/2, 1), got {0}")]
    BadLambda(f64),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Example2(#[from] Example2Error),
}

fn pl(xs: &[f64], ys: &[f64]) -> PiecewiseLinearMap {
    PiecewiseLinearMap::new(xs.to_vec(), ys.to_vec()).expect("gallery literal is a valid map")
}

/// `0` on `[0, 1/2]`, `4x - 2` on `[1/2, 3/4]`, `1` on `[3/4, 1]`.
pub fn example1_limit() -> PiecewiseLinearMap {
    pl(&[0.0, 0.5, 0.75, 1.0], &[0.0, 0.0, 1.0, 1.0])
}

/// `f_n`: the limit map plus a spike of height 1 supported on
/// `[0, 1/(4·2^n)]` with its apex at `1/(8·2^n)`.
///
/// Once `2^-(n+3)` underflows the spike has no representable support and
/// the limit map is returned.
pub fn example1_map(n: usize) -> PiecewiseLinearMap {
    let apex = if n > 1100 { 0.0 } else { 0.5f64.powi(n as i32 + 3) };
    if apex == 0.0 {
        return example1_limit();
    }
    pl(
        &[0.0, apex, 2.0 * apex, 0.5, 0.75, 1.0],
        &[0.0, 1.0, 0.0, 0.0, 1.0, 1.0],
    )
}

/// `τ(x) = 1 - |2x - 1|`.
pub fn tent() -> PiecewiseLinearMap {
    pl(&[0.0, 0.5, 1.0], &[0.0, 1.0, 0.0])
}

fn tent_eval(x: f64) -> f64 {
    1.0 - (2.0 * x - 1.0).abs()
}

/// `τ²(λ)` on `[0, τ(λ)]` and `τ` on `[τ(λ), 1]`.
pub fn truncated_tent(lambda: f64) -> Result<PiecewiseLinearMap, GalleryError> {
    if !(lambda > 0.5 && lambda < 1.0) {
        return Err(GalleryError::BadLambda(lambda));
    }
    let t1 = tent_eval(lambda);
    let t2 = tent_eval(t1);
    Ok(PiecewiseLinearMap::new(
        vec![0.0, t1, 0.5, 1.0],
        vec![t2, t2, 1.0, 0.0],
    )?)
}

/// Map with two absorbing flat ends and a segment of fixed points
/// `[2/5, 3/5]` on the diagonal (vertices read off the unit square scaled by 5).
pub fn remark3_map() -> PiecewiseLinearMap {
    pl(&[0.0, 0.2, 0.4, 0.6, 0.8, 1.0], &[0.0, 0.0, 0.4, 0.6, 1.0, 1.0])
}

/// Affine contraction through `(0, 1/4)` and `(1, 3/4)`; attracting fixed point `1/2`.
pub fn contraction() -> PiecewiseLinearMap {
    pl(&[0.0, 1.0], &[0.25, 0.75])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryKind {
    Map,
    Sequence,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct GalleryEntry {
    pub name: &'static str,
    pub kind: EntryKind,
    pub description: &'static str,
    pub params: &'static [&'static str],
}

const ENTRIES: &[GalleryEntry] = &[
    GalleryEntry {
        name: "example1",
        kind: EntryKind::Sequence,
        description: "spiked maps f_n converging pointwise, not uniformly, to example1-limit",
        params: &[],
    },
    GalleryEntry {
        name: "example1-limit",
        kind: EntryKind::Map,
        description: "0 on [0,1/2], 4x-2 on [1/2,3/4], 1 on [3/4,1]",
        params: &[],
    },
    GalleryEntry {
        name: "tent",
        kind: EntryKind::Map,
        description: "full tent 1-|2x-1|",
        params: &[],
    },
    GalleryEntry {
        name: "truncated-tent",
        kind: EntryKind::Map,
        description: "tent flattened to tau^2(lambda) on [0, tau(lambda)]; type 2^inf",
        params: &["lambda"],
    },
    GalleryEntry {
        name: "remark3",
        kind: EntryKind::Map,
        description: "two absorbing ends and an interval of fixed points [2/5, 3/5]",
        params: &[],
    },
    GalleryEntry {
        name: "example2",
        kind: EntryKind::Map,
        description: "truncated tent modified on the gaps around its period-2^k orbits, k = 1..depth",
        params: &["depth", "lambda"],
    },
    GalleryEntry {
        name: "contraction",
        kind: EntryKind::Map,
        description: "x/2 + 1/4, attracting fixed point 1/2",
        params: &[],
    },
    GalleryEntry {
        name: "contraction-decay",
        kind: EntryKind::Sequence,
        description: "contraction shifted up by amplitude * rate^n (defaults 0.2, 0.5), clamped into [0,1]",
        params: &["amplitude", "rate"],
    },
];

pub fn entries() -> &'static [GalleryEntry] {
    ENTRIES
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BuildParams {
    pub lambda: Option<f64>,
    pub depth: Option<u32>,
    pub amplitude: Option<f64>,
    pub rate: Option<f64>,
}

#[derive(Debug, Clone)]
pub enum GalleryItem {
    Map(PiecewiseLinearMap),
    Sequence(MapSequence),
}

impl GalleryItem {
    /// Maps become constant sequences.
    pub fn into_sequence(self) -> MapSequence {
        match self {
            GalleryItem::Map(f) => MapSequence::constant(f),
            GalleryItem::Sequence(s) => s,
        }
    }
}

pub fn build(name: &str, params: &BuildParams) -> Result<GalleryItem, GalleryError> {
    let lambda = params.lambda.unwrap_or(LAMBDA);
    Ok(match name {
        "example1" => GalleryItem::Sequence(MapSequence::example1()),
        "example1-limit" => GalleryItem::Map(example1_limit()),
        "tent" => GalleryItem::Map(tent()),
        "truncated-tent" => GalleryItem::Map(truncated_tent(lambda)?),
        "remark3" => GalleryItem::Map(remark3_map()),
        "example2" => {
            let opts = Example2Options {
                depth: params.depth.unwrap_or(3),
                lambda,
                ..Example2Options::default()
            };
            GalleryItem::Map(example2_map(&opts)?.map)
        }
        "contraction" => GalleryItem::Map(contraction()),
        "contraction-decay" => GalleryItem::Sequence(MapSequence::additive_decay(
            contraction(),
            params.amplitude.unwrap_or(0.2),
            params.rate.unwrap_or(0.5),
        )),
        other => return Err(GalleryError::Unknown(other.to_string())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example1_limit_values() {
        let f = example1_limit();
        assert_eq!(f.eval(0.5), 0.0);
        assert_eq!(f.eval(0.75), 1.0);
        assert_eq!(f.eval(1.0), 1.0);
    }

    #[test]
    fn example1_sequence_values() {
        let f0 = example1_map(0);
        assert_eq!(f0.eval(0.25), 0.0);
        assert_eq!(f0.eval(1.0 / 16.0), 0.5);
        assert_eq!(f0.eval(1.0 / 8.0), 1.0);
        for n in [0, 1, 5, 40] {
            assert_eq!(example1_map(n).eval(0.5), 0.0);
        }
        assert_eq!(example1_map(5000), example1_limit());
    }

    #[test]
    fn example1_is_not_uniformly_convergent() {
        let f = example1_limit();
        for n in 0..=10 {
            assert_eq!(example1_map(n).sup_distance(&f), 1.0);
        }
        // pointwise: f_n(x) = f(x) once 1/(4·2^n) < x
        for x in [0.01, 0.1, 0.3] {
            let n0 = (0..).find(|&n| 0.25 * 0.5f64.powi(n) < x).unwrap() as usize;
            for n in n0..n0 + 20 {
                assert_eq!(example1_map(n).eval(x), f.eval(x));
            }
        }
    }

    #[test]
    fn truncated_tent_values() {
        let g = truncated_tent(LAMBDA).unwrap();
        let t1 = 2.0 - 2.0 * LAMBDA;
        let t2 = tent_eval(t1);
        assert!((t2 - 0.700368).abs() < 1e-12);
        assert_eq!(g.eval(0.2), t2);
        assert!((g.eval(0.9) - 0.2).abs() < 1e-15);
        assert_eq!(g.eval(t1), t2);
        let tau = tent();
        for i in 0..=1000 {
            let x = i as f64 / 1000.0;
            assert!(g.eval(x) >= tau.eval(x) - 1e-15);
            if x >= t1 {
                assert!((g.eval(x) - tau.eval(x)).abs() < 1e-15);
            }
        }
        // attained at x = 0, where τ = 0 and g = τ²(λ)
        assert!((tau.sup_distance(&g) - t2).abs() < 1e-12);
        assert!(matches!(truncated_tent(0.5), Err(GalleryError::BadLambda(_))));
        assert!(matches!(truncated_tent(1.0), Err(GalleryError::BadLambda(_))));
    }

    #[test]
    fn remark3_values() {
        let f = remark3_map();
        assert_eq!(f.eval(0.5), 0.5);
        assert_eq!(f.eval(0.1), 0.0);
        assert_eq!(f.eval(0.9), 1.0);
    }

    #[test]
    fn build_by_name() {
        for e in entries() {
            let item = build(e.name, &BuildParams::default()).unwrap();
            match (e.kind, item) {
                (EntryKind::Map, GalleryItem::Map(_)) | (EntryKind::Sequence, GalleryItem::Sequence(_)) => {}
                (k, _) => panic!("{} built as the wrong kind {k:?}", e.name),
            }
        }
        assert!(matches!(build("logistic", &BuildParams::default()), Err(GalleryError::Unknown(_))));
    }
}
