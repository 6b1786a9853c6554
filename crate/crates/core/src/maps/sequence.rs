use std::borrow::Cow;
use std::fmt;
use std::sync::Arc;

use super::{clamp_unit, PiecewiseLinearMap};
use crate::gallery;

type Generator = Arc<dyn Fn(usize) -> PiecewiseLinearMap + Send + Sync>;

/// How the maps `f_n` of a sequence are produced.
#[derive(Clone)]
pub enum SequenceKind {
    /// `f_n = f` for every `n`.
    Constant(PiecewiseLinearMap),
    /// The spiked maps converging pointwise but not uniformly to the
    /// three-branch limit with the attracting fixed point 0.
    Example1 { limit: PiecewiseLinearMap },
    /// `f_n(x) = clamp(f(x) + amplitude * rate^n)`.
    AdditiveDecay {
        limit: PiecewiseLinearMap,
        amplitude: f64,
        rate: f64,
    },
    /// Caller-supplied deterministic generator.
    Custom {
        limit: PiecewiseLinearMap,
        generator: Generator,
    },
}

/// An indexed family `f_0, f_1, ...` with a declared limit map.
///
/// `tail_shift(k)` drops the first `k` maps without copying anything.
#[derive(Clone)]
pub struct MapSequence {
    kind: SequenceKind,
    offset: usize,
}

impl fmt::Debug for MapSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MapSequence")
            .field("kind", &self.kind_tag())
            .field("offset", &self.offset)
            .finish()
    }
}

impl MapSequence {
    pub fn constant(map: PiecewiseLinearMap) -> Self {
        Self::from_kind(SequenceKind::Constant(map))
    }

    pub fn example1() -> Self {
        Self::from_kind(SequenceKind::Example1 {
            limit: gallery::example1_limit(),
        })
    }

    pub fn additive_decay(limit: PiecewiseLinearMap, amplitude: f64, rate: f64) -> Self {
        Self::from_kind(SequenceKind::AdditiveDecay {
            limit,
            amplitude,
            rate,
        })
    }

    /// `generator` must be deterministic: the same `n` always yields the same map.
    pub fn custom<G>(limit: PiecewiseLinearMap, generator: G) -> Self
    where
        G: Fn(usize) -> PiecewiseLinearMap + Send + Sync + 'static,
    {
        Self::from_kind(SequenceKind::Custom {
            limit,
            generator: Arc::new(generator),
        })
    }

    fn from_kind(kind: SequenceKind) -> Self {
        Self { kind, offset: 0 }
    }

    pub fn kind(&self) -> &SequenceKind {
        &self.kind
    }

    pub fn kind_tag(&self) -> &'static str {
        match self.kind {
            SequenceKind::Constant(_) => "constant",
            SequenceKind::Example1 { .. } => "example1",
            SequenceKind::AdditiveDecay { .. } => "additive-decay",
            SequenceKind::Custom { .. } => "custom",
        }
    }

    /// Number of leading maps already removed from the underlying family.
    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn limit(&self) -> &PiecewiseLinearMap {
        match &self.kind {
            SequenceKind::Constant(f) => f,
            SequenceKind::Example1 { limit }
            | SequenceKind::AdditiveDecay { limit, .. }
            | SequenceKind::Custom { limit, .. } => limit,
        }
    }

    /// The map applied at step `n` of this (possibly shifted) sequence.
    pub fn generator(&self, n: usize) -> Cow<'_, PiecewiseLinearMap> {
        let n = n + self.offset;
        match &self.kind {
            SequenceKind::Constant(f) => Cow::Borrowed(f),
            SequenceKind::Example1 { .. } => Cow::Owned(gallery::example1_map(n)),
            SequenceKind::AdditiveDecay {
                limit,
                amplitude,
                rate,
            } => {
                let shift = amplitude * rate.powi(n.min(i32::MAX as usize) as i32);
                if shift == 0.0 {
                    Cow::Borrowed(limit)
                } else {
                    Cow::Owned(limit.shifted(shift))
                }
            }
            SequenceKind::Custom { generator, .. } => Cow::Owned(generator(n)),
        }
    }

    /// `f_{k,∞}`: the same family with its first `k` maps removed.
    pub fn tail_shift(&self, k: usize) -> Self {
        Self {
            kind: self.kind.clone(),
            offset: self.offset + k,
        }
    }

    /// The maps used at steps `0..len`, materialized once.
    pub fn window(&self, len: usize) -> Vec<Cow<'_, PiecewiseLinearMap>> {
        (0..len).map(|n| self.generator(n)).collect()
    }

    /// `f_{k+j-1} ∘ … ∘ f_k (clamp(x))`; `j = 0` gives `clamp(x)`.
    pub fn compose_prefix(&self, k: usize, j: usize, x: f64) -> f64 {
        (k..k + j).fold(clamp_unit(x), |y, n| self.generator(n).eval(y))
    }

    /// `max_{n < len} ||f_n - f||`.
    pub fn sup_distance_to_limit(&self, len: usize) -> f64 {
        (0..len)
            .map(|n| self.generator(n).sup_distance(self.limit()))
            .fold(0.0, f64::max)
    }
}
