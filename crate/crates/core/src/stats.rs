use serde::Serialize;

/// A Monte Carlo proportion with its Wald standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Proportion {
    pub estimate: f64,
    pub stderr: f64,
    pub successes: u64,
    pub trials: u64,
}

impl Proportion {
    pub fn from_counts(successes: u64, trials: u64) -> Self {
        assert!(trials > 0, "proportion over zero trials");
        let p = successes as f64 / trials as f64;
        Self {
            estimate: p,
            stderr: (p * (1.0 - p) / trials as f64).sqrt(),
            successes,
            trials,
        }
    }

    /// Whether `value` lies within `k` standard errors of the estimate,
    /// using the standard error implied by `value` itself (so a point mass
    /// at the true value still counts as agreement).
    pub fn agrees_with(&self, value: f64, k: f64) -> bool {
        let se = (value * (1.0 - value) / self.trials as f64).sqrt().max(self.stderr);
        (self.estimate - value).abs() <= k * se
    }
}

/// Count / mean / max summary of a non-negative sample.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Summary {
    pub count: u64,
    pub mean: f64,
    pub max: f64,
}

impl Summary {
    pub fn push(&mut self, v: f64) {
        self.count += 1;
        self.mean += (v - self.mean) / self.count as f64;
        self.max = if self.count == 1 { v } else { self.max.max(v) };
    }

    /// Combine two summaries as if all samples had been pushed into one.
    pub fn merge(self, other: Self) -> Self {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let count = self.count + other.count;
        Self {
            count,
            mean: (self.mean * self.count as f64 + other.mean * other.count as f64) / count as f64,
            max: self.max.max(other.max),
        }
    }
}
