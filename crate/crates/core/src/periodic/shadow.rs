use serde::Serialize;
use thiserror::Error;

use super::{find_periodic_points, orbit_with_label, PeriodicError, PeriodicOrbit, ScanOptions};
use crate::maps::PiecewiseLinearMap;

#[derive(Debug, Error, PartialEq)]
pub enum ShadowError {
    #[error("window [{start}, {end}] is outside the trajectory's 0..={last} steps")]
    BadWindow { start: usize, end: usize, last: usize },
    #[error("no candidate orbits")]
    NoCandidates,
    #[error(transparent)]
    Periodic(#[from] PeriodicError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShadowMatch {
    /// Index into the candidate list.
    pub candidate: usize,
    /// Step 0 of the trajectory is paired with `points[phase]`.
    pub phase: usize,
    pub sup_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShadowResult {
    pub passed: bool,
    pub best: ShadowMatch,
}

/// Best periodic itinerary over `window` (inclusive step range): the
/// candidate and phase minimizing `max_n |X_n - f^n(p)|`. Passes when that
/// sup is below `eps`.
pub fn shadow_test(
    states: &[f64],
    candidates: &[PeriodicOrbit],
    eps: f64,
    window: (usize, usize),
) -> Result<ShadowResult, ShadowError> {
    let (start, end) = window;
    if states.is_empty() || start > end || end >= states.len() {
        return Err(ShadowError::BadWindow {
            start,
            end,
            last: states.len().saturating_sub(1),
        });
    }
    let mut best: Option<ShadowMatch> = None;
    for (ci, orbit) in candidates.iter().enumerate() {
        let n = orbit.period;
        for phase in 0..n {
            let mut sup: f64 = 0.0;
            for (t, x) in states.iter().enumerate().take(end + 1).skip(start) {
                sup = sup.max((x - orbit.points[(phase + t) % n]).abs());
                if best.is_some_and(|b| sup >= b.sup_error) {
                    break;
                }
            }
            if best.map_or(true, |b| sup < b.sup_error) {
                best = Some(ShadowMatch {
                    candidate: ci,
                    phase,
                    sup_error: sup,
                });
            }
        }
    }
    let best = best.ok_or(ShadowError::NoCandidates)?;
    Ok(ShadowResult {
        passed: best.sup_error < eps,
        best,
    })
}

/// Periodic orbits of `f` with period `1..=max_period`, plus the orbits of
/// each plateau's endpoints and midpoint.
pub fn shadowing_candidates(
    f: &PiecewiseLinearMap,
    max_period: usize,
    opts: &ScanOptions,
) -> Result<Vec<PeriodicOrbit>, ShadowError> {
    let mut out = Vec::new();
    for n in 1..=max_period {
        let scan = find_periodic_points(f, n, opts)?;
        out.extend(scan.orbits);
        for p in scan.plateaus {
            let iv = p.interval;
            for rep in [iv.lo, iv.midpoint(), iv.hi] {
                let points = (0..n).map(|j| f.iterate(rep, j)).collect();
                out.push(orbit_with_label(f, n, points, false, &opts.probe));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::periodic::Attractivity;

    fn fixed(x: f64) -> PeriodicOrbit {
        PeriodicOrbit {
            period: 1,
            points: vec![x],
            label: Attractivity::Attractive,
            multiplier: 0.0,
            isolated: true,
            inconclusive: false,
        }
    }

    #[test]
    fn exact_orbit_shadows_itself() {
        let two = PeriodicOrbit {
            period: 2,
            points: vec![0.4, 0.8],
            ..fixed(0.0)
        };
        let states: Vec<f64> = (0..20).map(|t| if t % 2 == 0 { 0.8 } else { 0.4 }).collect();
        let r = shadow_test(&states, &[fixed(0.0), two], 1e-300, (5, 19)).unwrap();
        assert!(r.passed);
        assert_eq!(r.best, ShadowMatch { candidate: 1, phase: 1, sup_error: 0.0 });
    }

    #[test]
    fn picks_the_nearest_fixed_point() {
        let states = vec![0.5, 0.9, 1.05, 0.93, 1.1, 0.99];
        let cands = [fixed(0.0), fixed(2.0 / 3.0), fixed(1.0)];
        let r = shadow_test(&states, &cands, 0.25, (2, 5)).unwrap();
        assert!(r.passed);
        assert_eq!(r.best.candidate, 2);
        assert!((r.best.sup_error - 0.1).abs() < 1e-12);
        assert!(!shadow_test(&states, &cands, 0.1, (2, 5)).unwrap().passed);
    }

    #[test]
    fn window_must_fit() {
        let states = vec![0.0; 10];
        assert!(matches!(shadow_test(&states, &[fixed(0.0)], 0.1, (5, 10)), Err(ShadowError::BadWindow { .. })));
        assert!(matches!(shadow_test(&states, &[], 0.1, (0, 9)), Err(ShadowError::NoCandidates)));
    }
}
