//! A perturbed contraction: every process returns to a neighbourhood of
//! the attracting fixed point over and over.

use perturbed_dynamics::gallery;
use perturbed_dynamics::maps::MapSequence;
use perturbed_dynamics::recurrence::{estimate_recurrence, RecurrenceQuery};
use perturbed_dynamics::stochproc::Executor;

fn main() -> anyhow::Result<()> {
    let seq = MapSequence::additive_decay(gallery::contraction(), 0.2, 0.5);
    let mut q = RecurrenceQuery::with_defaults(0.5, 0.1, 0.02, 2000);
    q.min_visits = 50;
    q.trials = 1000;
    q.deltas = vec![0.0, 0.02, 0.05];
    let report = estimate_recurrence(&seq, 5, 0.5, &q, 2, &Executor::default())?;
    for e in &report.entries {
        println!(
            "δ' = {:<5} P(≥ {} visits to B(0.5, 0.1)) = {:.3}  mean first-hit step {:.1}",
            e.delta_prime, e.r, e.estimate, e.first_hit.mean
        );
    }
    Ok(())
}
