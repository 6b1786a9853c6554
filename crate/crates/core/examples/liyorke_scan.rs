//! Pairs that come close and separate again: many for the tent, none for
//! a contraction.

use perturbed_dynamics::gallery;
use perturbed_dynamics::maps::MapSequence;
use perturbed_dynamics::periodic::{liyorke_scan, random_pairs, LiYorkeOptions};
use perturbed_dynamics::stochproc::Executor;

fn main() -> anyhow::Result<()> {
    let pairs = random_pairs(8, 500);
    let opts = LiYorkeOptions::default();
    for (name, f) in [("tent", gallery::tent()), ("contraction", gallery::contraction())] {
        let r = liyorke_scan(&MapSequence::constant(f), &pairs, &opts, &Executor::default())?;
        println!("{name:<12} {} of {} pairs flagged", r.flagged, r.pairs.len());
    }
    Ok(())
}
