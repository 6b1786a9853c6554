//! Noisy orbits of the remark-3 map end up shadowing one of its two
//! attracting fixed points.

use perturbed_dynamics::gallery;
use perturbed_dynamics::maps::MapSequence;
use perturbed_dynamics::periodic::{shadow_test, shadowing_candidates, ScanOptions};
use perturbed_dynamics::stochproc::{fold_batch, Executor, ProcessConfig};

fn main() -> anyhow::Result<()> {
    let f = gallery::remark3_map();
    let cands = shadowing_candidates(&f, 1, &ScanOptions::default())?;
    let cfg = ProcessConfig {
        seq: MapSequence::constant(f),
        tail_index: 0,
        x0: 0.5,
        delta: 0.05,
        horizon: 2000,
        master_seed: 4,
    };
    let results = fold_batch(&cfg, 1000, &Executor::default(), |t| shadow_test(&t.states, &cands, 0.25, (1500, 2000)))?;
    let mut counts = vec![0; cands.len()];
    for r in results.into_iter().flatten().filter(|r| r.passed) {
        counts[r.best.candidate] += 1;
    }
    for (c, n) in cands.iter().zip(counts) {
        println!("{:?}: {n} trajectories", c.points);
    }
    Ok(())
}
