//! Build the example-2 map and watch noisy processes around the level-2
//! intervals.

use perturbed_dynamics::gallery::{example2_map, Example2Options};
use perturbed_dynamics::maps::MapSequence;
use perturbed_dynamics::stochproc::{fold_batch, Executor, ProcessConfig};

fn main() -> anyhow::Result<()> {
    let e = example2_map(&Example2Options::default())?;
    for l in &e.levels {
        println!("level {}: ε = {:.3e}, chosen point {:.9}", l.k, l.eps, l.points[l.chosen]);
    }
    println!("{} pieces, largest junction gap {:.1e}", e.pieces.len(), e.max_junction_gap);

    let l2 = &e.levels[1];
    let inside = |x: f64| l2.intervals.iter().any(|iv| iv.lo < x && x < iv.hi);
    for ratio in [0.01, 0.09, 0.39] {
        let cfg = ProcessConfig {
            seq: MapSequence::constant(e.map.clone()),
            tail_index: 0,
            x0: 0.5,
            delta: ratio * l2.eps,
            horizon: 10_000,
            master_seed: 10,
        };
        let fates = fold_batch(&cfg, 200, &Executor::default(), |t| {
            let entry = t.states.iter().position(|&x| inside(x));
            (entry.is_some(), entry.is_some_and(|m| t.states[m..].iter().any(|&x| !inside(x))))
        })?;
        let entered = fates.iter().filter(|f| f.0).count();
        let left = fates.iter().filter(|f| f.1).count();
        println!("δ = {ratio}·ε_2: {entered}/200 entered J_2, {left} left it later");
    }
    Ok(())
}
