//! Write SVG plots of a few gallery maps and a short noisy trajectory.

use perturbed_dynamics::gallery;
use perturbed_dynamics::maps::MapSequence;
use perturbed_dynamics::plot;
use perturbed_dynamics::stochproc::{simulate, ProcessConfig};

fn main() -> anyhow::Result<()> {
    let out = std::env::temp_dir().join("pdyn-plots");
    std::fs::create_dir_all(&out)?;
    let seq = MapSequence::example1();
    let f0 = seq.generator(0).into_owned();
    std::fs::write(out.join("example1.svg"), plot::svg_maps("example 1: f_0 and f", &[&f0, seq.limit()]))?;
    std::fs::write(out.join("tent.svg"), plot::svg_map("tent", &gallery::tent()))?;

    let cfg = ProcessConfig { seq, tail_index: 0, x0: 0.0, delta: 0.19, horizon: 60, master_seed: 3 };
    let t = simulate(&cfg, 0)?;
    std::fs::write(out.join("trajectory.svg"), plot::svg_trajectories("example 1 process", &[&t.states]))?;
    println!("wrote plots to {}", out.display());
    Ok(())
}
