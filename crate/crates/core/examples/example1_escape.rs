//! Example-1 sequence: a noisy process escapes to the fixed point 1 of the
//! limit map with positive probability and then never leaves.
//!
//!     cargo run --release --example example1_escape

use perturbed_dynamics::maps::{Interval, MapSequence};
use perturbed_dynamics::recurrence::escape_probability;
use perturbed_dynamics::stochproc::{Executor, ProcessConfig};

fn main() -> anyhow::Result<()> {
    let seq = MapSequence::example1();
    println!("d(f_0, f) = {:.4}", seq.generator(0).sup_distance(seq.limit()));

    let cfg = ProcessConfig {
        seq,
        tail_index: 0,
        x0: 0.0,
        delta: 0.19,
        horizon: 200,
        master_seed: 1,
    };
    let region = Interval::new(0.8, 1.19);
    let r = escape_probability(&cfg, region, 10, 20_000, &Executor::default())?;
    println!(
        "P(reach [{}, {}] within 10 steps) = {:.4} ± {:.4}",
        region.lo, region.hi, r.probability.estimate, r.probability.stderr
    );
    println!("{} processes entered, {} left again", r.trap.entered, r.trap.exited);
    Ok(())
}
