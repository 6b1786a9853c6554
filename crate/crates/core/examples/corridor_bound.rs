//! The probability that N uniform perturbations all stay in a window of
//! half-width w, compared with simulation.

use perturbed_dynamics::chains::{corridor_monte_carlo, corridor_probability};
use perturbed_dynamics::stochproc::Executor;

fn main() -> anyhow::Result<()> {
    let exec = Executor::default();
    let delta = 0.1;
    for (n, ratio) in [(1, 1.0), (3, 0.5), (5, 0.8), (10, 0.9)] {
        let exact = corridor_probability(n, ratio * delta, delta)?;
        let mc = corridor_monte_carlo(n, ratio * delta, delta, 200_000, 7, &exec)?;
        println!("N = {n:<3} w/δ = {ratio:<4} exact {exact:.5}  simulated {:.5} ± {:.5}", mc.estimate, mc.stderr);
    }
    Ok(())
}
