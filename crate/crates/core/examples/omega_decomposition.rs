//! Nested cycles of intervals around the attractor of the truncated tent.

use perturbed_dynamics::gallery;
use perturbed_dynamics::periodic::{decompose_levels, DecomposeOptions};

fn main() -> anyhow::Result<()> {
    let g = gallery::truncated_tent(gallery::LAMBDA)?;
    let levels = decompose_levels(&g, 4, 1_000_000, 1e-3, &DecomposeOptions::default())?;
    for d in &levels {
        let widths: Vec<String> = d.spatial_order().iter().map(|(_, h)| format!("{:.2e}", h.width())).collect();
        println!("level {}: margin {:?}, widths [{}]", d.level, d.margin, widths.join(", "));
    }
    Ok(())
}
