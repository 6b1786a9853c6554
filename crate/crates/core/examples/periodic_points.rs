//! Fixed points and period-2 orbits of the gallery maps, with their
//! attractivity labels.

use perturbed_dynamics::gallery;
use perturbed_dynamics::periodic::{find_periodic_points, ScanOptions};

fn main() -> anyhow::Result<()> {
    let opts = ScanOptions::default();
    let maps = [
        ("tent", gallery::tent()),
        ("contraction", gallery::contraction()),
        ("remark3", gallery::remark3_map()),
    ];
    for (name, f) in &maps {
        for period in 1..=2 {
            let scan = find_periodic_points(f, period, &opts)?;
            for o in &scan.orbits {
                println!("{name:<12} period {period}: {:?} {:?} (multiplier {:.3})", o.points, o.label, o.multiplier);
            }
            for p in &scan.plateaus {
                println!("{name:<12} period {period}: plateau [{:.6}, {:.6}]", p.interval.lo, p.interval.hi);
            }
        }
    }
    Ok(())
}
