//! δ'-chains: a path for the tent, and the reachable set when the target
//! is out of reach.

use perturbed_dynamics::chains::{find_delta_chain, ChainSearch};
use perturbed_dynamics::gallery;

fn main() -> anyhow::Result<()> {
    let tent = gallery::tent();
    match find_delta_chain(&tent, 0.05, 0.1, 0.9, 0.025, None)? {
        ChainSearch::Found { chain, validation } => {
            println!("tent chain {:?}, worst link {:.4}", chain.points, validation.max_link_error)
        }
        ChainSearch::NotFound { .. } => println!("tent: no chain"),
    }

    let limit = gallery::example1_limit();
    if let ChainSearch::NotFound { reachable } = find_delta_chain(&limit, 0.05, 0.9, 0.0, 0.025, None)? {
        println!("example-1 limit from 0.9 only reaches {reachable:?}");
    }
    Ok(())
}
