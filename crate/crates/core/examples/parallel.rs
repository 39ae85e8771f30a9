//! Explore both branches of every search node on the rayon pool.
//!
//!     cargo run --release --example parallel

use std::time::Instant;

use stable_constraints::{markets, Options, Solver};

fn main() {
    let inst = markets::block_family(32).unwrap();
    // Leave 2^12 solutions: forbid the diagonal from the 25th worker on.
    let ac = markets::forbid_diagonal(&inst, 25);
    let solver = Solver::new(&inst);

    for parallel in [false, true] {
        let start = Instant::now();
        let out = solver.solve(&ac, &Options { parallel, ..Options::default() });
        println!(
            "parallel={parallel:<5} {} solutions, {} nodes, {:.1?}",
            out.solutions.len(),
            out.stats.calls,
            start.elapsed()
        );
    }
}
