//! A market with 2^(n/2) stable matchings where forbidding most of the
//! diagonal leaves four. The solver never looks at the other ones, so the
//! time per answer grows polynomially while the stable set explodes.
//!
//!     cargo run --release --example block_family

use stable_constraints::{markets, Options, Solver};

fn main() {
    println!("{:>5} {:>22} {:>10} {:>14} {:>12}", "n", "stable matchings", "kept", "search nodes", "max delay");
    for n in [8, 16, 32, 64, 128, 256] {
        let inst = markets::block_family(n).unwrap();
        let ac = markets::forbid_diagonal(&inst, 5);
        let out = Solver::new(&inst).solve(&ac, &Options::default());
        println!(
            "{n:>5} {:>22} {:>10} {:>14} {:>12.1?}",
            format!("2^{}", n / 2),
            out.solutions.len(),
            out.stats.calls,
            out.stats.max_delay()
        );
    }
}
