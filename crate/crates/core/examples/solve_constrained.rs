//! Which stable matchings keep w4 out of f1, staff f2 only from {w1, w6}
//! and keep w6 out of f4?
//!
//!     cargo run --example solve_constrained

use stable_constraints::{markets, Options, Solver};

fn main() {
    let inst = markets::example_one();
    let question = markets::example_one_question(&inst);

    let solver = Solver::new(&inst);
    let out = solver.solve(&question, &Options::default());

    for entry in &out.dropped {
        println!("vacuous: {}", entry.describe(&inst));
    }
    for (i, s) in out.solutions.iter().enumerate() {
        println!("{}. {}", i + 1, s.assignment.display(&inst));
    }
    println!(
        "{} solutions, {} search nodes, {} deletions",
        out.solutions.len(),
        out.stats.calls,
        out.stats.deletions
    );
}
