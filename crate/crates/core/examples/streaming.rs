//! Consume solutions as they are found, stop early, and ask for a single
//! extremal answer.
//!
//!     cargo run --example streaming

use std::ops::ControlFlow;
use std::time::Instant;

use stable_constraints::{markets, AssignmentConstraints, Mode, Options, Solver};

fn main() {
    // 2^10 stable matchings, no constraints.
    let inst = markets::block_family(20).unwrap();
    let solver = Solver::new(&inst);
    let none = AssignmentConstraints::new();

    let start = Instant::now();
    let out = solver.solve_with(&none, &Options::default(), |s| {
        println!("{:>8.1?}  {}", start.elapsed(), s.assignment.display(&inst));
        if start.elapsed().as_millis() > 5 {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    println!("stopped after {} solutions", out.solutions.len());

    let capped = solver.solve(&none, &Options { limit: Some(10), ..Options::default() });
    println!("limit 10: got {}, more exist: {}", capped.solutions.len(), capped.truncated);

    for mode in [Mode::WorkerOptimal, Mode::FirmOptimal] {
        let one = solver.solve(&none, &Options::mode(mode));
        println!("{mode:?}: {}", one.solutions[0].assignment.display(&inst));
    }
}
