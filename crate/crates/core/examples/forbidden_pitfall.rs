//! Why forbidden pairs cannot simply be deleted up front.
//!
//! In the cyclic three-by-three market, deleting (w3,f1) leaves a digraph in
//! which {(w1,f2), (w2,f1), (w3,f3)} looks stable, but in the real market
//! (w3,f1) blocks it. The solver only deletes a forbidden pair once some
//! extremal matching would use it, and never reports that matching.
//!
//!     cargo run --example forbidden_pitfall

use stable_constraints::oracle::{kernels, DEFAULT_MAX_CANDIDATES};
use stable_constraints::{blocking_pairs, markets, merge_matching, Options, PairConstraints, Solver, Vertex};

fn main() {
    let inst = markets::cyclic_three();
    let solver = Solver::new(&inst);
    let forbidden = Vertex::new(2, 0);

    let mut naive = solver.normal_form().digraph.clone();
    naive.delete_vertex(forbidden);
    println!("after deleting (w3,f1) outright:");
    for k in kernels(&naive, DEFAULT_MAX_CANDIDATES).unwrap() {
        let mu = merge_matching(solver.split(), &k);
        let blockers: Vec<String> = blocking_pairs(&inst, &mu)
            .into_iter()
            .map(|(w, f)| format!("({},{})", inst.worker_name(w), inst.firm_name(f)))
            .collect();
        let verdict = if blockers.is_empty() { "stable".to_string() } else { format!("blocked by {}", blockers.join(" ")) };
        println!("  {}  -> {verdict}", mu.display(&inst));
    }

    let pc = PairConstraints::new([], [forbidden]).unwrap();
    println!("solver:");
    for s in solver.solve_pairs(&pc, &Options::default()).solutions {
        println!("  {}", s.assignment.display(&inst));
    }
}
