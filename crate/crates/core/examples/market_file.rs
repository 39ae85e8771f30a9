//! Read a market file, solve it, and emit JSON lines.
//!
//!     cargo run --example market_file -- crates/core/data/example1.txt

use stable_constraints::format::{parse_instance, serialize_instance, solution_record, summary_record};
use stable_constraints::{Options, Solver};

fn main() {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/example1.txt").to_string());
    let text = std::fs::read_to_string(&path).expect("readable file");
    let (inst, ac) = match parse_instance(&text) {
        Ok(parsed) => parsed,
        Err(e) => {
            eprintln!("{path}: {e}");
            std::process::exit(2);
        }
    };
    eprintln!("--- normalised input ---\n{}", serialize_instance(&inst, &ac));

    let solver = Solver::new(&inst);
    let out = solver.solve(&ac, &Options::default());
    if let Some(reason) = &out.infeasible {
        println!("{}", reason.describe(&inst));
        return;
    }
    for (i, s) in out.solutions.iter().enumerate() {
        println!("{}", solution_record(solver.split(), i + 1, s));
    }
    println!("{}", summary_record(&out.stats, out.truncated, out.r));
}
