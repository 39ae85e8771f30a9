//! Reduce a market to its normal form and read off what every stable
//! matching has in common. Pass `--dot` to print the reduced digraph.
//!
//!     cargo run --example normal_form -- --dot | dot -Tsvg > nf.svg

use stable_constraints::{markets, split_firms, NormalForm};

fn main() {
    let inst = markets::example_one();
    let split = split_firms(&inst);
    let nf = NormalForm::of(&split);
    let rows = split.row_names();
    let cols = split.column_names();

    if std::env::args().any(|a| a == "--dot") {
        print!("{}", nf.digraph.to_dot(&rows, &cols));
        return;
    }

    println!("{} of {} pairs survive, r = {}", nf.digraph.live_count(), split.digraph().live_count(), nf.r);
    for r in nf.matched_rows.iter().copied() {
        let keep: Vec<&str> = nf.digraph.row_entries(r).map(|c| cols[c].as_str()).collect();
        println!("  {}: {}", rows[r], keep.join(" "));
    }

    let (m_w, m_f) = nf.extremal_matchings();
    let show = |m: &stable_constraints::Matching| {
        m.iter().map(|v| format!("({},{})", rows[v.row], cols[v.col])).collect::<Vec<_>>().join(" ")
    };
    println!("worker-optimal: {}", show(&m_w));
    println!("firm-optimal:   {}", show(&m_f));

    let rh = nf.rural_hospitals(&split);
    for w in &rh.never_employed {
        println!("{} is unmatched in every stable matching", inst.worker_name(*w));
    }
    for v in &rh.fixed_pairs {
        println!("{} always works at {}", rows[v.row], cols[v.col]);
    }
}
