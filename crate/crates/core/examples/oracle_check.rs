//! Cross-check the solver against exhaustive search on random small markets.
//!
//!     cargo run --release --example oracle_check -- 500

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use stable_constraints::oracle::{brute_force_stable, DEFAULT_MAX_CANDIDATES};
use stable_constraints::{AssignmentConstraints, Instance, Options, RawInstance, Solver};

fn random_market(rng: &mut ChaCha8Rng) -> Instance {
    let (m, n) = (rng.gen_range(2..=5), rng.gen_range(2..=4));
    let w = |i: usize| format!("w{}", i + 1);
    let f = |i: usize| format!("f{}", i + 1);
    let mut raw = RawInstance {
        workers: (0..m).map(w).collect(),
        firms: (0..n).map(|i| (f(i), rng.gen_range(1..=2))).collect(),
        ..Default::default()
    };
    // Complete market, random strict orders.
    for i in 0..m {
        let mut list: Vec<String> = (0..n).map(f).collect();
        list.shuffle(rng);
        raw.worker_prefs.push((w(i), list));
    }
    for j in 0..n {
        let mut list: Vec<String> = (0..m).map(w).collect();
        list.shuffle(rng);
        raw.firm_prefs.push((f(j), list));
    }
    Instance::from_raw(&raw).unwrap()
}

fn main() {
    let runs: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(200);
    let mut total = 0;
    for seed in 0..runs {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_market(&mut rng);
        let mut ac = AssignmentConstraints::new();
        let w = inst.workers().nth(rng.gen_range(0..inst.num_workers())).unwrap();
        let f = inst.firms().nth(rng.gen_range(0..inst.num_firms())).unwrap();
        ac.f_out.entry(w).or_default().insert(f);

        let solved: BTreeSet<_> = Solver::new(&inst)
            .solve(&ac, &Options::default())
            .solutions
            .into_iter()
            .map(|s| s.assignment)
            .collect();
        let oracle = brute_force_stable(&inst, DEFAULT_MAX_CANDIDATES).unwrap().filter_by_constraints(&ac);
        let expected: BTreeSet<_> = oracle.stable.into_iter().collect();
        assert_eq!(solved, expected, "seed {seed}");
        total += solved.len();
    }
    println!("{runs} markets agree with exhaustive search ({total} constrained stable matchings)");
}
