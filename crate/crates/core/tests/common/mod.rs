#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use stable_constraints::{Instance, PairConstraints, RawInstance, SplitInstance, Vertex};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `v(r, c)` with 1-based indices, as the grid is usually drawn.
pub fn v(r: usize, c: usize) -> Vertex {
    Vertex::new(r - 1, c - 1)
}

/// At most six workers and six positions; random acceptability (everyone
/// keeps at least one partner) and random strict orders.
pub fn random_instance(rng: &mut impl Rng) -> Instance {
    let m = rng.gen_range(1..=6);
    let mut left = rng.gen_range(1..=6usize);
    let mut quotas = Vec::new();
    while left > 0 {
        let q = rng.gen_range(1..=left.min(3));
        quotas.push(q);
        left -= q;
    }
    let n = quotas.len();
    let p = rng.gen_range(0.3..=1.0);
    let mut acc = vec![vec![false; n]; m];
    for row in acc.iter_mut() {
        for cell in row.iter_mut() {
            *cell = rng.gen_bool(p);
        }
    }
    for w in 0..m {
        if !acc[w].contains(&true) {
            acc[w][rng.gen_range(0..n)] = true;
        }
    }
    for f in 0..n {
        if !(0..m).any(|w| acc[w][f]) {
            acc[rng.gen_range(0..m)][f] = true;
        }
    }
    let wn = |w: usize| format!("w{}", w + 1);
    let fname = |f: usize| format!("f{}", f + 1);
    let mut raw = RawInstance {
        workers: (0..m).map(wn).collect(),
        firms: quotas.iter().enumerate().map(|(f, &q)| (fname(f), q)).collect(),
        ..RawInstance::default()
    };
    for w in 0..m {
        let mut list: Vec<usize> = (0..n).filter(|&f| acc[w][f]).collect();
        list.shuffle(rng);
        raw.worker_prefs.push((wn(w), list.into_iter().map(fname).collect()));
    }
    for f in 0..n {
        let mut list: Vec<usize> = (0..m).filter(|&w| acc[w][f]).collect();
        list.shuffle(rng);
        raw.firm_prefs.push((fname(f), list.into_iter().map(wn).collect()));
    }
    Instance::from_raw(&raw).expect("generated market is valid")
}

/// Up to `max_in` forced and `max_out` forbidden vertices, drawn from all
/// acceptable pairs of the split market (so some may already be pruned).
pub fn random_pairs(rng: &mut impl Rng, split: &SplitInstance, max_in: usize, max_out: usize) -> PairConstraints {
    let mut pool: Vec<Vertex> = split.digraph().live_vertices().collect();
    pool.shuffle(rng);
    let k_in = rng.gen_range(0..=max_in.min(pool.len()));
    let mut v_in = BTreeSet::new();
    let mut rest = Vec::new();
    for u in pool {
        let clashes = v_in.iter().any(|x: &Vertex| x.row == u.row || x.col == u.col);
        if v_in.len() < k_in && !clashes {
            v_in.insert(u);
        } else {
            rest.push(u);
        }
    }
    let k_out = rng.gen_range(0..=max_out.min(rest.len()));
    PairConstraints::new(v_in, rest.into_iter().take(k_out)).expect("disjoint by construction")
}
