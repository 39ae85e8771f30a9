mod common;

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

use common::{random_instance, random_pairs, rng};
use stable_constraints::idua::{apply_r, delete_and_reduce, run_idua_with};
use stable_constraints::oracle::{brute_force_stable, brute_force_stable_split, filter_by_pairs, kernels, DEFAULT_MAX_CANDIDATES};
use stable_constraints::{
    blocking_pairs, is_blocking_pair, is_stable, merge_matching, split_firms, AssignmentConstraints, FirmId,
    Instance, ManyToOneMatching, Matching, MatchingDigraph, NormalForm, Options, Solver, Vertex, WorkerId,
};

const B: u128 = DEFAULT_MAX_CANDIDATES;

fn random_constraints(rng: &mut impl Rng, inst: &Instance) -> AssignmentConstraints {
    let mut ac = AssignmentConstraints::new();
    let workers: Vec<WorkerId> = inst.workers().collect();
    let firms: Vec<FirmId> = inst.firms().collect();
    let pick_firms = |rng: &mut dyn rand::RngCore| -> BTreeSet<FirmId> {
        let k = rng.gen_range(1..=firms.len().min(2));
        firms.choose_multiple(rng, k).copied().collect()
    };
    let pick_workers = |rng: &mut dyn rand::RngCore| -> BTreeSet<WorkerId> {
        let k = rng.gen_range(1..=workers.len().min(3));
        workers.choose_multiple(rng, k).copied().collect()
    };
    for _ in 0..rng.gen_range(0..=3) {
        let w = *workers.choose(rng).unwrap();
        let f = *firms.choose(rng).unwrap();
        match rng.gen_range(0..4) {
            0 => ac.f_in.entry(w).or_default().extend(pick_firms(rng)),
            1 => ac.f_out.entry(w).or_default().extend(pick_firms(rng)),
            2 => ac.w_in.entry(f).or_default().extend(pick_workers(rng)),
            _ => ac.w_out.entry(f).or_default().extend(pick_workers(rng)),
        }
    }
    ac
}

/// Out-degrees from an explicitly listed arc set over the live vertices.
fn explicit_degrees(split: &stable_constraints::SplitInstance, d: &MatchingDigraph) -> BTreeMap<Vertex, (usize, usize)> {
    let live: Vec<Vertex> = d.live_vertices().collect();
    let mut arcs = Vec::new();
    for &a in &live {
        for &b in &live {
            let wp = split.worker_prefs(WorkerId(a.row));
            let cp = split.column_prefs(a.col);
            let pos = |list: &[usize], x: usize| list.iter().position(|&y| y == x).unwrap();
            if a.row == b.row && a.col != b.col && pos(wp, b.col) < pos(wp, a.col) {
                arcs.push((a, b, 'W'));
            }
            if a.col == b.col && a.row != b.row && pos(cp, b.row) < pos(cp, a.row) {
                arcs.push((a, b, 'F'));
            }
        }
    }
    live.iter()
        .map(|&u| {
            let w = arcs.iter().filter(|(a, _, k)| *a == u && *k == 'W').count();
            let f = arcs.iter().filter(|(a, _, k)| *a == u && *k == 'F').count();
            (u, (w, f))
        })
        .collect()
}

fn to_grid(mu: &ManyToOneMatching, split: &stable_constraints::SplitInstance) -> Matching {
    split.lift(mu)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 300, .. ProptestConfig::default() })]

    #[test]
    fn worklist_order_does_not_matter(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let split = split_firms(&random_instance(&mut rng));
        let mut reference = split.digraph();
        while apply_r(&mut reference) > 0 {}
        for _ in 0..5 {
            let mut d = split.digraph();
            run_idua_with(&mut d, |len| rng.gen_range(0..len));
            prop_assert_eq!(&d, &reference);
        }
    }

    #[test]
    fn reduction_keeps_stable_set_and_balance(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let split = split_firms(&random_instance(&mut rng));
        let nf = NormalForm::of(&split);
        let before = kernels(&split.digraph(), B).unwrap();
        let after = kernels(&nf.digraph, B).unwrap();
        prop_assert_eq!(&before, &after);
        prop_assert_eq!(nf.matched_rows.len(), nf.matched_cols.len());
        for k in &after {
            prop_assert_eq!(k.len(), nf.r);
        }
    }

    #[test]
    fn extremal_matchings_bound_every_stable_matching(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let inst = random_instance(&mut rng);
        let split = split_firms(&inst);
        let nf = NormalForm::of(&split);
        let d = &nf.digraph;
        let (m_w, m_f) = nf.extremal_matchings();
        prop_assert!(is_stable(&inst, &merge_matching(&split, &m_w)).unwrap());
        prop_assert!(is_stable(&inst, &merge_matching(&split, &m_f)).unwrap());
        for s in kernels(d, B).unwrap() {
            for v in s.iter() {
                let best_w = Vertex::new(v.row, m_w.partner_of_row(v.row).unwrap());
                prop_assert!(d.row_rank(best_w) <= d.row_rank(v));
                let best_f = Vertex::new(m_f.partner_of_col(v.col).unwrap(), v.col);
                prop_assert!(d.col_rank(best_f) <= d.col_rank(v));
            }
        }
    }

    #[test]
    fn splitting_is_a_bijection_on_stable_matchings(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let inst = random_instance(&mut rng);
        let split = split_firms(&inst);
        let many: BTreeSet<ManyToOneMatching> = brute_force_stable(&inst, B).unwrap().stable.into_iter().collect();
        let one = brute_force_stable_split(&split, B).unwrap();
        let merged: BTreeSet<ManyToOneMatching> = one.iter().map(|m| merge_matching(&split, m)).collect();
        prop_assert_eq!(merged.len(), one.len());
        prop_assert_eq!(&merged, &many);
        for mu in &many {
            prop_assert!(one.contains(&to_grid(mu, &split)));
        }
    }

    #[test]
    fn oracle_and_kernels_agree(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let split = split_firms(&random_instance(&mut rng));
        prop_assert_eq!(brute_force_stable_split(&split, B).unwrap(), kernels(&split.digraph(), B).unwrap());
    }

    #[test]
    fn solver_matches_oracle_on_pair_constraints(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let inst = random_instance(&mut rng);
        let solver = Solver::new(&inst);
        let pc = random_pairs(&mut rng, solver.split(), 2, 5);
        let out = solver.solve_pairs(&pc, &Options::default());
        let got: Vec<Matching> = out.solutions.iter().map(|s| s.matching.clone()).collect();
        let set: BTreeSet<Matching> = got.iter().cloned().collect();
        prop_assert_eq!(set.len(), got.len());
        let want: BTreeSet<Matching> =
            filter_by_pairs(&brute_force_stable_split(solver.split(), B).unwrap(), &pc).into_iter().collect();
        prop_assert_eq!(&set, &want);
        prop_assert!(out.stats.calls <= 2 * got.len() + 1);
        for s in &out.solutions {
            prop_assert_eq!(s.matching.len(), out.r);
            prop_assert!(is_stable(&inst, &s.assignment).unwrap());
        }
    }

    #[test]
    fn solver_matches_oracle_on_assignment_constraints(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let inst = random_instance(&mut rng);
        let ac = random_constraints(&mut rng, &inst);
        let out = Solver::new(&inst).solve(&ac, &Options::default());
        let got: BTreeSet<ManyToOneMatching> = out.solutions.iter().map(|s| s.assignment.clone()).collect();
        prop_assert_eq!(got.len(), out.solutions.len());
        let want: BTreeSet<ManyToOneMatching> =
            brute_force_stable(&inst, B).unwrap().filter_by_constraints(&ac).stable.into_iter().collect();
        prop_assert_eq!(&got, &want, "constraints {:?}", ac);
        if out.infeasible.is_some() {
            prop_assert!(want.is_empty());
        }
    }

    #[test]
    fn first_solution_is_worker_best(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let inst = random_instance(&mut rng);
        let solver = Solver::new(&inst);
        let pc = random_pairs(&mut rng, solver.split(), 1, 3);
        let out = solver.solve_pairs(&pc, &Options::default());
        let d = &solver.normal_form().digraph;
        if let Some(first) = out.solutions.first() {
            for later in &out.solutions[1..] {
                for v in later.matching.iter() {
                    let mine = Vertex::new(v.row, first.matching.partner_of_row(v.row).unwrap());
                    prop_assert!(d.row_rank(mine) <= d.row_rank(v));
                }
            }
            let opt = solver.solve_pairs(&pc, &Options::mode(stable_constraints::Mode::WorkerOptimal));
            prop_assert_eq!(&opt.solutions[0].matching, &first.matching);
        }
    }

    #[test]
    fn parallel_mode_finds_the_same_set(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let inst = random_instance(&mut rng);
        let solver = Solver::new(&inst);
        let pc = random_pairs(&mut rng, solver.split(), 1, 3);
        let seq = solver.solve_pairs(&pc, &Options::default());
        let par = solver.solve_pairs(&pc, &Options { parallel: true, ..Options::default() });
        let a: BTreeSet<Matching> = seq.solutions.iter().map(|s| s.matching.clone()).collect();
        let b: BTreeSet<Matching> = par.solutions.iter().map(|s| s.matching.clone()).collect();
        prop_assert_eq!(a, b);
        prop_assert_eq!(par.solutions.len(), seq.solutions.len());
        prop_assert!(par.stats.calls <= 2 * par.solutions.len() + 1);
    }

    #[test]
    fn implicit_degrees_match_explicit_arcs(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let split = split_firms(&random_instance(&mut rng));
        let mut d = split.digraph();
        loop {
            for (u, (w, f)) in explicit_degrees(&split, &d) {
                prop_assert_eq!(d.out_degree_w(u), w);
                prop_assert_eq!(d.out_degree_f(u), f);
                prop_assert_eq!(d.is_row_head(u), w == 0);
                prop_assert_eq!(d.is_col_head(u), f == 0);
            }
            let live: Vec<Vertex> = d.live_vertices().collect();
            let Some(&u) = live.choose(&mut rng) else { break };
            let others: BTreeSet<Vertex> = live.iter().copied().filter(|&x| x != u).collect();
            d.delete_vertex(u);
            prop_assert_eq!(d.live_vertices().collect::<BTreeSet<_>>(), others);
        }
    }

    #[test]
    fn incremental_restore_equals_full_rerun(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let nf = NormalForm::of(&split_firms(&random_instance(&mut rng)));
        let live: Vec<Vertex> = nf.digraph.live_vertices().collect();
        if let Some(&u) = live.choose(&mut rng) {
            let mut a = nf.digraph.clone();
            delete_and_reduce(&mut a, u);
            let mut b = nf.digraph.clone();
            b.delete_vertex(u);
            while apply_r(&mut b) > 0 {}
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn stability_agrees_with_blocking_pair_scan(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let inst = random_instance(&mut rng);
        // A random quota-respecting matching.
        let mut load = vec![0; inst.num_firms()];
        let mut pairs = Vec::new();
        for w in inst.workers() {
            let options: Vec<FirmId> =
                inst.worker_prefs(w).iter().copied().filter(|f| load[f.0] < inst.quota(*f)).collect();
            if let Some(&f) = options.choose(&mut rng).filter(|_| rng.gen_bool(0.7)) {
                load[f.0] += 1;
                pairs.push((w, f));
            }
        }
        let mu = ManyToOneMatching::new(pairs);
        let scan = inst.acceptable_pairs().any(|(w, f)| is_blocking_pair(&inst, &mu, w, f));
        prop_assert_eq!(is_stable(&inst, &mu).unwrap(), !scan);
        prop_assert_eq!(blocking_pairs(&inst, &mu).is_empty(), !scan);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 100, .. ProptestConfig::default() })]

    #[test]
    fn rural_hospitals(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let inst = random_instance(&mut rng);
        let split = split_firms(&inst);
        let nf = NormalForm::of(&split);
        let report = nf.rural_hospitals(&split);
        let all = brute_force_stable(&inst, B).unwrap().stable;
        for mu in &all {
            let matched: BTreeSet<WorkerId> = mu.pairs().map(|(w, _)| w).collect();
            for w in inst.workers() {
                prop_assert_eq!(matched.contains(&w), !report.never_employed.contains(&w));
            }
            for (f, staff) in &report.underfilled_firms {
                let got: BTreeSet<WorkerId> = mu.employees(*f).collect();
                prop_assert_eq!(&got, &staff.iter().copied().collect::<BTreeSet<_>>());
            }
            let grid = split.lift(mu);
            for v in &report.fixed_pairs {
                prop_assert!(grid.contains(*v));
            }
        }
    }
}

#[test]
fn validation_is_idempotent() {
    for seed in 0..50 {
        let inst = random_instance(&mut rng(seed));
        assert_eq!(Instance::from_raw(&inst.to_raw()).unwrap(), inst);
    }
}
