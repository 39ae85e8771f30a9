//! Exhaustive ground truth for small markets.
//!
//! Nothing here shares code with the solver beyond the data types and the
//! blocking-pair test: stable matchings are found by trying every assignment,
//! and digraph kernels by trying every independent vertex set.

use serde::Serialize;
use thiserror::Error;

use crate::digraph::MatchingDigraph;
use crate::model::{
    AssignmentConstraints, FirmId, Instance, ManyToOneMatching, Matching, Occupancy,
    PairConstraints, Vertex, WorkerId,
};
use crate::reduction::SplitInstance;

pub const DEFAULT_MAX_CANDIDATES: u128 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("search space of about {estimate} candidates exceeds the bound of {bound}")]
    TooLarge { estimate: u128, bound: u128 },
}

/// Product of `(choices + 1)` over all lines: every line picks one option or
/// nothing. An upper bound on the number of candidates visited.
fn estimate(choices: impl Iterator<Item = usize>) -> u128 {
    choices.fold(1u128, |acc, k| acc.saturating_mul(k as u128 + 1))
}

fn check_bound(estimate: u128, bound: u128) -> Result<(), OracleError> {
    if estimate > bound {
        Err(OracleError::TooLarge { estimate, bound })
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleResult {
    /// Sorted and duplicate free.
    pub stable: Vec<ManyToOneMatching>,
    /// Quota-respecting assignments examined.
    pub candidates: u64,
    /// Size of the stable set before any constraint filtering.
    pub unfiltered: usize,
}

impl OracleResult {
    /// Keeps the matchings that satisfy `ac`, judged directly on assignments.
    pub fn filter_by_constraints(&self, ac: &AssignmentConstraints) -> OracleResult {
        OracleResult {
            stable: self.stable.iter().filter(|mu| ac.is_satisfied_by(mu)).cloned().collect(),
            ..self.clone()
        }
    }
}

/// Every stable matching of `inst`, by trying each worker at each acceptable
/// firm (or nowhere) subject to quotas.
pub fn brute_force_stable(inst: &Instance, max_candidates: u128) -> Result<OracleResult, OracleError> {
    check_bound(estimate(inst.workers().map(|w| inst.worker_prefs(w).len())), max_candidates)?;
    let mut search = Search {
        inst,
        load: vec![0; inst.num_firms()],
        chosen: Vec::with_capacity(inst.num_workers()),
        stable: Vec::new(),
        candidates: 0,
    };
    search.go(0);
    let mut stable = search.stable;
    stable.sort();
    let unfiltered = stable.len();
    Ok(OracleResult { stable, candidates: search.candidates, unfiltered })
}

struct Search<'a> {
    inst: &'a Instance,
    load: Vec<usize>,
    chosen: Vec<Option<FirmId>>,
    stable: Vec<ManyToOneMatching>,
    candidates: u64,
}

impl Search<'_> {
    fn go(&mut self, w: usize) {
        if w == self.inst.num_workers() {
            self.candidates += 1;
            self.check();
            return;
        }
        self.chosen.push(None);
        self.go(w + 1);
        self.chosen.pop();
        for &f in self.inst.worker_prefs(WorkerId(w)) {
            if self.load[f.0] < self.inst.quota(f) {
                self.load[f.0] += 1;
                self.chosen.push(Some(f));
                self.go(w + 1);
                self.chosen.pop();
                self.load[f.0] -= 1;
            }
        }
    }

    fn check(&mut self) {
        let pairs = || self.chosen.iter().enumerate().filter_map(|(w, f)| f.map(|f| (WorkerId(w), f)));
        let occ = Occupancy::from_pairs(self.inst, pairs());
        if self.inst.acceptable_pairs().all(|(w, f)| !occ.blocks(self.inst, w, f)) {
            self.stable.push(ManyToOneMatching::new(pairs()));
        }
    }
}

/// Stable matchings of the split market as grid matchings. Rows are workers
/// and columns are positions, numbered as in `split`.
pub fn brute_force_stable_split(split: &SplitInstance, max_candidates: u128) -> Result<Vec<Matching>, OracleError> {
    let res = brute_force_stable(&split.as_instance(), max_candidates)?;
    let mut out: Vec<Matching> = res
        .stable
        .iter()
        .map(|mu| Matching::new(mu.pairs().map(|(w, f)| Vertex::new(w.0, f.0))).expect("one-to-one"))
        .collect();
    out.sort();
    Ok(out)
}

pub fn filter_by_pairs(matchings: &[Matching], pc: &PairConstraints) -> Vec<Matching> {
    matchings.iter().filter(|m| pc.is_satisfied_by(m)).cloned().collect()
}

/// Every kernel of the live digraph: vertex sets with no arc inside them and
/// an arc from every outside vertex into them. Sorted.
pub fn kernels(d: &MatchingDigraph, max_candidates: u128) -> Result<Vec<Matching>, OracleError> {
    check_bound(estimate((0..d.rows()).map(|r| d.row_len(r))), max_candidates)?;
    let rows: Vec<Vec<usize>> = (0..d.rows()).map(|r| d.row_entries(r).collect()).collect();
    let mut used = vec![false; d.cols()];
    let mut chosen = Vec::new();
    let mut out = Vec::new();
    kernel_search(d, &rows, 0, &mut used, &mut chosen, &mut out);
    out.sort();
    Ok(out)
}

fn kernel_search(
    d: &MatchingDigraph,
    rows: &[Vec<usize>],
    r: usize,
    used: &mut [bool],
    chosen: &mut Vec<Vertex>,
    out: &mut Vec<Matching>,
) {
    if r == rows.len() {
        if is_absorbing(d, chosen) {
            out.push(Matching::new(chosen.iter().copied()).expect("independent by construction"));
        }
        return;
    }
    kernel_search(d, rows, r + 1, used, chosen, out);
    for &c in &rows[r] {
        if !used[c] {
            used[c] = true;
            chosen.push(Vertex::new(r, c));
            kernel_search(d, rows, r + 1, used, chosen, out);
            chosen.pop();
            used[c] = false;
        }
    }
}

fn is_absorbing(d: &MatchingDigraph, set: &[Vertex]) -> bool {
    let mut row_pick = vec![None; d.rows()];
    let mut col_pick = vec![None; d.cols()];
    for &v in set {
        row_pick[v.row] = Some(v);
        col_pick[v.col] = Some(v);
    }
    d.live_vertices().all(|u| {
        if set.contains(&u) {
            return true;
        }
        let by_worker = row_pick[u.row].is_some_and(|k| d.row_rank(k) < d.row_rank(u));
        let by_firm = col_pick[u.col].is_some_and(|k| d.col_rank(k) < d.col_rank(u));
        by_worker || by_firm
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markets;
    use crate::model::RawInstance;
    use crate::reduction::split_firms;

    #[test]
    fn single_pair_market() {
        let raw = RawInstance::from_lists(&[("w1", &["f1"])], &[("f1", 1, &["w1"])]);
        let inst = Instance::from_raw(&raw).unwrap();
        let res = brute_force_stable(&inst, DEFAULT_MAX_CANDIDATES).unwrap();
        assert_eq!(res.stable.len(), 1);
        assert_eq!(res.candidates, 2);
        let d = split_firms(&inst).digraph();
        assert_eq!(kernels(&d, DEFAULT_MAX_CANDIDATES).unwrap().len(), 1);
    }

    #[test]
    fn example_one_leaves_w6_out_and_fills_everything() {
        let inst = markets::example_one();
        let res = brute_force_stable(&inst, DEFAULT_MAX_CANDIDATES).unwrap();
        let w6 = inst.worker_id("w6").unwrap();
        assert!(!res.stable.is_empty());
        for mu in &res.stable {
            assert_eq!(mu.employer(w6), None);
            assert_eq!(mu.len(), 5);
        }
    }

    #[test]
    fn refuses_oversized_search() {
        let inst = markets::block_family(30).unwrap();
        let err = brute_force_stable(&inst, DEFAULT_MAX_CANDIDATES).unwrap_err();
        assert_eq!(err, OracleError::TooLarge { estimate: 3u128.pow(30), bound: DEFAULT_MAX_CANDIDATES });
    }

    #[test]
    fn cyclic_kernels_exclude_the_blocked_matching() {
        let d = split_firms(&markets::cyclic_three()).digraph();
        let ks = kernels(&d, DEFAULT_MAX_CANDIDATES).unwrap();
        let bad = Matching::new([Vertex::new(0, 1), Vertex::new(1, 0), Vertex::new(2, 2)]).unwrap();
        assert!(!ks.is_empty());
        assert!(!ks.contains(&bad));
    }
}
