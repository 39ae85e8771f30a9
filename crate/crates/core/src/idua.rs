//! Iterated deletion of unattractive alternatives.
//!
//! Two rules, applied until nothing changes:
//!
//! * if `(w,c)` is the head of column `c` (the position's favourite live
//!   worker), `w` will never settle for anything worse than `c`, so every
//!   vertex of row `w` ranked below `c` goes;
//! * if `(w,c)` is the head of row `w`, `c` will never be left with anyone
//!   worse than `w`, so every vertex of column `c` ranked below `w` goes.
//!
//! Only a change of head can create new work, so the worklist holds rows and
//! columns whose head moved. The result does not depend on processing order.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::digraph::MatchingDigraph;
use crate::model::{FirmId, Matching, Vertex, WorkerId};
use crate::reduction::SplitInstance;

/// One simultaneous application of both rules to the current digraph.
/// Returns the number of vertices deleted. Kept as the reference against
/// which the worklist version is tested.
pub fn apply_r(d: &mut MatchingDigraph) -> usize {
    let mut doomed = BTreeSet::new();
    for c in 0..d.cols() {
        if let Some(w) = d.best_row(c) {
            let k = d.row_rank(Vertex::new(w, c)).expect("live vertex has a rank");
            doomed.extend(
                d.row_entries(w)
                    .filter(|&c2| d.row_rank(Vertex::new(w, c2)).unwrap() > k)
                    .map(|c2| Vertex::new(w, c2)),
            );
        }
    }
    for w in 0..d.rows() {
        if let Some(c) = d.best_col(w) {
            let k = d.col_rank(Vertex::new(w, c)).expect("live vertex has a rank");
            doomed.extend(
                d.col_entries(c)
                    .filter(|&w2| d.col_rank(Vertex::new(w2, c)).unwrap() > k)
                    .map(|w2| Vertex::new(w2, c)),
            );
        }
    }
    for &v in &doomed {
        d.delete_vertex(v);
    }
    doomed.len()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Line {
    Row(usize),
    Col(usize),
}

struct Worklist {
    items: Vec<Line>,
    queued_rows: Vec<bool>,
    queued_cols: Vec<bool>,
}

impl Worklist {
    fn new(rows: usize, cols: usize) -> Self {
        Worklist { items: Vec::new(), queued_rows: vec![false; rows], queued_cols: vec![false; cols] }
    }

    fn push(&mut self, line: Line) {
        let flag = match line {
            Line::Row(r) => &mut self.queued_rows[r],
            Line::Col(c) => &mut self.queued_cols[c],
        };
        if !*flag {
            *flag = true;
            self.items.push(line);
        }
    }

    fn take(&mut self, i: usize) -> Line {
        let line = self.items.swap_remove(i);
        match line {
            Line::Row(r) => self.queued_rows[r] = false,
            Line::Col(c) => self.queued_cols[c] = false,
        }
        line
    }
}

/// Deletes `v` and queues whichever of its lines lost their head.
fn delete_tracked(d: &mut MatchingDigraph, v: Vertex, work: &mut Worklist) {
    let row_head = d.is_row_head(v);
    let col_head = d.is_col_head(v);
    d.delete_vertex(v);
    if row_head {
        work.push(Line::Row(v.row));
    }
    if col_head {
        work.push(Line::Col(v.col));
    }
}

fn drain(d: &mut MatchingDigraph, work: &mut Worklist, pick: &mut dyn FnMut(usize) -> usize) -> usize {
    let mut deleted = 0;
    while !work.items.is_empty() {
        let i = pick(work.items.len());
        match work.take(i) {
            Line::Row(w) => {
                // Row head (w,c): trim column c below w.
                let Some(c) = d.best_col(w) else { continue };
                while let Some(worst) = d.worst_row(c).filter(|&w2| w2 != w) {
                    delete_tracked(d, Vertex::new(worst, c), work);
                    deleted += 1;
                }
            }
            Line::Col(c) => {
                // Column head (w,c): trim row w below c.
                let Some(w) = d.best_row(c) else { continue };
                while let Some(worst) = d.worst_col(w).filter(|&c2| c2 != c) {
                    delete_tracked(d, Vertex::new(w, worst), work);
                    deleted += 1;
                }
            }
        }
    }
    deleted
}

/// Runs the reduction to its fixpoint, processing lines last-in first-out.
/// Returns the number of deletions.
pub fn run_idua(d: &mut MatchingDigraph) -> usize {
    run_idua_with(d, |len| len - 1)
}

/// As [`run_idua`], with `pick(len)` choosing which pending line to process
/// next (must return an index below `len`).
pub fn run_idua_with(d: &mut MatchingDigraph, mut pick: impl FnMut(usize) -> usize) -> usize {
    let mut work = Worklist::new(d.rows(), d.cols());
    for r in 0..d.rows() {
        work.push(Line::Row(r));
    }
    for c in 0..d.cols() {
        work.push(Line::Col(c));
    }
    drain(d, &mut work, &mut pick)
}

/// Deletes `v` from a digraph at its fixpoint and restores the fixpoint.
/// Only the row and column that lost a head need revisiting. Returns the
/// total number of deletions, `v` included.
pub fn delete_and_reduce(d: &mut MatchingDigraph, v: Vertex) -> usize {
    let mut work = Worklist::new(d.rows(), d.cols());
    delete_tracked(d, v, &mut work);
    1 + drain(d, &mut work, &mut |len| len - 1)
}

/// Row heads (worker-optimal) and column heads (firm-optimal).
pub fn extremal_matchings(d: &MatchingDigraph) -> (Matching, Matching) {
    let m_w = d.nonempty_rows().map(|r| Vertex::new(r, d.best_col(r).unwrap()));
    let m_f = d.nonempty_cols().map(|c| Vertex::new(d.best_row(c).unwrap(), c));
    (
        Matching::new(m_w).expect("row heads of a fixpoint are independent"),
        Matching::new(m_f).expect("column heads of a fixpoint are independent"),
    )
}

/// A digraph at its fixpoint together with the number of nonempty rows,
/// which every stable matching covers exactly.
#[derive(Debug, Clone)]
pub struct NormalForm {
    pub digraph: MatchingDigraph,
    pub r: usize,
    pub matched_rows: Vec<usize>,
    pub matched_cols: Vec<usize>,
    pub deletions: usize,
}

impl NormalForm {
    pub fn new(mut d: MatchingDigraph) -> Self {
        let deletions = run_idua(&mut d);
        let matched_rows: Vec<usize> = d.nonempty_rows().collect();
        let matched_cols: Vec<usize> = d.nonempty_cols().collect();
        debug_assert_eq!(matched_rows.len(), matched_cols.len());
        NormalForm { r: matched_rows.len(), matched_rows, matched_cols, digraph: d, deletions }
    }

    pub fn of(split: &SplitInstance) -> Self {
        Self::new(split.digraph())
    }

    pub fn extremal_matchings(&self) -> (Matching, Matching) {
        extremal_matchings(&self.digraph)
    }

    pub fn rural_hospitals(&self, split: &SplitInstance) -> RuralHospitals {
        let d = &self.digraph;
        let inst = split.base();
        let (m_w, m_f) = self.extremal_matchings();
        let fixed_pairs: Vec<Vertex> = m_w.as_set().intersection(m_f.as_set()).copied().collect();
        let never_filled: Vec<usize> = (0..d.cols()).filter(|&c| d.col_len(c) == 0).collect();
        let mut fixed_firms = Vec::new();
        let mut underfilled_firms = Vec::new();
        for f in inst.firms() {
            let cols = split.firm_columns(f);
            let surviving: Vec<usize> = cols.clone().filter(|&c| d.col_len(c) > 0).collect();
            if !surviving.is_empty() && surviving.iter().all(|&c| m_w.partner_of_col(c) == m_f.partner_of_col(c)) {
                fixed_firms.push(f);
            }
            if surviving.len() < cols.len() {
                let staff = surviving.iter().filter_map(|&c| m_w.partner_of_col(c)).map(WorkerId).collect();
                underfilled_firms.push((f, staff));
            }
        }
        RuralHospitals {
            never_employed: (0..d.rows()).filter(|&r| d.row_len(r) == 0).map(WorkerId).collect(),
            never_filled,
            fixed_pairs,
            fixed_firms,
            underfilled_firms,
        }
    }
}

/// Who is matched, and to whom, in every stable matching.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RuralHospitals {
    pub never_employed: Vec<WorkerId>,
    /// Columns empty in every stable matching.
    pub never_filled: Vec<usize>,
    /// Pairs present in every stable matching.
    pub fixed_pairs: Vec<Vertex>,
    /// Firms whose every fillable position has the same occupant throughout.
    pub fixed_firms: Vec<FirmId>,
    /// Firms below quota, with the workers they always get.
    pub underfilled_firms: Vec<(FirmId, Vec<WorkerId>)>,
}
