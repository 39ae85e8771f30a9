//! Firm splitting and the compilation of assignment constraints into forced
//! and forbidden grid vertices.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Range;

use serde::Serialize;

use crate::digraph::MatchingDigraph;
use crate::model::{
    AssignmentConstraints, Contradiction, FirmId, Instance, ManyToOneMatching, Matching,
    PairConstraintError, PairConstraints, RawInstance, Vertex, WorkerId,
};

/// One position of a firm. `copy` is 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Column {
    pub firm: FirmId,
    pub copy: usize,
}

/// A one-to-one market in which every firm with quota `q` has become `q`
/// identical single-position columns. Every worker ranks the copies of a firm
/// consecutively, in ascending copy order, where the firm used to be.
#[derive(Debug, Clone)]
pub struct SplitInstance {
    base: Instance,
    columns: Vec<Column>,
    firm_columns: Vec<Range<usize>>,
    worker_prefs: Vec<Vec<usize>>,
    column_prefs: Vec<Vec<usize>>,
}

pub fn split_firms(inst: &Instance) -> SplitInstance {
    let mut columns = Vec::with_capacity(inst.num_positions());
    let mut firm_columns = Vec::with_capacity(inst.num_firms());
    for f in inst.firms() {
        let start = columns.len();
        columns.extend((1..=inst.quota(f)).map(|copy| Column { firm: f, copy }));
        firm_columns.push(start..columns.len());
    }
    let worker_prefs = inst
        .workers()
        .map(|w| inst.worker_prefs(w).iter().flat_map(|f| firm_columns[f.0].clone()).collect())
        .collect();
    let column_prefs = columns
        .iter()
        .map(|c| inst.firm_prefs(c.firm).iter().map(|w| w.0).collect())
        .collect();
    SplitInstance { base: inst.clone(), columns, firm_columns, worker_prefs, column_prefs }
}

impl SplitInstance {
    pub fn base(&self) -> &Instance {
        &self.base
    }

    pub fn rows(&self) -> usize {
        self.base.num_workers()
    }

    pub fn num_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, c: usize) -> Column {
        self.columns[c]
    }

    pub fn firm_columns(&self, f: FirmId) -> Range<usize> {
        self.firm_columns[f.0].clone()
    }

    /// Column indices, most preferred first.
    pub fn worker_prefs(&self, w: WorkerId) -> &[usize] {
        &self.worker_prefs[w.0]
    }

    /// Row indices, most preferred first; identical for all copies of a firm.
    pub fn column_prefs(&self, c: usize) -> &[usize] {
        &self.column_prefs[c]
    }

    /// `f4#2` for the second copy of a multi-position firm, plain `f1` otherwise.
    pub fn column_name(&self, c: usize) -> String {
        let col = self.columns[c];
        let name = self.base.firm_name(col.firm);
        if self.base.quota(col.firm) > 1 {
            format!("{name}#{}", col.copy)
        } else {
            name.to_string()
        }
    }

    pub fn row_names(&self) -> Vec<String> {
        self.base.workers().map(|w| self.base.worker_name(w).to_string()).collect()
    }

    pub fn column_names(&self) -> Vec<String> {
        (0..self.num_columns()).map(|c| self.column_name(c)).collect()
    }

    /// The full matching digraph: every acceptable pair live, no flags.
    pub fn digraph(&self) -> MatchingDigraph {
        MatchingDigraph::new(
            self.rows(),
            self.num_columns(),
            self.worker_prefs.clone(),
            self.column_prefs.clone(),
        )
        .expect("split preferences are mutual by construction")
    }

    /// The split market as an ordinary instance with all quotas 1. Worker `k`
    /// and column `c` keep their indices.
    pub fn as_instance(&self) -> Instance {
        let names = self.column_names();
        let worker = |r: usize| self.base.worker_name(WorkerId(r)).to_string();
        let raw = RawInstance {
            workers: (0..self.rows()).map(worker).collect(),
            firms: names.iter().map(|n| (n.clone(), 1)).collect(),
            worker_prefs: (0..self.rows())
                .map(|r| (worker(r), self.worker_prefs[r].iter().map(|&c| names[c].clone()).collect()))
                .collect(),
            firm_prefs: (0..self.num_columns())
                .map(|c| (names[c].clone(), self.column_prefs[c].iter().map(|&r| worker(r)).collect()))
                .collect(),
        };
        Instance::from_raw(&raw).expect("split instance is well formed")
    }

    /// Inverse of [`merge_matching`] on stable matchings: each firm's workers
    /// take its copies in the firm's preference order, best worker at copy 1.
    pub fn lift(&self, mu: &ManyToOneMatching) -> Matching {
        let mut vertices = BTreeSet::new();
        for f in self.base.firms() {
            let mut staff: Vec<WorkerId> = mu.employees(f).collect();
            staff.sort_by_key(|&w| self.base.firm_rank(f, w));
            for (w, c) in staff.into_iter().zip(self.firm_columns(f)) {
                vertices.insert(Vertex::new(w.0, c));
            }
        }
        Matching::new(vertices).expect("one column per worker")
    }
}

/// Collapses copies back into their firm.
pub fn merge_matching(split: &SplitInstance, m: &Matching) -> ManyToOneMatching {
    ManyToOneMatching::new(m.iter().map(|v| (WorkerId(v.row), split.column(v.col).firm)))
}

/// A constraint entry that became vacuous because the pair it names cannot
/// occur in any stable matching.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DroppedConstraint {
    FIn { worker: WorkerId, firm: FirmId },
    FOut { worker: WorkerId, firm: FirmId },
    WIn { firm: FirmId, worker: WorkerId },
    WOut { firm: FirmId, worker: WorkerId },
}

impl DroppedConstraint {
    pub fn describe(&self, inst: &Instance) -> String {
        let (key, owner, member) = match *self {
            Self::FIn { worker, firm } => ("f_in", inst.worker_name(worker), inst.firm_name(firm)),
            Self::FOut { worker, firm } => ("f_out", inst.worker_name(worker), inst.firm_name(firm)),
            Self::WIn { firm, worker } => ("w_in", inst.firm_name(firm), inst.worker_name(worker)),
            Self::WOut { firm, worker } => ("w_out", inst.firm_name(firm), inst.worker_name(worker)),
        };
        format!("{key} {owner}: {member}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Infeasibility {
    /// Some participant's required and forbidden sets overlap.
    Contradiction { contradictions: Vec<Contradiction> },
    /// `f_in` is set for a worker who is unmatched in every stable matching.
    NeverEmployed { worker: WorkerId },
    /// None of the worker's allowed firms can employ it in a stable matching.
    NoAllowedEmployer { worker: WorkerId },
    /// The compiled vertex sets clash.
    Conflict { error: PairConstraintError },
}

impl Infeasibility {
    pub fn describe(&self, inst: &Instance) -> String {
        match self {
            Self::Contradiction { contradictions } => {
                let parts: Vec<String> = contradictions
                    .iter()
                    .map(|c| match c {
                        Contradiction::Worker { worker, firms } => format!(
                            "{} both required and forbidden at {}",
                            inst.worker_name(*worker),
                            join(firms.iter().map(|f| inst.firm_name(*f)))
                        ),
                        Contradiction::Firm { firm, workers } => format!(
                            "{} both requires and forbids {}",
                            inst.firm_name(*firm),
                            join(workers.iter().map(|w| inst.worker_name(*w)))
                        ),
                    })
                    .collect();
                format!("infeasible by contradiction: {}", parts.join("; "))
            }
            Self::NeverEmployed { worker } => format!(
                "infeasible: f_in is set for {} but {} is never employed in any stable matching",
                inst.worker_name(*worker),
                inst.worker_name(*worker)
            ),
            Self::NoAllowedEmployer { worker } => format!(
                "infeasible: no firm in f_in of {} employs it in any stable matching",
                inst.worker_name(*worker)
            ),
            Self::Conflict { error } => format!("infeasible: {error}"),
        }
    }
}

fn join<'a>(names: impl Iterator<Item = &'a str>) -> String {
    names.collect::<Vec<_>>().join(", ")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict {
    Feasible,
    Infeasible(Infeasibility),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConstraintReduction {
    pub pair_constraints: PairConstraints,
    pub dropped: Vec<DroppedConstraint>,
    pub verdict: Verdict,
}

impl ConstraintReduction {
    fn infeasible(reason: Infeasibility, dropped: Vec<DroppedConstraint>) -> Self {
        ConstraintReduction {
            pair_constraints: PairConstraints::none(),
            dropped,
            verdict: Verdict::Infeasible(reason),
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.verdict == Verdict::Feasible
    }
}

/// Compiles `ac` into vertex constraints against `nf`, the normal form of
/// `split`. Entries about pairs already gone from `nf` are dropped, and
/// constraints that no stable matching can meet are reported up front.
pub fn reduce_constraints(
    split: &SplitInstance,
    nf: &MatchingDigraph,
    ac: &AssignmentConstraints,
) -> ConstraintReduction {
    let mut dropped = Vec::new();
    let contradictions = ac.contradictions();
    if !contradictions.is_empty() {
        return ConstraintReduction::infeasible(Infeasibility::Contradiction { contradictions }, dropped);
    }

    let mut v_in = BTreeSet::new();
    let mut v_out = BTreeSet::new();
    let live_copies = |w: WorkerId, f: FirmId| {
        split.firm_columns(f).map(move |c| Vertex::new(w.0, c)).filter(|&v| nf.is_live(v))
    };

    let forbidden = ac
        .f_out
        .iter()
        .flat_map(|(&w, fs)| fs.iter().map(move |&f| (w, f, DroppedConstraint::FOut { worker: w, firm: f })))
        .chain(
            ac.w_out
                .iter()
                .flat_map(|(&f, ws)| ws.iter().map(move |&w| (w, f, DroppedConstraint::WOut { firm: f, worker: w }))),
        );
    for (w, f, entry) in forbidden {
        let mut any = false;
        for v in live_copies(w, f) {
            v_out.insert(v);
            any = true;
        }
        if !any {
            dropped.push(entry);
        }
    }

    for (&w, firms) in &ac.f_in {
        if firms.is_empty() {
            continue;
        }
        if nf.row_len(w.0) == 0 {
            return ConstraintReduction::infeasible(Infeasibility::NeverEmployed { worker: w }, dropped);
        }
        let mut allowed = Vec::new();
        for &f in firms {
            let copies: Vec<Vertex> = live_copies(w, f).collect();
            if copies.is_empty() {
                dropped.push(DroppedConstraint::FIn { worker: w, firm: f });
            }
            allowed.extend(copies);
        }
        match allowed.as_slice() {
            [] => {
                return ConstraintReduction::infeasible(
                    Infeasibility::NoAllowedEmployer { worker: w },
                    dropped,
                )
            }
            [only] => {
                v_in.insert(*only);
            }
            _ => {
                v_out.extend(
                    nf.row_entries(w.0)
                        .map(|c| Vertex::new(w.0, c))
                        .filter(|v| !allowed.contains(v)),
                );
            }
        }
    }

    for (&f, workers) in &ac.w_in {
        if workers.is_empty() {
            continue;
        }
        for &w in workers {
            if live_copies(w, f).next().is_none() {
                dropped.push(DroppedConstraint::WIn { firm: f, worker: w });
            }
        }
        for c in split.firm_columns(f) {
            if nf.col_len(c) == 0 {
                continue;
            }
            let (inside, outside): (Vec<usize>, Vec<usize>) =
                nf.col_entries(c).partition(|&r| workers.contains(&WorkerId(r)));
            if split.base().quota(f) == 1 && inside.len() == 1 {
                v_in.insert(Vertex::new(inside[0], c));
            } else {
                // With no admissible candidate left the column cannot be
                // filled; the search detects that as a short matching.
                v_out.extend(outside.into_iter().map(|r| Vertex::new(r, c)));
            }
        }
    }

    match PairConstraints::new(v_in, v_out) {
        Ok(pc) => ConstraintReduction { pair_constraints: pc, dropped, verdict: Verdict::Feasible },
        Err(error) => ConstraintReduction::infeasible(Infeasibility::Conflict { error }, dropped),
    }
}

impl fmt::Display for Column {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "firm {} copy {}", self.firm.0 + 1, self.copy)
    }
}
