//! Market, constraint and matching types.
//!
//! Participants are named by opaque strings at the boundary and by dense
//! indices everywhere else. [`Instance`] is the validated many-to-one market;
//! [`RawInstance`] is the unvalidated description a file parser produces.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct WorkerId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct FirmId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Worker,
    Firm,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Worker => write!(f, "worker"),
            Side::Firm => write!(f, "firm"),
        }
    }
}

/// Unvalidated market description, keyed by participant names.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RawInstance {
    pub workers: Vec<String>,
    /// `(name, quota)` per firm.
    pub firms: Vec<(String, usize)>,
    pub worker_prefs: Vec<(String, Vec<String>)>,
    pub firm_prefs: Vec<(String, Vec<String>)>,
}

impl RawInstance {
    /// Convenience constructor from borrowed lists.
    ///
    /// `workers` is `(name, preference list)`; `firms` is `(name, quota, preference list)`.
    pub fn from_lists(workers: &[(&str, &[&str])], firms: &[(&str, usize, &[&str])]) -> Self {
        let own = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        RawInstance {
            workers: workers.iter().map(|(w, _)| w.to_string()).collect(),
            firms: firms.iter().map(|(f, q, _)| (f.to_string(), *q)).collect(),
            worker_prefs: workers.iter().map(|(w, p)| (w.to_string(), own(p))).collect(),
            firm_prefs: firms.iter().map(|(f, _, p)| (f.to_string(), own(p))).collect(),
        }
    }
}

/// One structural problem found while validating a [`RawInstance`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ValidationIssue {
    DuplicateParticipant { side: Side, name: String },
    ZeroQuota { firm: String },
    UnknownOwner { side: Side, name: String },
    DuplicatePreferenceList { side: Side, owner: String },
    UnknownParticipant { side: Side, owner: String, name: String },
    DuplicateEntry { side: Side, owner: String, entry: String },
    EmptyList { side: Side, owner: String },
    /// `listed_by` lists the other participant but is not listed back.
    Asymmetric { worker: String, firm: String, listed_by: Side },
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ValidationIssue::*;
        match self {
            DuplicateParticipant { side, name } => write!(f, "{side} `{name}` declared twice"),
            ZeroQuota { firm } => write!(f, "firm `{firm}` has quota 0"),
            UnknownOwner { side, name } => {
                write!(f, "preference list for undeclared {side} `{name}`")
            }
            DuplicatePreferenceList { side, owner } => {
                write!(f, "{side} `{owner}` has more than one preference list")
            }
            UnknownParticipant { side, owner, name } => {
                write!(f, "{side} `{owner}` lists unknown participant `{name}`")
            }
            DuplicateEntry { side, owner, entry } => {
                write!(f, "{side} `{owner}` lists `{entry}` more than once")
            }
            EmptyList { side, owner } => write!(f, "{side} `{owner}` has an empty preference list"),
            Asymmetric { worker, firm, listed_by } => match listed_by {
                Side::Worker => write!(
                    f,
                    "asymmetric acceptability ({worker}, {firm}): worker lists firm but not vice versa"
                ),
                Side::Firm => write!(
                    f,
                    "asymmetric acceptability ({worker}, {firm}): firm lists worker but not vice versa"
                ),
            },
        }
    }
}

/// Every violation found during validation. Never empty.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} validation issue(s)", self.issues.len())?;
        for issue in &self.issues {
            write!(f, "\n  - {issue}")?;
        }
        Ok(())
    }
}

/// A validated many-to-one market.
///
/// Preference lists are strict and mutually consistent: `f` appears in the
/// list of `w` exactly when `w` appears in the list of `f`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    workers: Vec<String>,
    firms: Vec<String>,
    quotas: Vec<usize>,
    worker_prefs: Vec<Vec<FirmId>>,
    firm_prefs: Vec<Vec<WorkerId>>,
    worker_rank: Vec<Vec<Option<u32>>>,
    firm_rank: Vec<Vec<Option<u32>>>,
    worker_index: HashMap<String, WorkerId>,
    firm_index: HashMap<String, FirmId>,
}

impl Instance {
    /// Validates a raw description, reporting every violation rather than the first.
    pub fn from_raw(raw: &RawInstance) -> Result<Self, ValidationReport> {
        let mut issues = Vec::new();

        let mut seen = std::collections::HashSet::new();
        for name in &raw.workers {
            if !seen.insert(name.as_str()) {
                issues.push(ValidationIssue::DuplicateParticipant {
                    side: Side::Worker,
                    name: name.clone(),
                });
            }
        }
        let workers: Vec<String> = dedup_in_order(&raw.workers);
        let worker_index: HashMap<String, WorkerId> = workers
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), WorkerId(i)))
            .collect();

        let mut firms = Vec::new();
        let mut quotas = Vec::new();
        let mut firm_index = HashMap::new();
        for (name, quota) in &raw.firms {
            if firm_index.contains_key(name) {
                issues.push(ValidationIssue::DuplicateParticipant {
                    side: Side::Firm,
                    name: name.clone(),
                });
                continue;
            }
            if *quota == 0 {
                issues.push(ValidationIssue::ZeroQuota { firm: name.clone() });
            }
            firm_index.insert(name.clone(), FirmId(firms.len()));
            firms.push(name.clone());
            quotas.push(*quota);
        }

        let mut worker_prefs: Vec<Option<Vec<FirmId>>> = vec![None; workers.len()];
        for (owner, list) in &raw.worker_prefs {
            let Some(&w) = worker_index.get(owner) else {
                issues.push(ValidationIssue::UnknownOwner {
                    side: Side::Worker,
                    name: owner.clone(),
                });
                continue;
            };
            if worker_prefs[w.0].is_some() {
                issues.push(ValidationIssue::DuplicatePreferenceList {
                    side: Side::Worker,
                    owner: owner.clone(),
                });
                continue;
            }
            worker_prefs[w.0] = Some(resolve_list(
                Side::Worker,
                owner,
                list,
                &firm_index,
                &mut issues,
            ));
        }

        let mut firm_prefs: Vec<Option<Vec<WorkerId>>> = vec![None; firms.len()];
        for (owner, list) in &raw.firm_prefs {
            let Some(&f) = firm_index.get(owner) else {
                issues.push(ValidationIssue::UnknownOwner {
                    side: Side::Firm,
                    name: owner.clone(),
                });
                continue;
            };
            if firm_prefs[f.0].is_some() {
                issues.push(ValidationIssue::DuplicatePreferenceList {
                    side: Side::Firm,
                    owner: owner.clone(),
                });
                continue;
            }
            firm_prefs[f.0] = Some(resolve_list(
                Side::Firm,
                owner,
                list,
                &worker_index,
                &mut issues,
            ));
        }

        let worker_prefs: Vec<Vec<FirmId>> =
            worker_prefs.into_iter().map(Option::unwrap_or_default).collect();
        let firm_prefs: Vec<Vec<WorkerId>> =
            firm_prefs.into_iter().map(Option::unwrap_or_default).collect();

        for (i, list) in worker_prefs.iter().enumerate() {
            if list.is_empty() {
                issues.push(ValidationIssue::EmptyList {
                    side: Side::Worker,
                    owner: workers[i].clone(),
                });
            }
        }
        for (i, list) in firm_prefs.iter().enumerate() {
            if list.is_empty() {
                issues.push(ValidationIssue::EmptyList {
                    side: Side::Firm,
                    owner: firms[i].clone(),
                });
            }
        }

        let worker_rank = rank_table(&worker_prefs, firms.len(), |f| f.0);
        let firm_rank = rank_table(&firm_prefs, workers.len(), |w| w.0);

        for (w, list) in worker_prefs.iter().enumerate() {
            for f in list {
                if firm_rank[f.0][w].is_none() {
                    issues.push(ValidationIssue::Asymmetric {
                        worker: workers[w].clone(),
                        firm: firms[f.0].clone(),
                        listed_by: Side::Worker,
                    });
                }
            }
        }
        for (f, list) in firm_prefs.iter().enumerate() {
            for w in list {
                if worker_rank[w.0][f].is_none() {
                    issues.push(ValidationIssue::Asymmetric {
                        worker: workers[w.0].clone(),
                        firm: firms[f].clone(),
                        listed_by: Side::Firm,
                    });
                }
            }
        }

        if !issues.is_empty() {
            return Err(ValidationReport { issues });
        }
        Ok(Instance {
            workers,
            firms,
            quotas,
            worker_prefs,
            firm_prefs,
            worker_rank,
            firm_rank,
            worker_index,
            firm_index,
        })
    }

    pub fn to_raw(&self) -> RawInstance {
        RawInstance {
            workers: self.workers.clone(),
            firms: self.firms.iter().cloned().zip(self.quotas.iter().copied()).collect(),
            worker_prefs: self
                .workers
                .iter()
                .zip(&self.worker_prefs)
                .map(|(w, l)| (w.clone(), l.iter().map(|f| self.firms[f.0].clone()).collect()))
                .collect(),
            firm_prefs: self
                .firms
                .iter()
                .zip(&self.firm_prefs)
                .map(|(f, l)| (f.clone(), l.iter().map(|w| self.workers[w.0].clone()).collect()))
                .collect(),
        }
    }

    pub fn num_workers(&self) -> usize {
        self.workers.len()
    }

    pub fn num_firms(&self) -> usize {
        self.firms.len()
    }

    /// Total number of positions, the sum of all quotas.
    pub fn num_positions(&self) -> usize {
        self.quotas.iter().sum()
    }

    pub fn workers(&self) -> impl Iterator<Item = WorkerId> {
        (0..self.workers.len()).map(WorkerId)
    }

    pub fn firms(&self) -> impl Iterator<Item = FirmId> {
        (0..self.firms.len()).map(FirmId)
    }

    pub fn worker_name(&self, w: WorkerId) -> &str {
        &self.workers[w.0]
    }

    pub fn firm_name(&self, f: FirmId) -> &str {
        &self.firms[f.0]
    }

    pub fn worker_id(&self, name: &str) -> Option<WorkerId> {
        self.worker_index.get(name).copied()
    }

    pub fn firm_id(&self, name: &str) -> Option<FirmId> {
        self.firm_index.get(name).copied()
    }

    pub fn quota(&self, f: FirmId) -> usize {
        self.quotas[f.0]
    }

    /// Firms acceptable to `w`, most preferred first.
    pub fn worker_prefs(&self, w: WorkerId) -> &[FirmId] {
        &self.worker_prefs[w.0]
    }

    /// Workers acceptable to `f`, most preferred first.
    pub fn firm_prefs(&self, f: FirmId) -> &[WorkerId] {
        &self.firm_prefs[f.0]
    }

    /// Position of `f` in the list of `w` (0 = favourite), `None` if unacceptable.
    pub fn worker_rank(&self, w: WorkerId, f: FirmId) -> Option<usize> {
        self.worker_rank[w.0][f.0].map(|r| r as usize)
    }

    pub fn firm_rank(&self, f: FirmId, w: WorkerId) -> Option<usize> {
        self.firm_rank[f.0][w.0].map(|r| r as usize)
    }

    pub fn is_acceptable(&self, w: WorkerId, f: FirmId) -> bool {
        self.worker_rank[w.0][f.0].is_some()
    }

    /// All acceptable pairs, worker-major in preference order.
    pub fn acceptable_pairs(&self) -> impl Iterator<Item = (WorkerId, FirmId)> + '_ {
        self.workers()
            .flat_map(move |w| self.worker_prefs(w).iter().map(move |&f| (w, f)))
    }
}

fn dedup_in_order(names: &[String]) -> Vec<String> {
    let mut seen = std::collections::HashSet::new();
    names.iter().filter(|n| seen.insert(n.as_str())).cloned().collect()
}

fn resolve_list<Id: Copy + Eq + std::hash::Hash>(
    side: Side,
    owner: &str,
    list: &[String],
    index: &HashMap<String, Id>,
    issues: &mut Vec<ValidationIssue>,
) -> Vec<Id> {
    let mut out = Vec::with_capacity(list.len());
    let mut seen = std::collections::HashSet::new();
    for name in list {
        match index.get(name) {
            None => issues.push(ValidationIssue::UnknownParticipant {
                side,
                owner: owner.to_string(),
                name: name.clone(),
            }),
            Some(&id) => {
                if seen.insert(id) {
                    out.push(id);
                } else {
                    issues.push(ValidationIssue::DuplicateEntry {
                        side,
                        owner: owner.to_string(),
                        entry: name.clone(),
                    });
                }
            }
        }
    }
    out
}

fn rank_table<T>(prefs: &[Vec<T>], width: usize, idx: impl Fn(&T) -> usize) -> Vec<Vec<Option<u32>>> {
    prefs
        .iter()
        .map(|list| {
            let mut row = vec![None; width];
            for (r, x) in list.iter().enumerate() {
                row[idx(x)] = Some(r as u32);
            }
            row
        })
        .collect()
}

/// A many-to-one matching: a set of `(worker, firm)` pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ManyToOneMatching {
    pairs: BTreeSet<(WorkerId, FirmId)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatchingError {
    #[error("participant index out of range in pair ({0}, {1})")]
    OutOfRange(usize, usize),
    #[error("worker {0} appears in more than one pair")]
    WorkerMatchedTwice(String),
    #[error("firm {firm} holds {assigned} workers but its quota is {quota}")]
    QuotaExceeded { firm: String, quota: usize, assigned: usize },
    #[error("pair ({worker}, {firm}) is not mutually acceptable")]
    Unacceptable { worker: String, firm: String },
}

impl ManyToOneMatching {
    pub fn new(pairs: impl IntoIterator<Item = (WorkerId, FirmId)>) -> Self {
        ManyToOneMatching { pairs: pairs.into_iter().collect() }
    }

    /// Builds a matching from names; unknown names yield `None`.
    pub fn from_names(inst: &Instance, pairs: &[(&str, &str)]) -> Option<Self> {
        pairs
            .iter()
            .map(|(w, f)| Some((inst.worker_id(w)?, inst.firm_id(f)?)))
            .collect::<Option<BTreeSet<_>>>()
            .map(|pairs| ManyToOneMatching { pairs })
    }

    pub fn pairs(&self) -> impl Iterator<Item = (WorkerId, FirmId)> + '_ {
        self.pairs.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, w: WorkerId, f: FirmId) -> bool {
        self.pairs.contains(&(w, f))
    }

    pub fn employer(&self, w: WorkerId) -> Option<FirmId> {
        self.pairs.iter().find(|(x, _)| *x == w).map(|&(_, f)| f)
    }

    pub fn employees(&self, f: FirmId) -> impl Iterator<Item = WorkerId> + '_ {
        self.pairs.iter().filter(move |(_, g)| *g == f).map(|&(w, _)| w)
    }

    /// Checks the matching is well formed for `inst`: acceptable pairs, one
    /// firm per worker and no firm above quota.
    pub fn validate(&self, inst: &Instance) -> Result<(), MatchingError> {
        let mut load = vec![0usize; inst.num_firms()];
        let mut matched = vec![false; inst.num_workers()];
        for &(w, f) in &self.pairs {
            if w.0 >= inst.num_workers() || f.0 >= inst.num_firms() {
                return Err(MatchingError::OutOfRange(w.0, f.0));
            }
            if !inst.is_acceptable(w, f) {
                return Err(MatchingError::Unacceptable {
                    worker: inst.worker_name(w).to_string(),
                    firm: inst.firm_name(f).to_string(),
                });
            }
            if std::mem::replace(&mut matched[w.0], true) {
                return Err(MatchingError::WorkerMatchedTwice(inst.worker_name(w).to_string()));
            }
            load[f.0] += 1;
        }
        for f in inst.firms() {
            if load[f.0] > inst.quota(f) {
                return Err(MatchingError::QuotaExceeded {
                    firm: inst.firm_name(f).to_string(),
                    quota: inst.quota(f),
                    assigned: load[f.0],
                });
            }
        }
        Ok(())
    }

    /// Renders as `(w1,f2) (w2,f1) ...` in worker order.
    pub fn display<'a>(&'a self, inst: &'a Instance) -> impl fmt::Display + 'a {
        struct D<'a>(&'a ManyToOneMatching, &'a Instance);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                let mut first = true;
                for (w, g) in self.0.pairs() {
                    if !first {
                        write!(f, " ")?;
                    }
                    first = false;
                    write!(f, "({},{})", self.1.worker_name(w), self.1.firm_name(g))?;
                }
                Ok(())
            }
        }
        D(self, inst)
    }

    pub fn named_pairs(&self, inst: &Instance) -> Vec<(String, String)> {
        self.pairs()
            .map(|(w, f)| (inst.worker_name(w).to_string(), inst.firm_name(f).to_string()))
            .collect()
    }
}

/// Whether `(w, f)` blocks `mu`.
///
/// The pair must be mutually acceptable and not already matched, with `w`
/// preferring `f` to its current situation and `f` either holding a vacant
/// position or preferring `w` to one of its current workers.
/// Assumes `mu` passes [`ManyToOneMatching::validate`].
pub fn is_blocking_pair(inst: &Instance, mu: &ManyToOneMatching, w: WorkerId, f: FirmId) -> bool {
    Occupancy::of(inst, mu).blocks(inst, w, f)
}

/// True iff `mu` is a matching of `inst` with no blocking pair.
pub fn is_stable(inst: &Instance, mu: &ManyToOneMatching) -> Result<bool, MatchingError> {
    mu.validate(inst)?;
    Ok(blocking_pairs(inst, mu).is_empty())
}

/// Every blocking pair of `mu`, worker-major.
pub fn blocking_pairs(inst: &Instance, mu: &ManyToOneMatching) -> Vec<(WorkerId, FirmId)> {
    let occ = Occupancy::of(inst, mu);
    inst.acceptable_pairs().filter(|&(w, f)| occ.blocks(inst, w, f)).collect()
}

/// Who works where, indexed both ways.
pub(crate) struct Occupancy {
    employer: Vec<Option<FirmId>>,
    employees: Vec<Vec<WorkerId>>,
}

impl Occupancy {
    pub(crate) fn of(inst: &Instance, mu: &ManyToOneMatching) -> Self {
        Self::from_pairs(inst, mu.pairs())
    }

    pub(crate) fn from_pairs(inst: &Instance, pairs: impl Iterator<Item = (WorkerId, FirmId)>) -> Self {
        let mut employer = vec![None; inst.num_workers()];
        let mut employees = vec![Vec::new(); inst.num_firms()];
        for (w, f) in pairs {
            employer[w.0] = Some(f);
            employees[f.0].push(w);
        }
        Occupancy { employer, employees }
    }

    pub(crate) fn blocks(&self, inst: &Instance, w: WorkerId, f: FirmId) -> bool {
        let (Some(w_rank_f), Some(f_rank_w)) = (inst.worker_rank(w, f), inst.firm_rank(f, w)) else {
            return false;
        };
        let worker_wants = match self.employer[w.0] {
            None => true,
            Some(current) if current == f => return false,
            Some(current) => w_rank_f < inst.worker_rank(w, current).expect("matched pair acceptable"),
        };
        if !worker_wants {
            return false;
        }
        let held = &self.employees[f.0];
        held.len() < inst.quota(f)
            || held
                .iter()
                .any(|&other| f_rank_w < inst.firm_rank(f, other).expect("matched pair acceptable"))
    }
}

/// Per-participant assignment constraints over a many-to-one market.
///
/// * `f_in[w]`: `w` must be employed at one of these firms.
/// * `f_out[w]`: `w` must not be employed at any of these firms.
/// * `w_in[f]`: every worker employed at `f` must come from this set.
/// * `w_out[f]`: none of these workers may be employed at `f`.
///
/// Empty sets carry no constraint. A participant whose in-set and out-set
/// overlap makes the whole list unsatisfiable (see [`Self::contradictions`]).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AssignmentConstraints {
    pub f_in: BTreeMap<WorkerId, BTreeSet<FirmId>>,
    pub f_out: BTreeMap<WorkerId, BTreeSet<FirmId>>,
    pub w_in: BTreeMap<FirmId, BTreeSet<WorkerId>>,
    pub w_out: BTreeMap<FirmId, BTreeSet<WorkerId>>,
}

/// A participant whose required and forbidden sets intersect.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "side", rename_all = "lowercase")]
pub enum Contradiction {
    Worker { worker: WorkerId, firms: Vec<FirmId> },
    Firm { firm: FirmId, workers: Vec<WorkerId> },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstraintError {
    #[error("unknown worker `{0}` in constraints")]
    UnknownWorker(String),
    #[error("unknown firm `{0}` in constraints")]
    UnknownFirm(String),
    #[error("constraint references participant index {0} outside the market")]
    OutOfRange(usize),
}

impl AssignmentConstraints {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.f_in.values().all(BTreeSet::is_empty)
            && self.f_out.values().all(BTreeSet::is_empty)
            && self.w_in.values().all(BTreeSet::is_empty)
            && self.w_out.values().all(BTreeSet::is_empty)
    }

    /// Name-based builder for `inst`.
    pub fn builder(inst: &Instance) -> ConstraintsBuilder<'_> {
        ConstraintsBuilder { inst, ac: Self::default(), error: None }
    }

    /// Checks every referenced participant exists in `inst`.
    pub fn check_refs(&self, inst: &Instance) -> Result<(), ConstraintError> {
        let w_ok = |w: &WorkerId| w.0 < inst.num_workers();
        let f_ok = |f: &FirmId| f.0 < inst.num_firms();
        for (w, fs) in self.f_in.iter().chain(&self.f_out) {
            if !w_ok(w) {
                return Err(ConstraintError::OutOfRange(w.0));
            }
            if let Some(f) = fs.iter().find(|f| !f_ok(f)) {
                return Err(ConstraintError::OutOfRange(f.0));
            }
        }
        for (f, ws) in self.w_in.iter().chain(&self.w_out) {
            if !f_ok(f) {
                return Err(ConstraintError::OutOfRange(f.0));
            }
            if let Some(w) = ws.iter().find(|w| !w_ok(w)) {
                return Err(ConstraintError::OutOfRange(w.0));
            }
        }
        Ok(())
    }

    pub fn contradictions(&self) -> Vec<Contradiction> {
        let mut out = Vec::new();
        for (w, fin) in &self.f_in {
            if let Some(fout) = self.f_out.get(w) {
                let both: Vec<FirmId> = fin.intersection(fout).copied().collect();
                if !both.is_empty() {
                    out.push(Contradiction::Worker { worker: *w, firms: both });
                }
            }
        }
        for (f, win) in &self.w_in {
            if let Some(wout) = self.w_out.get(f) {
                let both: Vec<WorkerId> = win.intersection(wout).copied().collect();
                if !both.is_empty() {
                    out.push(Contradiction::Firm { firm: *f, workers: both });
                }
            }
        }
        out
    }

    /// Evaluates the constraints directly on a many-to-one matching, without
    /// going through the pair reduction.
    pub fn is_satisfied_by(&self, mu: &ManyToOneMatching) -> bool {
        if !self.contradictions().is_empty() {
            return false;
        }
        for (w, firms) in &self.f_in {
            if firms.is_empty() {
                continue;
            }
            match mu.employer(*w) {
                Some(f) if firms.contains(&f) => {}
                _ => return false,
            }
        }
        for (w, firms) in &self.f_out {
            if mu.employer(*w).is_some_and(|f| firms.contains(&f)) {
                return false;
            }
        }
        for (f, workers) in &self.w_in {
            if workers.is_empty() {
                continue;
            }
            if mu.employees(*f).any(|w| !workers.contains(&w)) {
                return false;
            }
        }
        for (f, workers) in &self.w_out {
            if mu.employees(*f).any(|w| workers.contains(&w)) {
                return false;
            }
        }
        true
    }
}

/// Collects constraints by participant name; the first unknown name is kept
/// and reported by [`ConstraintsBuilder::build`].
pub struct ConstraintsBuilder<'a> {
    inst: &'a Instance,
    ac: AssignmentConstraints,
    error: Option<ConstraintError>,
}

impl ConstraintsBuilder<'_> {
    fn worker(&mut self, name: &str) -> Option<WorkerId> {
        let id = self.inst.worker_id(name);
        if id.is_none() && self.error.is_none() {
            self.error = Some(ConstraintError::UnknownWorker(name.to_string()));
        }
        id
    }

    fn firm(&mut self, name: &str) -> Option<FirmId> {
        let id = self.inst.firm_id(name);
        if id.is_none() && self.error.is_none() {
            self.error = Some(ConstraintError::UnknownFirm(name.to_string()));
        }
        id
    }

    pub fn f_in(mut self, worker: &str, firms: &[&str]) -> Self {
        if let Some(w) = self.worker(worker) {
            let fs: Vec<_> = firms.iter().filter_map(|f| self.firm(f)).collect();
            self.ac.f_in.entry(w).or_default().extend(fs);
        }
        self
    }

    pub fn f_out(mut self, worker: &str, firms: &[&str]) -> Self {
        if let Some(w) = self.worker(worker) {
            let fs: Vec<_> = firms.iter().filter_map(|f| self.firm(f)).collect();
            self.ac.f_out.entry(w).or_default().extend(fs);
        }
        self
    }

    pub fn w_in(mut self, firm: &str, workers: &[&str]) -> Self {
        if let Some(f) = self.firm(firm) {
            let ws: Vec<_> = workers.iter().filter_map(|w| self.worker(w)).collect();
            self.ac.w_in.entry(f).or_default().extend(ws);
        }
        self
    }

    pub fn w_out(mut self, firm: &str, workers: &[&str]) -> Self {
        if let Some(f) = self.firm(firm) {
            let ws: Vec<_> = workers.iter().filter_map(|w| self.worker(w)).collect();
            self.ac.w_out.entry(f).or_default().extend(ws);
        }
        self
    }

    pub fn build(self) -> Result<AssignmentConstraints, ConstraintError> {
        match self.error {
            Some(e) => Err(e),
            None => Ok(self.ac),
        }
    }
}

/// A cell of the matching grid: `row` is a worker, `col` a firm position.
///
/// Indices are zero-based; `Display` prints them one-based as `(row,col)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Vertex {
    pub row: usize,
    pub col: usize,
}

impl Vertex {
    pub const fn new(row: usize, col: usize) -> Self {
        Vertex { row, col }
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row + 1, self.col + 1)
    }
}

/// A one-to-one matching on the grid: no two vertices share a row or column.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Matching {
    vertices: BTreeSet<Vertex>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("vertices {0} and {1} share a row or column")]
pub struct NotIndependent(pub Vertex, pub Vertex);

impl Matching {
    pub fn new(vertices: impl IntoIterator<Item = Vertex>) -> Result<Self, NotIndependent> {
        let vertices: BTreeSet<Vertex> = vertices.into_iter().collect();
        let mut rows = HashMap::new();
        let mut cols = HashMap::new();
        for &v in &vertices {
            if let Some(&u) = rows.get(&v.row) {
                return Err(NotIndependent(u, v));
            }
            if let Some(&u) = cols.get(&v.col) {
                return Err(NotIndependent(u, v));
            }
            rows.insert(v.row, v);
            cols.insert(v.col, v);
        }
        Ok(Matching { vertices })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.vertices.contains(&v)
    }

    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.vertices.iter().copied()
    }

    pub fn as_set(&self) -> &BTreeSet<Vertex> {
        &self.vertices
    }

    pub fn partner_of_row(&self, row: usize) -> Option<usize> {
        self.vertices.iter().find(|v| v.row == row).map(|v| v.col)
    }

    pub fn partner_of_col(&self, col: usize) -> Option<usize> {
        self.vertices.iter().find(|v| v.col == col).map(|v| v.row)
    }
}

impl fmt::Display for Matching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.vertices.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

/// Forced (`v_in`) and forbidden (`v_out`) grid vertices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct PairConstraints {
    v_in: BTreeSet<Vertex>,
    v_out: BTreeSet<Vertex>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error, Serialize)]
pub enum PairConstraintError {
    #[error("vertex {0} is both forced and forbidden")]
    Overlap(Vertex),
    #[error("forced vertices {0} and {1} share a row or column")]
    ForcedConflict(Vertex, Vertex),
}

impl PairConstraints {
    pub fn new(
        v_in: impl IntoIterator<Item = Vertex>,
        v_out: impl IntoIterator<Item = Vertex>,
    ) -> Result<Self, PairConstraintError> {
        let v_in: BTreeSet<Vertex> = v_in.into_iter().collect();
        let v_out: BTreeSet<Vertex> = v_out.into_iter().collect();
        if let Some(&v) = v_in.intersection(&v_out).next() {
            return Err(PairConstraintError::Overlap(v));
        }
        Matching::new(v_in.iter().copied())
            .map_err(|NotIndependent(a, b)| PairConstraintError::ForcedConflict(a, b))?;
        Ok(PairConstraints { v_in, v_out })
    }

    pub fn none() -> Self {
        Self::default()
    }

    pub fn v_in(&self) -> &BTreeSet<Vertex> {
        &self.v_in
    }

    pub fn v_out(&self) -> &BTreeSet<Vertex> {
        &self.v_out
    }

    pub fn is_satisfied_by(&self, m: &Matching) -> bool {
        self.v_in.iter().all(|v| m.contains(*v)) && !self.v_out.iter().any(|v| m.contains(*v))
    }
}
