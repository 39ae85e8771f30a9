//! Branching enumeration of constrained stable matchings.
//!
//! A search node is a digraph at its fixpoint, a set of forced vertices, and
//! forbidden vertices recorded as [`Flag::Out`] on the digraph itself. Each
//! node first propagates its forced vertices, then deletes forbidden vertices
//! that have become a row or column head (it is only safe to delete a vertex
//! that some extremal matching would use). If the two extremal matchings then
//! agree, that matching is a solution; otherwise the node splits on a vertex
//! of the worker-optimal matching that the firm-optimal one lacks: once with
//! it forced, once with it forbidden. Both children always lead to at least
//! one solution, so the tree has at most `2s + 1` nodes for `s` solutions.

use std::collections::BTreeSet;
use std::ops::ControlFlow;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::digraph::{Flag, MatchingDigraph};
use crate::idua::{delete_and_reduce, extremal_matchings, NormalForm};
use crate::model::{AssignmentConstraints, Instance, ManyToOneMatching, Matching, PairConstraints, Vertex};
use crate::reduction::{
    merge_matching, reduce_constraints, split_firms, ConstraintReduction, DroppedConstraint,
    Infeasibility, SplitInstance, Verdict,
};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Every stable matching meeting the constraints, worker-preferred first.
    #[default]
    All,
    /// Only the constrained worker-optimal matching.
    WorkerOptimal,
    /// Only the constrained firm-optimal matching.
    FirmOptimal,
}

#[derive(Debug, Clone, Default)]
pub struct Options {
    pub mode: Mode,
    /// Stop after this many solutions.
    pub limit: Option<usize>,
    /// Explore both branches of a node concurrently. Emission order is then
    /// unspecified; the emitted set is unchanged.
    pub parallel: bool,
}

impl Options {
    pub fn mode(mode: Mode) -> Self {
        Options { mode, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Solution {
    /// On the split market.
    pub matching: Matching,
    /// Copies merged back into firms.
    pub assignment: ManyToOneMatching,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct SearchStats {
    /// Search nodes visited, the root included.
    pub calls: usize,
    pub solutions: usize,
    /// Vertices deleted while propagating constraints.
    pub deletions: usize,
    pub max_depth: usize,
    /// Time before each emission, measured from the previous one (or from
    /// the start of the search for the first).
    pub delays: Vec<Duration>,
    /// Time from the last emission (or the start) to the end of the search.
    pub tail: Duration,
}

impl SearchStats {
    /// Longest stretch without output, the closing stretch included.
    pub fn max_delay(&self) -> Duration {
        self.delays.iter().copied().chain([self.tail]).max().unwrap_or_default()
    }
}

#[derive(Debug, Clone, Default)]
pub struct SolutionStream {
    pub solutions: Vec<Solution>,
    pub stats: SearchStats,
    /// Set when more than `limit` solutions exist.
    pub truncated: bool,
    /// Why no search was run, if the constraints were rejected up front.
    pub infeasible: Option<Infeasibility>,
    pub dropped: Vec<DroppedConstraint>,
    /// Size of every stable matching of the split market.
    pub r: usize,
}

/// State of one search node.
#[derive(Debug, Clone)]
pub struct SearchNode {
    pub digraph: MatchingDigraph,
    pub v_in: BTreeSet<Vertex>,
    pub depth: usize,
}

impl SearchNode {
    /// Root node over a normal form. Forbidden vertices no longer present are
    /// already satisfied and simply ignored.
    pub fn root(nf: &NormalForm, pc: &PairConstraints) -> Self {
        let mut digraph = nf.digraph.snapshot();
        for &v in pc.v_out() {
            digraph.set_flag(v, Flag::Out);
        }
        SearchNode { digraph, v_in: pc.v_in().clone(), depth: 0 }
    }

    /// Live vertices currently forbidden.
    pub fn v_out(&self) -> BTreeSet<Vertex> {
        self.digraph.flagged(Flag::Out).collect()
    }

    pub fn v_in_live(&self) -> bool {
        self.v_in.iter().all(|&v| self.digraph.is_live(v))
    }

    /// Forbids every neighbour of a forced vertex, then deletes forbidden
    /// heads until none is left, restoring the fixpoint after each deletion.
    /// Returns the number of deletions, or `None` if a forced vertex is
    /// already gone.
    pub fn prepare(&mut self) -> Option<usize> {
        if !self.v_in_live() {
            return None;
        }
        let d = &mut self.digraph;
        for &v in &self.v_in {
            d.set_flag(v, Flag::In);
            let row: Vec<usize> = d.row_entries(v.row).filter(|&c| c != v.col).collect();
            let col: Vec<usize> = d.col_entries(v.col).filter(|&r| r != v.row).collect();
            for c in row {
                d.set_flag(Vertex::new(v.row, c), Flag::Out);
            }
            for r in col {
                d.set_flag(Vertex::new(r, v.col), Flag::Out);
            }
        }
        let mut deletions = 0;
        while let Some(v) = forbidden_head(d) {
            deletions += delete_and_reduce(d, v);
        }
        Some(deletions)
    }
}

fn forbidden_head(d: &MatchingDigraph) -> Option<Vertex> {
    let rows = (0..d.rows()).filter_map(|r| d.best_col(r).map(|c| Vertex::new(r, c)));
    let cols = (0..d.cols()).filter_map(|c| d.best_row(c).map(|r| Vertex::new(r, c)));
    rows.chain(cols).find(|&v| d.flag(v) == Flag::Out)
}

/// The row-major first vertex of `m_w` missing from `m_f`.
///
/// # Panics
/// If the two matchings are equal.
pub fn pick_branch_vertex(m_w: &Matching, m_f: &Matching) -> Vertex {
    m_w.iter()
        .find(|&v| !m_f.contains(v))
        .expect("branching requires distinct extremal matchings")
}

/// Runs the pipeline for one market: the split and normal form are computed
/// once and shared by every query.
#[derive(Debug, Clone)]
pub struct Solver {
    split: SplitInstance,
    nf: NormalForm,
}

enum Step {
    Done,
    Branch(Box<SearchNode>, Box<SearchNode>),
}

struct Emitter<F> {
    sink: F,
    limit: Option<usize>,
    solutions: Vec<Solution>,
    delays: Vec<Duration>,
    last: Instant,
    truncated: bool,
}

struct Shared<'s, F> {
    solver: &'s Solver,
    mode: Mode,
    stop: AtomicBool,
    calls: AtomicUsize,
    deletions: AtomicUsize,
    max_depth: AtomicUsize,
    emitter: Mutex<Emitter<F>>,
}

impl<F: FnMut(&Solution) -> ControlFlow<()>> Shared<'_, F> {
    fn emit(&self, m: Matching) -> ControlFlow<()> {
        let mut e = self.emitter.lock().expect("emitter lock");
        if self.stop.load(Ordering::Relaxed) {
            return ControlFlow::Break(());
        }
        if e.limit.is_some_and(|k| e.solutions.len() >= k) {
            e.truncated = true;
            self.stop.store(true, Ordering::Relaxed);
            return ControlFlow::Break(());
        }
        let now = Instant::now();
        let delay = now - e.last;
        e.delays.push(delay);
        let solution = Solution { assignment: merge_matching(&self.solver.split, &m), matching: m };
        let flow = (e.sink)(&solution);
        e.solutions.push(solution);
        e.last = Instant::now();
        if flow.is_break() {
            self.stop.store(true, Ordering::Relaxed);
        }
        flow
    }

    fn step(&self, mut node: SearchNode) -> Step {
        if self.stop.load(Ordering::Relaxed) {
            return Step::Done;
        }
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.max_depth.fetch_max(node.depth, Ordering::Relaxed);
        let Some(deleted) = node.prepare() else { return Step::Done };
        self.deletions.fetch_add(deleted, Ordering::Relaxed);

        let r = self.solver.nf.r;
        let (m_w, m_f) = extremal_matchings(&node.digraph);
        if m_w.len() < r || m_f.len() < r || !node.v_in_live() {
            return Step::Done;
        }
        match self.mode {
            Mode::WorkerOptimal | Mode::FirmOptimal => {
                let m = if self.mode == Mode::WorkerOptimal { m_w } else { m_f };
                let _ = self.emit(m);
                self.stop.store(true, Ordering::Relaxed);
                return Step::Done;
            }
            Mode::All if m_w == m_f => {
                let _ = self.emit(m_w);
                return Step::Done;
            }
            Mode::All => {}
        }
        let v = pick_branch_vertex(&m_w, &m_f);
        let depth = node.depth + 1;
        let mut forced = node.v_in.clone();
        forced.insert(v);
        let with = SearchNode { digraph: node.digraph.snapshot(), v_in: forced, depth };
        node.digraph.set_flag(v, Flag::Out);
        let without = SearchNode { digraph: node.digraph, v_in: node.v_in, depth };
        Step::Branch(Box::new(with), Box::new(without))
    }

    fn run(&self, node: SearchNode) {
        if let Step::Branch(with, without) = self.step(node) {
            self.run(*with);
            self.run(*without);
        }
    }
}

impl<F: FnMut(&Solution) -> ControlFlow<()> + Send> Shared<'_, F> {
    fn run_parallel(&self, node: SearchNode) {
        if let Step::Branch(with, without) = self.step(node) {
            rayon::join(|| self.run_parallel(*with), || self.run_parallel(*without));
        }
    }
}

impl Solver {
    pub fn new(inst: &Instance) -> Self {
        let split = split_firms(inst);
        let nf = NormalForm::of(&split);
        Solver { split, nf }
    }

    pub fn split(&self) -> &SplitInstance {
        &self.split
    }

    pub fn normal_form(&self) -> &NormalForm {
        &self.nf
    }

    pub fn reduce(&self, ac: &AssignmentConstraints) -> ConstraintReduction {
        reduce_constraints(&self.split, &self.nf.digraph, ac)
    }

    pub fn root_node(&self, pc: &PairConstraints) -> SearchNode {
        SearchNode::root(&self.nf, pc)
    }

    pub fn solve(&self, ac: &AssignmentConstraints, opts: &Options) -> SolutionStream {
        self.solve_with(ac, opts, |_| ControlFlow::Continue(()))
    }

    /// Like [`Self::solve`], handing each solution to `sink` as soon as it is
    /// found. Returning `Break` from `sink` ends the search.
    pub fn solve_with<F>(&self, ac: &AssignmentConstraints, opts: &Options, sink: F) -> SolutionStream
    where
        F: FnMut(&Solution) -> ControlFlow<()> + Send,
    {
        let reduction = self.reduce(ac);
        match reduction.verdict {
            Verdict::Infeasible(reason) => SolutionStream {
                infeasible: Some(reason),
                dropped: reduction.dropped,
                r: self.nf.r,
                ..SolutionStream::default()
            },
            Verdict::Feasible => {
                let mut out = self.solve_pairs_with(&reduction.pair_constraints, opts, sink);
                out.dropped = reduction.dropped;
                out
            }
        }
    }

    /// Searches directly over vertex constraints on the split market.
    pub fn solve_pairs(&self, pc: &PairConstraints, opts: &Options) -> SolutionStream {
        self.solve_pairs_with(pc, opts, |_| ControlFlow::Continue(()))
    }

    pub fn solve_pairs_with<F>(&self, pc: &PairConstraints, opts: &Options, sink: F) -> SolutionStream
    where
        F: FnMut(&Solution) -> ControlFlow<()> + Send,
    {
        let start = Instant::now();
        let shared = Shared {
            solver: self,
            mode: opts.mode,
            stop: AtomicBool::new(false),
            calls: AtomicUsize::new(0),
            deletions: AtomicUsize::new(0),
            max_depth: AtomicUsize::new(0),
            emitter: Mutex::new(Emitter {
                sink,
                limit: opts.limit,
                solutions: Vec::new(),
                delays: Vec::new(),
                last: start,
                truncated: false,
            }),
        };
        let root = self.root_node(pc);
        if opts.parallel {
            shared.run_parallel(root);
        } else {
            shared.run(root);
        }
        let e = shared.emitter.into_inner().expect("emitter lock");
        SolutionStream {
            stats: SearchStats {
                calls: shared.calls.into_inner(),
                solutions: e.solutions.len(),
                deletions: shared.deletions.into_inner(),
                max_depth: shared.max_depth.into_inner(),
                delays: e.delays,
                tail: e.last.elapsed(),
            },
            solutions: e.solutions,
            truncated: e.truncated,
            infeasible: None,
            dropped: Vec::new(),
            r: self.nf.r,
        }
    }
}
