//! Stable matchings of many-to-one markets under assignment constraints.
//!
//! The pipeline: split every multi-position firm into single-position copies,
//! build the matching digraph, reduce it to its normal form, compile the
//! constraints into forced/forbidden vertices, then branch. Each stable
//! matching that satisfies the constraints is produced once, with polynomial
//! work between consecutive solutions.
//!
//! ```
//! use stable_constraints::{markets, Mode, Options, Solver};
//!
//! let inst = markets::example_one();
//! let ac = markets::example_one_question(&inst);
//! let out = Solver::new(&inst).solve(&ac, &Options::default());
//! assert_eq!(out.solutions.len(), 3);
//! # let _ = Mode::All;
//! ```

pub mod digraph;
pub mod enumerate;
pub mod format;
pub mod idua;
pub mod markets;
pub mod model;
pub mod oracle;
pub mod reduction;

pub use digraph::{Flag, MatchingDigraph};
pub use enumerate::{Mode, Options, SearchStats, Solution, SolutionStream, Solver};
pub use idua::{extremal_matchings, run_idua, NormalForm, RuralHospitals};
pub use model::{
    blocking_pairs, is_blocking_pair, is_stable, AssignmentConstraints, FirmId, Instance,
    ManyToOneMatching, Matching, PairConstraints, RawInstance, Vertex, WorkerId,
};
pub use reduction::{merge_matching, reduce_constraints, split_firms, SplitInstance};
