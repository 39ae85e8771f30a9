//! Reference markets: the six-worker running example, the three-cycle that
//! defeats naive deletion, and the 2x2-block family with exponentially many
//! stable matchings.

use thiserror::Error;

use crate::model::{AssignmentConstraints, FirmId, Instance, RawInstance, WorkerId};

/// Six workers, four firms, `f4` with two positions. `w6` and `f3` find each
/// other unacceptable.
pub fn example_one() -> Instance {
    let raw = RawInstance::from_lists(
        &[
            ("w1", &["f1", "f2", "f3", "f4"]),
            ("w2", &["f2", "f1", "f4", "f3"]),
            ("w3", &["f3", "f4", "f1", "f2"]),
            ("w4", &["f4", "f3", "f2", "f1"]),
            ("w5", &["f4", "f1", "f2", "f3"]),
            ("w6", &["f2", "f1", "f4"]),
        ],
        &[
            ("f1", 1, &["w5", "w4", "w3", "w2", "w1", "w6"]),
            ("f2", 1, &["w3", "w5", "w4", "w1", "w2", "w6"]),
            ("f3", 1, &["w2", "w1", "w5", "w4", "w3"]),
            ("f4", 2, &["w5", "w1", "w2", "w3", "w4", "w6"]),
        ],
    );
    Instance::from_raw(&raw).expect("example one is well formed")
}

/// `w4` not at `f1`, `f2` staffed only from `{w1, w6}`, `w6` not at `f4`.
pub fn example_one_question(inst: &Instance) -> AssignmentConstraints {
    AssignmentConstraints::builder(inst)
        .w_out("f1", &["w4"])
        .w_in("f2", &["w1", "w6"])
        .w_out("f4", &["w6"])
        .build()
        .expect("participants exist in example one")
}

/// Complete 3x3 market with cyclic preferences. It is already reduced, and
/// `{(w1,f2), (w2,f1), (w3,f3)}` is blocked by `(w3,f1)`.
pub fn cyclic_three() -> Instance {
    let raw = RawInstance::from_lists(
        &[
            ("w1", &["f3", "f2", "f1"]),
            ("w2", &["f1", "f3", "f2"]),
            ("w3", &["f2", "f1", "f3"]),
        ],
        &[
            ("f1", 1, &["w1", "w3", "w2"]),
            ("f2", 1, &["w2", "w1", "w3"]),
            ("f3", 1, &["w3", "w2", "w1"]),
        ],
    );
    Instance::from_raw(&raw).expect("cyclic market is well formed")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("block family size must be even, got {0}")]
    Odd(usize),
    #[error("block family size must be at least 4, got {0}")]
    TooSmall(usize),
}

/// `n` workers and `n` single-position firms in `n/2` independent 2x2 blocks.
///
/// In block `i` (1-based, covering indices `2i-1` and `2i`) each worker ranks
/// its own-index firm first and each firm ranks the other worker first, so
/// every block is a 4-cycle with two stable choices: `2^(n/2)` in total.
pub fn block_family(n: usize) -> Result<Instance, FamilyError> {
    if n % 2 == 1 {
        return Err(FamilyError::Odd(n));
    }
    if n < 4 {
        return Err(FamilyError::TooSmall(n));
    }
    let w = |i: usize| format!("w{i}");
    let f = |i: usize| format!("f{i}");
    let mut raw = RawInstance::default();
    for b in 0..n / 2 {
        let (a, c) = (2 * b + 1, 2 * b + 2);
        raw.workers.extend([w(a), w(c)]);
        raw.firms.extend([(f(a), 1), (f(c), 1)]);
        raw.worker_prefs.push((w(a), vec![f(a), f(c)]));
        raw.worker_prefs.push((w(c), vec![f(c), f(a)]));
        raw.firm_prefs.push((f(a), vec![w(c), w(a)]));
        raw.firm_prefs.push((f(c), vec![w(a), w(c)]));
    }
    Ok(Instance::from_raw(&raw).expect("block family is well formed"))
}

/// Forbids the `k`-th worker at the `k`-th firm for every `k >= from` (1-based).
pub fn forbid_diagonal(inst: &Instance, from: usize) -> AssignmentConstraints {
    let mut ac = AssignmentConstraints::new();
    let diagonal = inst.num_workers().min(inst.num_firms());
    for k in from.saturating_sub(1)..diagonal {
        ac.f_out.entry(WorkerId(k)).or_default().insert(FirmId(k));
    }
    ac
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_rejects_bad_sizes() {
        assert_eq!(block_family(2).unwrap_err(), FamilyError::TooSmall(2));
        assert_eq!(block_family(7).unwrap_err(), FamilyError::Odd(7));
        assert_eq!(block_family(4).unwrap().num_workers(), 4);
    }

    #[test]
    fn family_block_shape() {
        let inst = block_family(4).unwrap();
        let names = |fs: &[crate::FirmId]| fs.iter().map(|f| inst.firm_name(*f).to_string()).collect::<Vec<_>>();
        assert_eq!(names(inst.worker_prefs(inst.worker_id("w3").unwrap())), ["f3", "f4"]);
        assert_eq!(names(inst.worker_prefs(inst.worker_id("w4").unwrap())), ["f4", "f3"]);
        let f3 = inst.firm_id("f3").unwrap();
        let first = inst.firm_prefs(f3)[0];
        assert_eq!(inst.worker_name(first), "w4");
    }

    #[test]
    fn diagonal_constraints_start_at_k() {
        let inst = block_family(8).unwrap();
        let ac = forbid_diagonal(&inst, 5);
        assert_eq!(ac.f_out.len(), 4);
        assert!(ac.f_out.keys().all(|w| w.0 >= 4));
    }
}
