//! Plain-text market files and machine-readable solution records.
//!
//! ```text
//! # comments run to end of line
//! [workers]
//! w1 w2 w3
//! [firms]
//! f1 1
//! f2 2
//! [worker-prefs]
//! w1: f1 f2
//! [firm-prefs]
//! f1: w1 w3
//! [constraints]
//! w_out f1: w4
//! f_in w2: f1 f2
//! ```
//!
//! `[constraints]` is optional. Its keys are `f_in`, `f_out` (a worker and
//! firms) and `w_in`, `w_out` (a firm and workers).

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use serde_json::{json, Value};
use thiserror::Error;

use crate::enumerate::{SearchStats, Solution};
use crate::model::{AssignmentConstraints, FirmId, Instance, RawInstance, ValidationReport, WorkerId};
use crate::reduction::SplitInstance;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineError {
    /// 1-based; 0 for problems with the file as a whole.
    pub line: usize,
    pub message: String,
}

impl fmt::Display for LineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}", self.message)
        } else {
            write!(f, "line {}: {}", self.line, self.message)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("{}", join_lines(.0))]
    Syntax(Vec<LineError>),
    #[error("invalid market:\n{0}")]
    Invalid(ValidationReport),
}

fn join_lines(errors: &[LineError]) -> String {
    errors.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Workers,
    Firms,
    WorkerPrefs,
    FirmPrefs,
    Constraints,
}

impl Section {
    fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "workers" => Section::Workers,
            "firms" => Section::Firms,
            "worker-prefs" => Section::WorkerPrefs,
            "firm-prefs" => Section::FirmPrefs,
            "constraints" => Section::Constraints,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Key {
    FIn,
    FOut,
    WIn,
    WOut,
}

struct ConstraintLine {
    line: usize,
    key: Key,
    owner: String,
    members: Vec<String>,
}

fn valid_name(s: &str) -> bool {
    !s.is_empty() && !s.contains([':', '#', '[', ']'])
}

/// Parses a market file. Syntax errors are collected with their line numbers
/// and reported together; structural problems with the market itself come
/// back as a validation report.
pub fn parse_instance(text: &str) -> Result<(Instance, AssignmentConstraints), FormatError> {
    let mut raw = RawInstance::default();
    let mut errors = Vec::new();
    let mut constraints = Vec::new();
    let mut section = None;
    let mut seen = BTreeSet::new();
    let mut err = |line: usize, message: String| errors.push(LineError { line, message });

    for (i, full) in text.lines().enumerate() {
        let line = i + 1;
        let content = full.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[') {
            let Some(name) = name.strip_suffix(']') else {
                err(line, format!("unterminated section header `{content}`"));
                continue;
            };
            match Section::parse(name.trim()) {
                Some(s) if !seen.insert(name.trim().to_string()) => {
                    err(line, format!("section [{}] appears twice", name.trim()));
                    section = Some(s);
                }
                Some(s) => section = Some(s),
                None => {
                    err(line, format!("unknown section [{}]", name.trim()));
                    section = None;
                }
            }
            continue;
        }
        let Some(current) = section else {
            if seen.is_empty() {
                err(line, "content before the first section header".into());
            }
            continue;
        };
        match current {
            Section::Workers => {
                for name in content.split_whitespace() {
                    if valid_name(name) {
                        raw.workers.push(name.to_string());
                    } else {
                        err(line, format!("bad worker name `{name}`"));
                    }
                }
            }
            Section::Firms => {
                let parts: Vec<&str> = content.split_whitespace().collect();
                match parts.as_slice() {
                    [name, quota] if valid_name(name) => match quota.parse::<usize>() {
                        Ok(q) => raw.firms.push((name.to_string(), q)),
                        Err(_) => err(line, format!("quota `{quota}` is not a non-negative integer")),
                    },
                    _ => err(line, "expected `<firm> <quota>`".into()),
                }
            }
            Section::WorkerPrefs | Section::FirmPrefs => match split_list(content) {
                Some((owner, members)) if valid_name(owner) => {
                    let entry = (owner.to_string(), members.iter().map(|s| s.to_string()).collect());
                    if current == Section::WorkerPrefs {
                        raw.worker_prefs.push(entry);
                    } else {
                        raw.firm_prefs.push(entry);
                    }
                }
                _ => err(line, "expected `<name>: <names...>`".into()),
            },
            Section::Constraints => {
                let Some((head, members)) = split_list(content) else {
                    err(line, "expected `<key> <name>: <names...>`".into());
                    continue;
                };
                let head: Vec<&str> = head.split_whitespace().collect();
                let [key, owner] = head.as_slice() else {
                    err(line, "expected `<key> <name>: <names...>`".into());
                    continue;
                };
                let key = match *key {
                    "f_in" => Key::FIn,
                    "f_out" => Key::FOut,
                    "w_in" => Key::WIn,
                    "w_out" => Key::WOut,
                    other => {
                        err(line, format!("unknown constraint key `{other}`"));
                        continue;
                    }
                };
                constraints.push(ConstraintLine {
                    line,
                    key,
                    owner: owner.to_string(),
                    members: members.iter().map(|s| s.to_string()).collect(),
                });
            }
        }
    }
    for required in ["workers", "firms", "worker-prefs", "firm-prefs"] {
        if !seen.contains(required) {
            err(0, format!("missing section [{required}]"));
        }
    }
    if !errors.is_empty() {
        return Err(FormatError::Syntax(errors));
    }

    let inst = Instance::from_raw(&raw).map_err(FormatError::Invalid)?;
    let mut ac = AssignmentConstraints::new();
    let worker = |name: &str, line: usize, errors: &mut Vec<LineError>| {
        let id = inst.worker_id(name);
        if id.is_none() {
            errors.push(LineError { line, message: format!("unknown worker `{name}`") });
        }
        id
    };
    let firm = |name: &str, line: usize, errors: &mut Vec<LineError>| {
        let id = inst.firm_id(name);
        if id.is_none() {
            errors.push(LineError { line, message: format!("unknown firm `{name}`") });
        }
        id
    };
    for c in constraints {
        match c.key {
            Key::FIn | Key::FOut => {
                let Some(w) = worker(&c.owner, c.line, &mut errors) else { continue };
                let fs: BTreeSet<FirmId> =
                    c.members.iter().filter_map(|f| firm(f, c.line, &mut errors)).collect();
                let map = if c.key == Key::FIn { &mut ac.f_in } else { &mut ac.f_out };
                map.entry(w).or_default().extend(fs);
            }
            Key::WIn | Key::WOut => {
                let Some(f) = firm(&c.owner, c.line, &mut errors) else { continue };
                let ws: BTreeSet<WorkerId> =
                    c.members.iter().filter_map(|w| worker(w, c.line, &mut errors)).collect();
                let map = if c.key == Key::WIn { &mut ac.w_in } else { &mut ac.w_out };
                map.entry(f).or_default().extend(ws);
            }
        }
    }
    if !errors.is_empty() {
        return Err(FormatError::Syntax(errors));
    }
    Ok((inst, ac))
}

fn split_list(content: &str) -> Option<(&str, Vec<&str>)> {
    let (owner, rest) = content.split_once(':')?;
    let owner = owner.trim();
    (!owner.is_empty()).then(|| (owner, rest.split_whitespace().collect()))
}

/// Renders a market and its constraints; [`parse_instance`] reads it back
/// unchanged.
pub fn serialize_instance(inst: &Instance, ac: &AssignmentConstraints) -> String {
    let mut out = String::new();
    let wn = |w: &WorkerId| inst.worker_name(*w);
    let fname = |f: &FirmId| inst.firm_name(*f);
    out.push_str("[workers]\n");
    out.push_str(&inst.workers().map(|w| wn(&w)).collect::<Vec<_>>().join(" "));
    out.push_str("\n\n[firms]\n");
    for f in inst.firms() {
        let _ = writeln!(out, "{} {}", fname(&f), inst.quota(f));
    }
    out.push_str("\n[worker-prefs]\n");
    for w in inst.workers() {
        let list: Vec<&str> = inst.worker_prefs(w).iter().map(fname).collect();
        let _ = writeln!(out, "{}: {}", wn(&w), list.join(" "));
    }
    out.push_str("\n[firm-prefs]\n");
    for f in inst.firms() {
        let list: Vec<&str> = inst.firm_prefs(f).iter().map(wn).collect();
        let _ = writeln!(out, "{}: {}", fname(&f), list.join(" "));
    }
    if ac.f_in.is_empty() && ac.f_out.is_empty() && ac.w_in.is_empty() && ac.w_out.is_empty() {
        return out;
    }
    out.push_str("\n[constraints]\n");
    for (key, map) in [("f_in", &ac.f_in), ("f_out", &ac.f_out)] {
        for (w, fs) in map {
            let list: Vec<&str> = fs.iter().map(fname).collect();
            let _ = writeln!(out, "{key} {}: {}", wn(w), list.join(" "));
        }
    }
    for (key, map) in [("w_in", &ac.w_in), ("w_out", &ac.w_out)] {
        for (f, ws) in map {
            let list: Vec<&str> = ws.iter().map(wn).collect();
            let _ = writeln!(out, "{key} {}: {}", fname(f), list.join(" "));
        }
    }
    out.lines().map(|l| format!("{}\n", l.trim_end())).collect()
}

/// One solution as a JSON object:
/// `{"type":"solution","index":1,"assignment":[["w1","f2"],...],"positions":[["w1","f2"],...],"vertices":[[1,2],...]}`.
/// `index` and `vertices` are 1-based; `positions` names firm copies as
/// `f4#1`, `f4#2` for multi-position firms.
pub fn solution_record(split: &SplitInstance, index: usize, s: &Solution) -> Value {
    let inst = split.base();
    let assignment: Vec<[&str; 2]> = s
        .assignment
        .pairs()
        .map(|(w, f)| [inst.worker_name(w), inst.firm_name(f)])
        .collect();
    let positions: Vec<[String; 2]> = s
        .matching
        .iter()
        .map(|v| [inst.worker_name(WorkerId(v.row)).to_string(), split.column_name(v.col)])
        .collect();
    let vertices: Vec<[usize; 2]> = s.matching.iter().map(|v| [v.row + 1, v.col + 1]).collect();
    json!({
        "type": "solution",
        "index": index,
        "assignment": assignment,
        "positions": positions,
        "vertices": vertices,
    })
}

/// Closing record: `{"type":"summary","solutions":..,"truncated":..,"calls":..,"r":..}`.
pub fn summary_record(stats: &SearchStats, truncated: bool, r: usize) -> Value {
    json!({
        "type": "summary",
        "solutions": stats.solutions,
        "truncated": truncated,
        "calls": stats.calls,
        "deletions": stats.deletions,
        "max_depth": stats.max_depth,
        "r": r,
    })
}

/// `{"type":"infeasible","reason":"..."}`.
pub fn infeasible_record(reason: &str) -> Value {
    json!({ "type": "infeasible", "reason": reason })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markets;

    #[test]
    fn example_one_round_trips() {
        let inst = markets::example_one();
        let ac = markets::example_one_question(&inst);
        let text = serialize_instance(&inst, &ac);
        assert!(text.contains("f4 2\n"));
        let (inst2, ac2) = parse_instance(&text).unwrap();
        assert_eq!(inst2, inst);
        assert_eq!(ac2, ac);
        assert_eq!(inst2.quota(inst2.firm_id("f4").unwrap()), 2);
    }

    #[test]
    fn empty_constraints_block() {
        let inst = markets::cyclic_three();
        let text = serialize_instance(&inst, &AssignmentConstraints::new()) + "[constraints]\n";
        let (_, ac) = parse_instance(&text).unwrap();
        assert!(ac.is_empty());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = "[workers]\nw1\n[firms]\nf1 x\n[worker-prefs]\nw1 f1\n[firm-prefs]\nf1: w1\n[bogus]\n";
        let FormatError::Syntax(errs) = parse_instance(text).unwrap_err() else { panic!() };
        let lines: Vec<usize> = errs.iter().map(|e| e.line).collect();
        assert_eq!(lines, vec![4, 6, 9]);
    }

    #[test]
    fn unknown_keys_and_names_are_rejected() {
        let base = serialize_instance(&markets::cyclic_three(), &AssignmentConstraints::new());
        let bad_key = format!("{base}[constraints]\nf_maybe w1: f1\n");
        assert!(matches!(parse_instance(&bad_key), Err(FormatError::Syntax(_))));
        let bad_name = format!("{base}[constraints]\nf_in w1: f9\n");
        let FormatError::Syntax(errs) = parse_instance(&bad_name).unwrap_err() else { panic!() };
        assert!(errs[0].message.contains("f9"));
    }

    #[test]
    fn structural_problems_become_validation_reports() {
        let text = "[workers]\nw1\n[firms]\nf1 1\n[worker-prefs]\nw1: f1\n[firm-prefs]\nf1:\n";
        assert!(matches!(parse_instance(text), Err(FormatError::Invalid(_))));
    }
}
