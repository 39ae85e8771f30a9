//! The matching digraph: one vertex per acceptable (worker, position) pair.
//!
//! Arcs are never stored. Inside a row, `(w,c) -> (w,c')` whenever the
//! worker prefers `c'`; inside a column, `(w,c) -> (w',c)` whenever the
//! position prefers `w'`. Both are answered from rank tables that are shared
//! between snapshots; only liveness, flags and the per-row/per-column cursors
//! are copied.
//!
//! Every row and column keeps a head cursor (its most preferred live entry,
//! the vertex with out-degree zero in that direction) and a tail cursor (one
//! past its least preferred live entry). Cursors only move inward, so the
//! total cursor work over any sequence of deletions is linear in the list
//! lengths.

use std::fmt::Write as _;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::model::Vertex;

const ABSENT: u32 = u32::MAX;

/// Role of a vertex in the current constraint set.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Flag {
    #[default]
    None,
    In,
    Out,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DigraphError {
    #[error("row {row} lists column {col} but column {col} does not list row {row}")]
    Asymmetric { row: usize, col: usize },
    #[error("index out of range in row {row} / column {col}")]
    OutOfRange { row: usize, col: usize },
    #[error("duplicate entry ({row},{col})")]
    Duplicate { row: usize, col: usize },
}

#[derive(Debug, PartialEq, Eq)]
struct Tables {
    rows: usize,
    cols: usize,
    row_prefs: Vec<Vec<usize>>,
    col_prefs: Vec<Vec<usize>>,
    /// `row_rank[r * cols + c]`
    row_rank: Vec<u32>,
    /// `col_rank[c * rows + r]`
    col_rank: Vec<u32>,
}

#[derive(Debug, Clone)]
pub struct MatchingDigraph {
    tables: Arc<Tables>,
    live: Vec<bool>,
    flags: Vec<Flag>,
    row_head: Vec<usize>,
    row_tail: Vec<usize>,
    col_head: Vec<usize>,
    col_tail: Vec<usize>,
    row_live: Vec<usize>,
    col_live: Vec<usize>,
    live_count: usize,
}

impl PartialEq for MatchingDigraph {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.tables, &other.tables) || self.tables == other.tables)
            && self.live == other.live
            && self.flags == other.flags
    }
}

impl Eq for MatchingDigraph {}

impl MatchingDigraph {
    /// Builds the full digraph from preference lists over row and column
    /// indices, most preferred first. Acceptability must be mutual.
    pub fn new(
        rows: usize,
        cols: usize,
        row_prefs: Vec<Vec<usize>>,
        col_prefs: Vec<Vec<usize>>,
    ) -> Result<Self, DigraphError> {
        assert_eq!(row_prefs.len(), rows, "one preference list per row");
        assert_eq!(col_prefs.len(), cols, "one preference list per column");
        let mut row_rank = vec![ABSENT; rows * cols];
        let mut col_rank = vec![ABSENT; rows * cols];
        for (r, list) in row_prefs.iter().enumerate() {
            for (k, &c) in list.iter().enumerate() {
                if c >= cols {
                    return Err(DigraphError::OutOfRange { row: r, col: c });
                }
                if row_rank[r * cols + c] != ABSENT {
                    return Err(DigraphError::Duplicate { row: r, col: c });
                }
                row_rank[r * cols + c] = k as u32;
            }
        }
        for (c, list) in col_prefs.iter().enumerate() {
            for (k, &r) in list.iter().enumerate() {
                if r >= rows {
                    return Err(DigraphError::OutOfRange { row: r, col: c });
                }
                if col_rank[c * rows + r] != ABSENT {
                    return Err(DigraphError::Duplicate { row: r, col: c });
                }
                col_rank[c * rows + r] = k as u32;
            }
        }
        for r in 0..rows {
            for c in 0..cols {
                if (row_rank[r * cols + c] == ABSENT) != (col_rank[c * rows + r] == ABSENT) {
                    return Err(DigraphError::Asymmetric { row: r, col: c });
                }
            }
        }
        let live: Vec<bool> = row_rank.iter().map(|&k| k != ABSENT).collect();
        let row_live: Vec<usize> = row_prefs.iter().map(Vec::len).collect();
        let col_live: Vec<usize> = col_prefs.iter().map(Vec::len).collect();
        let live_count = row_live.iter().sum();
        Ok(MatchingDigraph {
            live,
            flags: vec![Flag::None; rows * cols],
            row_head: vec![0; rows],
            row_tail: row_live.clone(),
            col_head: vec![0; cols],
            col_tail: col_live.clone(),
            row_live,
            col_live,
            live_count,
            tables: Arc::new(Tables { rows, cols, row_prefs, col_prefs, row_rank, col_rank }),
        })
    }

    pub fn rows(&self) -> usize {
        self.tables.rows
    }

    pub fn cols(&self) -> usize {
        self.tables.cols
    }

    fn idx(&self, v: Vertex) -> usize {
        v.row * self.tables.cols + v.col
    }

    pub fn is_live(&self, v: Vertex) -> bool {
        v.row < self.rows() && v.col < self.cols() && self.live[self.idx(v)]
    }

    pub fn live_count(&self) -> usize {
        self.live_count
    }

    pub fn row_len(&self, row: usize) -> usize {
        self.row_live[row]
    }

    pub fn col_len(&self, col: usize) -> usize {
        self.col_live[col]
    }

    /// Live vertices in row-major order.
    pub fn live_vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        let cols = self.cols();
        self.live
            .iter()
            .enumerate()
            .filter(|(_, &l)| l)
            .map(move |(i, _)| Vertex::new(i / cols, i % cols))
    }

    /// Live columns of `row`, most preferred first.
    pub fn row_entries(&self, row: usize) -> impl Iterator<Item = usize> + '_ {
        let prefs = &self.tables.row_prefs[row];
        prefs[self.row_head[row]..self.row_tail[row]]
            .iter()
            .copied()
            .filter(move |&c| self.live[row * self.tables.cols + c])
    }

    /// Live rows of `col`, most preferred first.
    pub fn col_entries(&self, col: usize) -> impl Iterator<Item = usize> + '_ {
        let prefs = &self.tables.col_prefs[col];
        prefs[self.col_head[col]..self.col_tail[col]]
            .iter()
            .copied()
            .filter(move |&r| self.live[r * self.tables.cols + col])
    }

    /// The worker's preference position for this column (0 = favourite),
    /// `None` if never acceptable.
    pub fn row_rank(&self, v: Vertex) -> Option<usize> {
        let k = self.tables.row_rank[self.idx(v)];
        (k != ABSENT).then_some(k as usize)
    }

    pub fn col_rank(&self, v: Vertex) -> Option<usize> {
        let k = self.tables.col_rank[v.col * self.tables.rows + v.row];
        (k != ABSENT).then_some(k as usize)
    }

    /// `f'(w)`: the live column the worker likes best.
    pub fn best_col(&self, row: usize) -> Option<usize> {
        (self.row_live[row] > 0).then(|| self.tables.row_prefs[row][self.row_head[row]])
    }

    /// `w'(f)`: the live row the position likes best.
    pub fn best_row(&self, col: usize) -> Option<usize> {
        (self.col_live[col] > 0).then(|| self.tables.col_prefs[col][self.col_head[col]])
    }

    pub fn worst_col(&self, row: usize) -> Option<usize> {
        (self.row_live[row] > 0).then(|| self.tables.row_prefs[row][self.row_tail[row] - 1])
    }

    pub fn worst_row(&self, col: usize) -> Option<usize> {
        (self.col_live[col] > 0).then(|| self.tables.col_prefs[col][self.col_tail[col] - 1])
    }

    /// Number of live vertices in `v`'s row that the worker prefers to `v`.
    ///
    /// # Panics
    /// If `v` is not live.
    pub fn out_degree_w(&self, v: Vertex) -> usize {
        assert!(self.is_live(v), "out-degree of dead vertex {v}");
        let k = self.tables.row_rank[self.idx(v)] as usize;
        let prefs = &self.tables.row_prefs[v.row];
        prefs[self.row_head[v.row]..k]
            .iter()
            .filter(|&&c| self.live[v.row * self.tables.cols + c])
            .count()
    }

    /// Number of live vertices in `v`'s column that the position prefers to `v`.
    ///
    /// # Panics
    /// If `v` is not live.
    pub fn out_degree_f(&self, v: Vertex) -> usize {
        assert!(self.is_live(v), "out-degree of dead vertex {v}");
        let k = self.tables.col_rank[v.col * self.tables.rows + v.row] as usize;
        let prefs = &self.tables.col_prefs[v.col];
        prefs[self.col_head[v.col]..k]
            .iter()
            .filter(|&&r| self.live[r * self.tables.cols + v.col])
            .count()
    }

    /// O(1) test for `out_degree_w(v) == 0`.
    pub fn is_row_head(&self, v: Vertex) -> bool {
        self.best_col(v.row) == Some(v.col) && self.is_live(v)
    }

    /// O(1) test for `out_degree_f(v) == 0`.
    pub fn is_col_head(&self, v: Vertex) -> bool {
        self.best_row(v.col) == Some(v.row) && self.is_live(v)
    }

    /// Removes `v`, moving the cursors of its row and column past dead entries.
    ///
    /// # Panics
    /// If `v` is not live.
    pub fn delete_vertex(&mut self, v: Vertex) {
        assert!(self.is_live(v), "deleting dead vertex {v}");
        let i = self.idx(v);
        self.live[i] = false;
        self.flags[i] = Flag::None;
        self.live_count -= 1;
        self.row_live[v.row] -= 1;
        self.col_live[v.col] -= 1;

        let t = &*self.tables;
        let cols = t.cols;
        let prefs = &t.row_prefs[v.row];
        let (head, tail) = (&mut self.row_head[v.row], &mut self.row_tail[v.row]);
        while *head < *tail && !self.live[v.row * cols + prefs[*head]] {
            *head += 1;
        }
        while *tail > *head && !self.live[v.row * cols + prefs[*tail - 1]] {
            *tail -= 1;
        }

        let prefs = &t.col_prefs[v.col];
        let (head, tail) = (&mut self.col_head[v.col], &mut self.col_tail[v.col]);
        while *head < *tail && !self.live[prefs[*head] * cols + v.col] {
            *head += 1;
        }
        while *tail > *head && !self.live[prefs[*tail - 1] * cols + v.col] {
            *tail -= 1;
        }
    }

    pub fn flag(&self, v: Vertex) -> Flag {
        if self.is_live(v) {
            self.flags[self.idx(v)]
        } else {
            Flag::None
        }
    }

    /// Sets the flag of a live vertex; flags on dead vertices are ignored.
    pub fn set_flag(&mut self, v: Vertex, flag: Flag) {
        if self.is_live(v) {
            let i = self.idx(v);
            self.flags[i] = flag;
        }
    }

    pub fn flagged(&self, flag: Flag) -> impl Iterator<Item = Vertex> + '_ {
        self.live_vertices().filter(move |&v| self.flags[self.idx(v)] == flag)
    }

    /// Independent copy; later changes to either side do not affect the other.
    pub fn snapshot(&self) -> Self {
        self.clone()
    }

    pub fn nonempty_rows(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.rows()).filter(|&r| self.row_live[r] > 0)
    }

    pub fn nonempty_cols(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.cols()).filter(|&c| self.col_live[c] > 0)
    }

    /// Graphviz rendering with transitive arcs omitted: each live vertex
    /// points only at the next more-preferred live vertex of its row and of
    /// its column. Flags become the `class` attribute and a fill colour.
    pub fn to_dot(&self, row_labels: &[String], col_labels: &[String]) -> String {
        let label_r = |r: usize| row_labels.get(r).cloned().unwrap_or_else(|| format!("r{}", r + 1));
        let label_c = |c: usize| col_labels.get(c).cloned().unwrap_or_else(|| format!("c{}", c + 1));
        let id = |v: Vertex| format!("v{}_{}", v.row + 1, v.col + 1);
        let mut out = String::from("digraph matching {\n  node [shape=circle, style=filled];\n");
        for v in self.live_vertices() {
            let (class, color) = match self.flag(v) {
                Flag::None => ("plain", "gray85"),
                Flag::In => ("in", "palegreen"),
                Flag::Out => ("out", "salmon"),
            };
            let _ = writeln!(
                out,
                "  {} [label=\"({},{})\", class=\"{class}\", fillcolor=\"{color}\", pos=\"{},{}!\"];",
                id(v),
                label_r(v.row),
                label_c(v.col),
                v.col,
                self.rows() - v.row
            );
        }
        for r in 0..self.rows() {
            let entries: Vec<usize> = self.row_entries(r).collect();
            for pair in entries.windows(2) {
                let _ = writeln!(
                    out,
                    "  {} -> {} [class=\"worker\"];",
                    id(Vertex::new(r, pair[1])),
                    id(Vertex::new(r, pair[0]))
                );
            }
        }
        for c in 0..self.cols() {
            let entries: Vec<usize> = self.col_entries(c).collect();
            for pair in entries.windows(2) {
                let _ = writeln!(
                    out,
                    "  {} -> {} [class=\"firm\", style=dashed];",
                    id(Vertex::new(pair[1], c)),
                    id(Vertex::new(pair[0], c))
                );
            }
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_by_one() -> MatchingDigraph {
        MatchingDigraph::new(1, 1, vec![vec![0]], vec![vec![0]]).unwrap()
    }

    #[test]
    fn single_vertex() {
        let mut d = one_by_one();
        let v = Vertex::new(0, 0);
        assert_eq!(d.best_col(0), Some(0));
        assert_eq!(d.best_row(0), Some(0));
        assert_eq!(d.out_degree_w(v), 0);
        assert_eq!(d.out_degree_f(v), 0);
        d.delete_vertex(v);
        assert_eq!(d.live_count(), 0);
        assert_eq!(d.best_col(0), None);
        assert_eq!(d.best_row(0), None);
        assert_eq!(d.worst_row(0), None);
    }

    #[test]
    fn rejects_asymmetric_lists() {
        let err = MatchingDigraph::new(1, 2, vec![vec![0, 1]], vec![vec![0], vec![]]).unwrap_err();
        assert_eq!(err, DigraphError::Asymmetric { row: 0, col: 1 });
    }

    #[test]
    fn cursors_skip_interior_holes() {
        // Row 0 ranks columns 2, 0, 1; every column ranks the single row.
        let mut d =
            MatchingDigraph::new(1, 3, vec![vec![2, 0, 1]], vec![vec![0], vec![0], vec![0]]).unwrap();
        d.delete_vertex(Vertex::new(0, 0));
        assert_eq!(d.best_col(0), Some(2));
        assert_eq!(d.worst_col(0), Some(1));
        d.delete_vertex(Vertex::new(0, 1));
        assert_eq!(d.worst_col(0), Some(2));
        assert_eq!(d.row_entries(0).collect::<Vec<_>>(), vec![2]);
    }

    #[test]
    fn snapshot_is_independent() {
        let d = MatchingDigraph::new(2, 2, vec![vec![0, 1], vec![1, 0]], vec![vec![1, 0], vec![0, 1]])
            .unwrap();
        let mut copy = d.snapshot();
        assert_eq!(copy, d);
        copy.delete_vertex(Vertex::new(0, 0));
        assert_eq!(d.live_count(), 4);
        assert_eq!(copy.live_count(), 3);
        assert_ne!(copy, d);

        let empty = MatchingDigraph::new(0, 0, vec![], vec![]).unwrap();
        assert_eq!(empty.snapshot().live_count(), 0);
    }

    #[test]
    fn flags_are_dropped_on_delete() {
        let mut d = one_by_one();
        let v = Vertex::new(0, 0);
        d.set_flag(v, Flag::Out);
        assert_eq!(d.flagged(Flag::Out).count(), 1);
        d.delete_vertex(v);
        assert_eq!(d.flag(v), Flag::None);
        d.set_flag(v, Flag::In);
        assert_eq!(d.flagged(Flag::In).count(), 0);
    }

    #[test]
    #[should_panic(expected = "dead vertex")]
    fn out_degree_of_dead_vertex_panics() {
        let mut d = one_by_one();
        d.delete_vertex(Vertex::new(0, 0));
        d.out_degree_w(Vertex::new(0, 0));
    }

    #[test]
    fn dot_suppresses_transitive_arcs() {
        let d = MatchingDigraph::new(1, 3, vec![vec![0, 1, 2]], vec![vec![0], vec![0], vec![0]]).unwrap();
        let dot = d.to_dot(&["w1".into()], &[]);
        assert_eq!(dot.matches("->").count(), 2);
        assert!(dot.contains("v1_2 -> v1_1"));
        assert!(!dot.contains("v1_3 -> v1_1"));
        assert!(dot.contains("class=\"plain\""));
    }
}
