//! Tree mappings and their correspondence with edit scripts.
//!
//! A mapping is a set of node pairs `(i, j)` between a source forest `x` and a
//! target forest `y`, one-to-one, order-preserving and ancestry-preserving.
//! Its cost is the replacement cost of the mapped pairs plus the deletion
//! cost of unmapped source nodes and the insertion cost of unmapped target
//! nodes.

use std::collections::BTreeSet;
use std::fmt;

use crate::cost::CostFunction;
use crate::edits::{strip_comment, Edit, Script};
use crate::error::{ContractError, ParseError};
use crate::tree::{Forest, PreorderIndex};

/// A set of `(source, target)` node pairs, kept sorted.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mapping(BTreeSet<(usize, usize)>);

impl Mapping {
    /// The empty mapping.
    pub fn new() -> Self {
        Mapping(BTreeSet::new())
    }

    /// Adds a pair.
    pub fn insert(&mut self, i: usize, j: usize) {
        self.0.insert((i, j));
    }

    /// Whether the pair is present.
    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.0.contains(&(i, j))
    }

    /// Pairs in ascending order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.0.iter().copied()
    }

    /// Number of pairs.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Whether there are no pairs.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Checks index ranges and the four mapping constraints: one-to-one in
    /// both directions, order preservation and ancestry preservation.
    pub fn validate(&self, x: &Forest, y: &Forest) -> Result<(), ContractError> {
        self.validate_indexed(&PreorderIndex::new(x), &PreorderIndex::new(y))
    }

    pub(crate) fn validate_indexed(
        &self,
        x: &PreorderIndex,
        y: &PreorderIndex,
    ) -> Result<(), ContractError> {
        for (i, j) in self.pairs() {
            if !(1..=x.len()).contains(&i) {
                return Err(ContractError::IndexOutOfRange { index: i, len: x.len() });
            }
            if !(1..=y.len()).contains(&j) {
                return Err(ContractError::IndexOutOfRange { index: j, len: y.len() });
            }
        }
        let pairs: Vec<_> = self.pairs().collect();
        for (n, &(i, j)) in pairs.iter().enumerate() {
            for &(k, l) in &pairs[n + 1..] {
                let broken = if i == k {
                    Some("source node mapped twice")
                } else if j == l {
                    Some("target node mapped twice")
                } else if (i > k) != (j > l) {
                    Some("pre-order is not preserved")
                } else if x.is_ancestor(i, k) != y.is_ancestor(j, l)
                    || x.is_ancestor(k, i) != y.is_ancestor(l, j)
                {
                    Some("ancestry is not preserved")
                } else {
                    None
                };
                if let Some(reason) = broken {
                    return Err(ContractError::InvalidMapping(format!(
                        "({i},{j}) and ({k},{l}): {reason}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Cost of the mapping; indices are assumed to be in range.
    pub fn cost(&self, x: &Forest, y: &Forest, costs: &CostFunction) -> f64 {
        self.cost_indexed(&PreorderIndex::new(x), &PreorderIndex::new(y), costs)
    }

    pub(crate) fn cost_indexed(
        &self,
        x: &PreorderIndex,
        y: &PreorderIndex,
        costs: &CostFunction,
    ) -> f64 {
        let mut mapped_x = vec![false; x.len() + 1];
        let mut mapped_y = vec![false; y.len() + 1];
        let mut total = 0.0;
        for (i, j) in self.pairs() {
            mapped_x[i] = true;
            mapped_y[j] = true;
            total += costs.rep(x.label(i), y.label(j));
        }
        for i in (1..=x.len()).filter(|&i| !mapped_x[i]) {
            total += costs.del(x.label(i));
        }
        for j in (1..=y.len()).filter(|&j| !mapped_y[j]) {
            total += costs.ins(y.label(j));
        }
        total
    }

    /// An edit script realising the mapping: replacements of mapped nodes in
    /// ascending order, deletions of unmapped source nodes in descending
    /// order, then insertions of unmapped target nodes in ascending order.
    ///
    /// The script transforms `x` into `y` at the same cost as the mapping.
    pub fn to_script(&self, x: &Forest, y: &Forest) -> Result<Script, ContractError> {
        let xi = PreorderIndex::new(x);
        let yi = PreorderIndex::new(y);
        self.validate_indexed(&xi, &yi)?;
        Ok(self.to_script_indexed(&xi, &yi, y))
    }

    pub(crate) fn to_script_indexed(&self, x: &PreorderIndex, y: &PreorderIndex, y_forest: &Forest) -> Script {
        let mut script = Vec::new();
        let mut mapped_x = vec![false; x.len() + 1];
        let mut mapped_y = vec![false; y.len() + 1];
        for (i, j) in self.pairs() {
            mapped_x[i] = true;
            mapped_y[j] = true;
            script.push(Edit::replace(i, y.label(j)));
        }
        for i in (1..=x.len()).rev().filter(|&i| !mapped_x[i]) {
            script.push(Edit::delete(i));
        }
        let inserted: BTreeSet<usize> = (1..=y.len()).filter(|&j| !mapped_y[j]).collect();
        let (_, adopted) = num_descendants(y_forest, 0, &inserted);
        for j in (1..=y.len()).filter(|&j| !mapped_y[j]) {
            let rank = y.child_rank(j);
            script.push(Edit::insert(y.parent(j), y.label(j), rank, rank + adopted[j]));
        }
        Script(script)
    }

    /// The mapping induced by a script: node identities are tracked through
    /// the edits, starting from the identity on `x`.
    pub fn from_script(x: &Forest, script: &Script) -> Mapping {
        let mut current = x.clone();
        // pairs[s] = (source node, its current position)
        let mut pairs: Vec<(usize, usize)> = (1..=x.len()).map(|i| (i, i)).collect();
        for edit in script.edits() {
            if !edit.apply(&mut current) {
                continue;
            }
            match edit {
                Edit::Replace { .. } => {}
                Edit::Delete { node } => {
                    pairs.retain(|&(_, j)| j != *node);
                    for (_, j) in pairs.iter_mut() {
                        if *j > *node {
                            *j -= 1;
                        }
                    }
                }
                Edit::Insert { parent, first, .. } => {
                    let created = PreorderIndex::new(&current).children(*parent)[first - 1];
                    for (_, j) in pairs.iter_mut() {
                        if *j >= created {
                            *j += 1;
                        }
                    }
                }
            }
        }
        Mapping(pairs.into_iter().collect())
    }

    /// Parses one `i j` pair per line; blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut mapping = Mapping::new();
        for (n, line) in text.lines().enumerate() {
            let line = strip_comment(line).trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| ParseError::Line { line: n + 1, message };
            let numbers: Vec<usize> = line
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| err(format!("expected an index, found '{t}'"))))
                .collect::<Result<_, _>>()?;
            match numbers.as_slice() {
                [i, j] => mapping.insert(*i, *j),
                _ => return Err(err("expected two indices".into())),
            }
        }
        Ok(mapping)
    }

    /// Parses a JSON array of pairs, e.g. `[[1,1],[2,2]]`.
    pub fn from_json(text: &str) -> Result<Self, ParseError> {
        let pairs: Vec<(usize, usize)> =
            serde_json::from_str(text).map_err(|e| ParseError::Json(e.to_string()))?;
        Ok(pairs.into_iter().collect())
    }

    /// Parses either the line format or, if the input starts with `[`, JSON.
    pub fn parse_any(text: &str) -> Result<Self, ParseError> {
        if text.trim_start().starts_with('[') {
            Mapping::from_json(text)
        } else {
            Mapping::parse(text)
        }
    }

    /// Serializes to a JSON array of pairs.
    pub fn to_json(&self) -> String {
        let pairs: Vec<(usize, usize)> = self.pairs().collect();
        serde_json::to_string(&pairs).expect("pairs always serialize")
    }
}

impl FromIterator<(usize, usize)> for Mapping {
    fn from_iter<T: IntoIterator<Item = (usize, usize)>>(iter: T) -> Self {
        Mapping(iter.into_iter().collect())
    }
}

impl fmt::Display for Mapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, (i, j)) in self.pairs().enumerate() {
            if n > 0 {
                writeln!(f)?;
            }
            write!(f, "{i} {j}")?;
        }
        Ok(())
    }
}

/// Counts, for a forest `y` whose nodes are numbered from `start + 1`, how
/// many direct children each node must adopt when the nodes in `inserted`
/// are created one by one in pre-order while all other nodes already exist.
///
/// Returns the last node number used and the counts `R[start..]`: `R[start]`
/// for the forest itself, then one entry per node. An existing node counts as
/// one item for its parent; an inserted node passes its own count up instead,
/// since its children are still direct children of its parent when it is
/// created.
pub fn num_descendants(y: &Forest, start: usize, inserted: &BTreeSet<usize>) -> (usize, Vec<usize>) {
    forest_counts(&y.0, start, inserted)
}

fn forest_counts(trees: &[crate::tree::Tree], start: usize, inserted: &BTreeSet<usize>) -> (usize, Vec<usize>) {
    let mut own = 0;
    let mut nested = Vec::new();
    let mut next = start;
    for tree in trees {
        next += 1;
        let node = next;
        let (last, counts) = forest_counts(&tree.children, node, inserted);
        own += if inserted.contains(&node) { counts[0] } else { 1 };
        nested.extend(counts);
        next = last;
    }
    let mut out = Vec::with_capacity(nested.len() + 1);
    out.push(own);
    out.extend(nested);
    (next, out)
}
