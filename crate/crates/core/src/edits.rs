//! Node edits and edit scripts.
//!
//! Edits address nodes by 1-based pre-order position in the forest they are
//! applied to. An edit whose indices do not fit the forest leaves it unchanged
//! and costs nothing.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cost::CostFunction;
use crate::error::ParseError;
use crate::tree::{Forest, PreorderIndex, Tree, GAP};

/// A single edit operation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum Edit {
    /// Removes `node`; its children take its place in its parent's child list.
    #[serde(rename = "del")]
    Delete {
        /// Pre-order position of the deleted node.
        node: usize,
    },
    /// Relabels `node`.
    #[serde(rename = "rep")]
    Replace {
        /// Pre-order position of the relabelled node.
        node: usize,
        /// New label.
        label: String,
    },
    /// Inserts a node labelled `label` under `parent` (0 for the root level).
    ///
    /// The new node adopts the children of `parent` at positions
    /// `first..end` (1-based, end exclusive) and sits at position `first`. With
    /// `first == end` it is inserted as a leaf.
    #[serde(rename = "ins")]
    Insert {
        /// Pre-order position of the parent, or 0 for the root level.
        parent: usize,
        /// Label of the new node.
        label: String,
        /// First adopted child position.
        first: usize,
        /// One past the last adopted child position.
        end: usize,
    },
}

impl Edit {
    /// A deletion.
    pub fn delete(node: usize) -> Self {
        Edit::Delete { node }
    }

    /// A replacement.
    pub fn replace(node: usize, label: impl Into<String>) -> Self {
        Edit::Replace {
            node,
            label: label.into(),
        }
    }

    /// An insertion.
    pub fn insert(parent: usize, label: impl Into<String>, first: usize, end: usize) -> Self {
        Edit::Insert {
            parent,
            label: label.into(),
            first,
            end,
        }
    }

    /// Applies the edit in place. Returns whether the forest changed.
    pub fn apply(&self, forest: &mut Forest) -> bool {
        let index = PreorderIndex::new(forest);
        let in_range = |i: usize| (1..=index.len()).contains(&i);
        match self {
            Edit::Delete { node } => {
                if !in_range(*node) {
                    return false;
                }
                let (siblings, pos) = locate(forest, &index, *node);
                let removed = siblings.remove(pos);
                for (offset, child) in removed.children.into_iter().enumerate() {
                    siblings.insert(pos + offset, child);
                }
                true
            }
            Edit::Replace { node, label } => {
                if !in_range(*node) || index.label(*node) == label {
                    return false;
                }
                let (siblings, pos) = locate(forest, &index, *node);
                siblings[pos].label = label.clone();
                true
            }
            Edit::Insert {
                parent,
                label,
                first,
                end,
            } => {
                if *parent > index.len() {
                    return false;
                }
                let siblings = children_mut(forest, &index, *parent);
                if *first < 1 || first > end || *end > siblings.len() + 1 {
                    return false;
                }
                let adopted: Vec<Tree> = siblings.drain(first - 1..end - 1).collect();
                siblings.insert(first - 1, Tree::new(label.clone(), adopted));
                true
            }
        }
    }

    /// Returns the edited forest.
    pub fn applied(&self, forest: &Forest) -> Forest {
        let mut out = forest.clone();
        self.apply(&mut out);
        out
    }

    /// Cost of applying the edit to `forest`: zero if it leaves the forest
    /// unchanged, else the cost of the relabelling, deletion or insertion.
    pub fn cost(&self, forest: &Forest, costs: &CostFunction) -> f64 {
        let index = PreorderIndex::new(forest);
        self.cost_indexed(&index, costs)
    }

    fn cost_indexed(&self, index: &PreorderIndex, costs: &CostFunction) -> f64 {
        let in_range = |i: usize| (1..=index.len()).contains(&i);
        match self {
            Edit::Delete { node } if in_range(*node) => costs.del(index.label(*node)),
            Edit::Replace { node, label } if in_range(*node) && index.label(*node) != label => {
                costs.rep(index.label(*node), label)
            }
            Edit::Insert {
                parent,
                label,
                first,
                end,
            } if *parent <= index.len()
                && *first >= 1
                && first <= end
                && *end <= index.children(*parent).len() + 1 =>
            {
                costs.ins(label)
            }
            _ => 0.0,
        }
    }

    /// The edit undoing this one, given the forest it is applied to.
    /// `None` if the edit leaves the forest unchanged.
    pub fn inverse(&self, forest: &Forest) -> Option<Edit> {
        let index = PreorderIndex::new(forest);
        self.inverse_indexed(forest, &index)
    }

    fn inverse_indexed(&self, forest: &Forest, index: &PreorderIndex) -> Option<Edit> {
        match self {
            Edit::Delete { node } if (1..=index.len()).contains(node) => Some(Edit::insert(
                index.parent(*node),
                index.label(*node),
                index.child_rank(*node),
                index.child_rank(*node) + index.children(*node).len(),
            )),
            Edit::Replace { node, label } if (1..=index.len()).contains(node) => {
                (index.label(*node) != label).then(|| Edit::replace(*node, index.label(*node)))
            }
            Edit::Insert { .. } => {
                let after = self.applied(forest);
                (after != *forest).then(|| Edit::delete(self.inserted_position(&after)))
            }
            _ => None,
        }
    }

    /// Pre-order position of the node created by an applied insertion, read
    /// off the edited forest.
    fn inserted_position(&self, edited: &Forest) -> usize {
        let Edit::Insert { parent, first, .. } = self else {
            unreachable!("only insertions create nodes")
        };
        PreorderIndex::new(edited).children(*parent)[first - 1]
    }
}

/// Finds the sibling list holding node `i` and its 0-based position in it.
fn locate<'f>(forest: &'f mut Forest, index: &PreorderIndex, i: usize) -> (&'f mut Vec<Tree>, usize) {
    let siblings = children_mut(forest, index, index.parent(i));
    (siblings, index.child_rank(i) - 1)
}

/// The child list of node `i` (the root list for `i = 0`).
fn children_mut<'f>(forest: &'f mut Forest, index: &PreorderIndex, i: usize) -> &'f mut Vec<Tree> {
    let mut path = Vec::new();
    let mut v = i;
    while v != 0 {
        path.push(index.child_rank(v) - 1);
        v = index.parent(v);
    }
    let mut trees = &mut forest.0;
    for &pos in path.iter().rev() {
        trees = &mut trees[pos].children;
    }
    trees
}

impl fmt::Display for Edit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Edit::Delete { node } => write!(f, "del {node}"),
            Edit::Replace { node, label } => write!(f, "rep {node} {}", escape_token(label)),
            Edit::Insert {
                parent,
                label,
                first,
                end,
            } => write!(f, "ins {parent} {} {first} {end}", escape_token(label)),
        }
    }
}

impl FromStr for Edit {
    type Err = String;

    fn from_str(line: &str) -> Result<Self, Self::Err> {
        let tokens = split_tokens(line)?;
        let number = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| format!("expected a non-negative integer, found '{s}'"))
        };
        let label = |s: &str| {
            if s == GAP {
                Err("the label '-' is reserved for the gap symbol".to_string())
            } else {
                Ok(s.to_string())
            }
        };
        let words: Vec<&str> = tokens.iter().map(String::as_str).collect();
        match words.as_slice() {
            ["del", i] => Ok(Edit::delete(number(i)?)),
            ["rep", i, y] => Ok(Edit::replace(number(i)?, label(y)?)),
            ["ins", i, y, l, r] => Ok(Edit::insert(number(i)?, label(y)?, number(l)?, number(r)?)),
            [op, ..] if matches!(*op, "del" | "rep" | "ins") => {
                Err(format!("wrong number of arguments for '{op}'"))
            }
            [op, ..] => Err(format!("unknown edit '{op}'")),
            [] => Err("empty edit".into()),
        }
    }
}

fn escape_token(label: &str) -> String {
    let mut out = String::with_capacity(label.len());
    for c in label.chars() {
        if c.is_whitespace() || c == '\\' || c == '#' {
            out.push('\\');
        }
        out.push(c);
    }
    out
}

/// Splits on unescaped whitespace, resolving backslash escapes.
fn split_tokens(line: &str) -> Result<Vec<String>, String> {
    let mut tokens = Vec::new();
    let mut current: Option<String> = None;
    let mut chars = line.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            let escaped = chars.next().ok_or("dangling escape")?;
            current.get_or_insert_with(String::new).push(escaped);
        } else if c.is_whitespace() {
            tokens.extend(current.take());
        } else {
            current.get_or_insert_with(String::new).push(c);
        }
    }
    tokens.extend(current);
    Ok(tokens)
}

/// Strips an unescaped `#` comment.
pub(crate) fn strip_comment(line: &str) -> &str {
    let mut escaped = false;
    for (pos, c) in line.char_indices() {
        match c {
            _ if escaped => escaped = false,
            '\\' => escaped = true,
            '#' => return &line[..pos],
            _ => {}
        }
    }
    line
}

/// A sequence of edits applied left to right.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Script(pub Vec<Edit>);

impl Script {
    /// The empty script.
    pub fn new() -> Self {
        Script(Vec::new())
    }

    /// The edits.
    pub fn edits(&self) -> &[Edit] {
        &self.0
    }

    /// Number of edits.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Whether there are no edits.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Applies every edit in order to a copy of `forest`.
    pub fn apply(&self, forest: &Forest) -> Forest {
        let mut out = forest.clone();
        for edit in &self.0 {
            edit.apply(&mut out);
        }
        out
    }

    /// Sum of the edit costs, each taken on the forest it is applied to.
    pub fn cost(&self, forest: &Forest, costs: &CostFunction) -> f64 {
        let mut current = forest.clone();
        let mut total = 0.0;
        for edit in &self.0 {
            let index = PreorderIndex::new(&current);
            total += edit.cost_indexed(&index, costs);
            edit.apply(&mut current);
        }
        total
    }

    /// The script undoing this one on `forest`: applying `self` and then the
    /// inverse restores `forest`. Edits that change nothing have no inverse.
    pub fn invert(&self, forest: &Forest) -> Script {
        let mut current = forest.clone();
        let mut inverse = Vec::with_capacity(self.0.len());
        for edit in &self.0 {
            let index = PreorderIndex::new(&current);
            if let Some(undo) = edit.inverse_indexed(&current, &index) {
                inverse.push(undo);
            }
            edit.apply(&mut current);
        }
        inverse.reverse();
        Script(inverse)
    }

    /// Parses one edit per line; blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut edits = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = strip_comment(line).trim();
            if line.is_empty() {
                continue;
            }
            let edit = line
                .parse::<Edit>()
                .map_err(|message| ParseError::Line { line: n + 1, message })?;
            edits.push(edit);
        }
        Ok(Script(edits))
    }

    /// Parses the JSON array form.
    pub fn from_json(text: &str) -> Result<Self, ParseError> {
        let script: Script =
            serde_json::from_str(text).map_err(|e| ParseError::Json(e.to_string()))?;
        for edit in &script.0 {
            if let Edit::Replace { label, .. } | Edit::Insert { label, .. } = edit {
                if label == GAP {
                    return Err(ParseError::ReservedLabel { offset: None });
                }
                if label.is_empty() {
                    return Err(ParseError::EmptyLabel);
                }
            }
        }
        Ok(script)
    }

    /// Parses either the line format or, if the input starts with `[`, JSON.
    pub fn parse_any(text: &str) -> Result<Self, ParseError> {
        if text.trim_start().starts_with('[') {
            Script::from_json(text)
        } else {
            Script::parse(text)
        }
    }

    /// Serializes to a JSON array.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("scripts always serialize")
    }
}

impl fmt::Display for Script {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, edit) in self.0.iter().enumerate() {
            if n > 0 {
                writeln!(f)?;
            }
            write!(f, "{edit}")?;
        }
        Ok(())
    }
}

impl FromIterator<Edit> for Script {
    fn from_iter<T: IntoIterator<Item = Edit>>(iter: T) -> Self {
        Script(iter.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn forest(text: &str) -> Forest {
        Forest::parse(text).unwrap()
    }

    fn golden_script() -> Script {
        Script(vec![
            Edit::replace(1, "f"),
            Edit::delete(2),
            Edit::delete(2),
            Edit::replace(2, "g"),
            Edit::delete(3),
        ])
    }

    #[test]
    fn single_edits() {
        let x = forest("a(b(c,d),e)");
        assert_eq!(Edit::delete(2).applied(&x).to_string(), "a(c,d,e)");
        assert_eq!(Edit::delete(1).applied(&x).to_string(), "b(c,d),e");
        assert_eq!(Edit::replace(3, "z").applied(&x).to_string(), "a(b(z,d),e)");
        assert_eq!(Edit::insert(1, "n", 1, 3).applied(&x).to_string(), "a(n(b(c,d),e))");
        assert_eq!(Edit::insert(2, "n", 2, 2).applied(&x).to_string(), "a(b(c,n,d),e)");
        assert_eq!(Edit::insert(0, "r", 1, 2).applied(&x).to_string(), "r(a(b(c,d),e))");
        assert_eq!(Edit::insert(0, "r", 2, 2).applied(&x).to_string(), "a(b(c,d),e),r");
        assert_eq!(Edit::insert(5, "n", 1, 1).applied(&x).to_string(), "a(b(c,d),e(n))");
    }

    #[test]
    fn out_of_range_edits_are_no_ops() {
        let x = forest("a(b(c,d),e)");
        let unit = CostFunction::unit();
        for edit in [
            Edit::delete(0),
            Edit::delete(6),
            Edit::replace(0, "z"),
            Edit::replace(9, "z"),
            Edit::replace(1, "a"),
            Edit::insert(6, "n", 1, 1),
            Edit::insert(1, "n", 0, 1),
            Edit::insert(1, "n", 2, 1),
            Edit::insert(1, "n", 1, 4),
        ] {
            assert_eq!(edit.applied(&x), x, "{edit}");
            assert_eq!(edit.cost(&x, &unit), 0.0, "{edit}");
            assert_eq!(edit.inverse(&x), None, "{edit}");
        }
    }

    #[test]
    fn golden_script_transforms_and_costs() {
        let x = forest("a(b(c,d),e)");
        let s = golden_script();
        assert_eq!(s.apply(&x).to_string(), "f(g)");
        assert_eq!(s.cost(&x, &CostFunction::unit()), 5.0);
    }

    #[test]
    fn golden_inverse() {
        let x = forest("a(b(c,d),e)");
        let inverse = golden_script().invert(&x);
        assert_eq!(
            inverse.0,
            vec![
                Edit::insert(1, "e", 2, 2),
                Edit::replace(2, "d"),
                Edit::insert(1, "c", 1, 1),
                Edit::insert(1, "b", 1, 3),
                Edit::replace(1, "a"),
            ]
        );
        assert_eq!(inverse.apply(&forest("f(g)")), x);
    }

    #[test]
    fn insert_inverse_targets_new_node() {
        let x = forest("a(b,c)");
        let edit = Edit::insert(1, "n", 2, 3);
        assert_eq!(edit.inverse(&x), Some(Edit::delete(3)));
        let edit = Edit::insert(0, "n", 2, 2);
        assert_eq!(edit.inverse(&x), Some(Edit::delete(4)));
    }

    #[test]
    fn text_round_trip() {
        let s = Script(vec![
            Edit::replace(1, "two words"),
            Edit::insert(0, "x\\y", 1, 2),
            Edit::delete(3),
        ]);
        let text = s.to_string();
        assert_eq!(Script::parse(&text).unwrap(), s);
        assert_eq!(Script::parse_any(&s.to_json()).unwrap(), s);
        let parsed = Script::parse("# header\n\ndel 2  # trailing\nrep 1 f\n").unwrap();
        assert_eq!(parsed.0, vec![Edit::delete(2), Edit::replace(1, "f")]);
    }

    #[test]
    fn text_errors() {
        assert!(matches!(Script::parse("del"), Err(ParseError::Line { line: 1, .. })));
        assert!(matches!(Script::parse("del 1\nmov 2"), Err(ParseError::Line { line: 2, .. })));
        assert!(matches!(Script::parse("rep 1 -"), Err(ParseError::Line { .. })));
        assert!(matches!(Script::parse("del -3"), Err(ParseError::Line { .. })));
        assert!(Script::from_json(r#"[{"op":"rep","node":1,"label":"-"}]"#).is_err());
    }

    #[test]
    fn json_layout() {
        let s = Script(vec![Edit::delete(2), Edit::insert(1, "e", 2, 2)]);
        assert_eq!(
            s.to_json(),
            r#"[{"op":"del","node":2},{"op":"ins","parent":1,"label":"e","first":2,"end":2}]"#
        );
    }
}
