//! Ordered labelled trees and forests.
//!
//! Nodes are addressed by their 1-based pre-order position. A [`PreorderIndex`]
//! flattens a forest once and answers the structural queries needed by the
//! edit-distance machinery (parent, child rank, subtree size, rightmost leaf,
//! ancestry) in constant time.
//!
//! Trees have a textual bracket notation, e.g. `a(b(c,d),e)`, and a JSON form
//! `{"label": "a", "children": [...]}`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::ParseError;

/// The label reserved for the gap symbol in cost functions.
pub const GAP: &str = "-";

/// An ordered, labelled tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Tree {
    /// Node label.
    pub label: String,
    /// Ordered children.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<Tree>,
}

impl Tree {
    /// Creates a tree from a label and its children.
    pub fn new(label: impl Into<String>, children: Vec<Tree>) -> Self {
        Tree {
            label: label.into(),
            children,
        }
    }

    /// Creates a single-node tree.
    pub fn leaf(label: impl Into<String>) -> Self {
        Tree::new(label, Vec::new())
    }

    /// Number of nodes in the tree.
    pub fn len(&self) -> usize {
        let mut count = 0;
        let mut stack = vec![self];
        while let Some(node) = stack.pop() {
            count += 1;
            stack.extend(node.children.iter());
        }
        count
    }

    /// A tree always has at least one node.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Labels in pre-order.
    pub fn labels(&self) -> Vec<&str> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(node) = stack.pop() {
            out.push(node.label.as_str());
            stack.extend(node.children.iter().rev());
        }
        out
    }

    /// Parses a single tree from bracket notation.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let forest = Forest::parse(text)?;
        match <[Tree; 1]>::try_from(forest.0) {
            Ok([tree]) => Ok(tree),
            Err(trees) => Err(ParseError::NotATree { roots: trees.len() }),
        }
    }

    /// Parses a single tree from its JSON form.
    pub fn from_json(text: &str) -> Result<Self, ParseError> {
        let tree: Tree = serde_json::from_str(text).map_err(|e| ParseError::Json(e.to_string()))?;
        tree.check_labels()?;
        Ok(tree)
    }

    /// Parses either bracket notation or, if the input starts with `{`, JSON.
    pub fn parse_any(text: &str) -> Result<Self, ParseError> {
        if text.trim_start().starts_with('{') {
            Tree::from_json(text)
        } else {
            Tree::parse(text)
        }
    }

    /// Serializes the tree to its JSON form.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("trees always serialize")
    }

    fn check_labels(&self) -> Result<(), ParseError> {
        let mut stack = vec![self];
        while let Some(node) = stack.pop() {
            if node.label.is_empty() {
                return Err(ParseError::EmptyLabel);
            }
            if node.label == GAP {
                return Err(ParseError::ReservedLabel { offset: None });
            }
            stack.extend(node.children.iter());
        }
        Ok(())
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_label(f, &self.label)?;
        if !self.children.is_empty() {
            f.write_str("(")?;
            write_trees(f, &self.children)?;
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl FromStr for Tree {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Tree::parse(s)
    }
}

/// An ordered list of trees. The empty forest is written as the empty string.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Forest(pub Vec<Tree>);

impl Forest {
    /// The empty forest.
    pub fn empty() -> Self {
        Forest(Vec::new())
    }

    /// Number of nodes in the forest.
    pub fn len(&self) -> usize {
        self.0.iter().map(Tree::len).sum()
    }

    /// Whether the forest has no nodes.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The root trees.
    pub fn trees(&self) -> &[Tree] {
        &self.0
    }

    /// Labels in pre-order.
    pub fn labels(&self) -> Vec<&str> {
        self.0.iter().flat_map(Tree::labels).collect()
    }

    /// Parses a forest from bracket notation.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut parser = Parser { src: text, pos: 0 };
        let trees = parser.forest()?;
        parser.skip_ws();
        if let Some(c) = parser.peek() {
            return Err(ParseError::Syntax {
                offset: parser.pos,
                message: format!("unexpected '{c}'"),
            });
        }
        Ok(Forest(trees))
    }

    /// Parses a forest from a JSON array of trees.
    pub fn from_json(text: &str) -> Result<Self, ParseError> {
        let forest: Forest =
            serde_json::from_str(text).map_err(|e| ParseError::Json(e.to_string()))?;
        for tree in &forest.0 {
            tree.check_labels()?;
        }
        Ok(forest)
    }

    /// Serializes the forest to a JSON array.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("forests always serialize")
    }

    /// The sub-forest made of the nodes with pre-order positions in `from..=to`.
    ///
    /// Each retained node keeps its closest retained ancestor as parent;
    /// retained nodes without one become roots. An empty range yields the empty
    /// forest.
    pub fn subforest(&self, from: usize, to: usize) -> Forest {
        PreorderIndex::new(self).subforest(from, to)
    }
}

impl fmt::Display for Forest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_trees(f, &self.0)
    }
}

impl FromStr for Forest {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Forest::parse(s)
    }
}

impl From<Tree> for Forest {
    fn from(tree: Tree) -> Self {
        Forest(vec![tree])
    }
}

fn write_trees(f: &mut fmt::Formatter<'_>, trees: &[Tree]) -> fmt::Result {
    for (n, tree) in trees.iter().enumerate() {
        if n > 0 {
            f.write_str(",")?;
        }
        write!(f, "{tree}")?;
    }
    Ok(())
}

fn write_label(f: &mut fmt::Formatter<'_>, label: &str) -> fmt::Result {
    let last = label.chars().count().saturating_sub(1);
    for (n, c) in label.chars().enumerate() {
        let edge_ws = c.is_whitespace() && (n == 0 || n == last);
        let json_lead = n == 0 && (c == '{' || c == '[');
        if matches!(c, '(' | ')' | ',' | '\\') || edge_ws || json_lead {
            f.write_str("\\")?;
        }
        write!(f, "{c}")?;
    }
    Ok(())
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    fn forest(&mut self) -> Result<Vec<Tree>, ParseError> {
        let mut trees = Vec::new();
        self.skip_ws();
        if matches!(self.peek(), None | Some(')')) {
            return Ok(trees);
        }
        loop {
            trees.push(self.tree()?);
            self.skip_ws();
            if self.peek() == Some(',') {
                self.bump();
            } else {
                return Ok(trees);
            }
        }
    }

    fn tree(&mut self) -> Result<Tree, ParseError> {
        let label = self.label()?;
        self.skip_ws();
        let mut children = Vec::new();
        if self.peek() == Some('(') {
            self.bump();
            children = self.forest()?;
            self.skip_ws();
            match self.bump() {
                Some(')') => {}
                Some(c) => {
                    return Err(ParseError::Syntax {
                        offset: self.pos - c.len_utf8(),
                        message: format!("expected ',' or ')', found '{c}'"),
                    })
                }
                None => {
                    return Err(ParseError::Syntax {
                        offset: self.pos,
                        message: "unclosed '('".into(),
                    })
                }
            }
        }
        Ok(Tree { label, children })
    }

    fn label(&mut self) -> Result<String, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let mut label = String::new();
        // Length of the label up to its last significant character, so that
        // unescaped trailing whitespace is dropped.
        let mut significant = 0;
        while let Some(c) = self.peek() {
            match c {
                '(' | ')' | ',' => break,
                '\\' => {
                    self.bump();
                    let escaped = self.bump().ok_or(ParseError::Syntax {
                        offset: self.pos,
                        message: "dangling escape".into(),
                    })?;
                    label.push(escaped);
                    significant = label.len();
                }
                _ => {
                    self.bump();
                    label.push(c);
                    if !c.is_whitespace() {
                        significant = label.len();
                    }
                }
            }
        }
        label.truncate(significant);
        if label.is_empty() {
            let message = match self.peek() {
                Some(c) => format!("expected a label, found '{c}'"),
                None => "expected a label".into(),
            };
            return Err(ParseError::Syntax {
                offset: start,
                message,
            });
        }
        if label == GAP {
            return Err(ParseError::ReservedLabel {
                offset: Some(start),
            });
        }
        Ok(label)
    }
}

/// Flat pre-order view of a forest with 1-based node indices.
///
/// Index 0 stands for the virtual parent of the roots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreorderIndex {
    labels: Vec<String>,
    parent: Vec<usize>,
    child_rank: Vec<usize>,
    size: Vec<usize>,
    children: Vec<Vec<usize>>,
}

impl PreorderIndex {
    /// Indexes the nodes of a forest.
    pub fn new(forest: &Forest) -> Self {
        Self::from_trees(&forest.0)
    }

    /// Indexes the nodes of a single tree.
    pub fn of_tree(tree: &Tree) -> Self {
        Self::from_trees(std::slice::from_ref(tree))
    }

    fn from_trees(trees: &[Tree]) -> Self {
        let mut index = PreorderIndex {
            labels: vec![String::new()],
            parent: vec![0],
            child_rank: vec![0],
            size: vec![0],
            children: vec![Vec::new()],
        };
        // (node, parent index, rank among siblings)
        let mut stack: Vec<(&Tree, usize, usize)> = trees
            .iter()
            .enumerate()
            .rev()
            .map(|(n, t)| (t, 0, n + 1))
            .collect();
        while let Some((node, parent, rank)) = stack.pop() {
            let id = index.labels.len();
            index.labels.push(node.label.clone());
            index.parent.push(parent);
            index.child_rank.push(rank);
            index.size.push(1);
            index.children.push(Vec::new());
            index.children[parent].push(id);
            for (n, child) in node.children.iter().enumerate().rev() {
                stack.push((child, id, n + 1));
            }
        }
        // Children follow their parent in pre-order, so a reverse sweep
        // accumulates subtree sizes bottom-up.
        for id in (1..index.labels.len()).rev() {
            let p = index.parent[id];
            if p != 0 {
                index.size[p] += index.size[id];
            }
        }
        index.size[0] = index.labels.len() - 1;
        index
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.labels.len() - 1
    }

    /// Whether there are no nodes.
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Label of node `i`.
    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    /// Labels in pre-order, 0-based.
    pub fn labels(&self) -> &[String] {
        &self.labels[1..]
    }

    /// Parent of node `i`, or 0 for a root.
    pub fn parent(&self, i: usize) -> usize {
        self.parent[i]
    }

    /// 1-based position of node `i` among its siblings.
    pub fn child_rank(&self, i: usize) -> usize {
        self.child_rank[i]
    }

    /// Number of nodes in the subtree rooted at `i`. For `i = 0`, the whole forest.
    pub fn size(&self, i: usize) -> usize {
        self.size[i]
    }

    /// Rightmost descendant of node `i`: `i + size(i) - 1`.
    pub fn rl(&self, i: usize) -> usize {
        i + self.size[i] - 1
    }

    /// Children of node `i`; for `i = 0`, the roots.
    pub fn children(&self, i: usize) -> &[usize] {
        &self.children[i]
    }

    /// Whether `a` is a proper ancestor of `b`.
    pub fn is_ancestor(&self, a: usize, b: usize) -> bool {
        a < b && b <= self.rl(a)
    }

    /// Nodes that are the first (in pre-order) to share their rightmost leaf,
    /// in ascending order.
    pub fn keyroots(&self) -> Vec<usize> {
        let mut seen = vec![false; self.len() + 1];
        let mut keyroots = Vec::new();
        for i in 1..=self.len() {
            let rl = self.rl(i);
            if !seen[rl] {
                seen[rl] = true;
                keyroots.push(i);
            }
        }
        keyroots
    }

    /// Rebuilds the subtree rooted at `i` as a [`Tree`].
    pub fn subtree(&self, i: usize) -> Tree {
        self.build(i, &|_| true)
    }

    /// Rebuilds the whole forest.
    pub fn forest(&self) -> Forest {
        Forest(self.children[0].iter().map(|&r| self.subtree(r)).collect())
    }

    /// The sub-forest of nodes with positions in `from..=to`; see
    /// [`Forest::subforest`].
    pub fn subforest(&self, from: usize, to: usize) -> Forest {
        let from = from.max(1);
        let to = to.min(self.len());
        let keep = |v: usize| from <= v && v <= to;
        let mut roots = Vec::new();
        for v in from..=to {
            let mut p = self.parent[v];
            while p != 0 && !keep(p) {
                p = self.parent[p];
            }
            if p == 0 {
                roots.push(self.build(v, &keep));
            }
        }
        Forest(roots)
    }

    /// Builds node `v` with its closest kept descendants as children.
    fn build(&self, v: usize, keep: &dyn Fn(usize) -> bool) -> Tree {
        let mut children = Vec::new();
        for &c in &self.children[v] {
            if keep(c) {
                children.push(self.build(c, keep));
            } else {
                for grand in self.build_dropped(c, keep) {
                    children.push(grand);
                }
            }
        }
        Tree::new(self.labels[v].clone(), children)
    }

    fn build_dropped(&self, v: usize, keep: &dyn Fn(usize) -> bool) -> Vec<Tree> {
        let mut out = Vec::new();
        for &c in &self.children[v] {
            if keep(c) {
                out.push(self.build(c, keep));
            } else {
                out.extend(self.build_dropped(c, keep));
            }
        }
        out
    }
}
