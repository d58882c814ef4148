//! Independent reference implementations and input generators shared by the
//! integration tests.
//!
//! The oracles enumerate valid mappings directly from their definition
//! (one-to-one, order-preserving, ancestry-preserving) and never touch the
//! dynamic program.

#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigUint;
use rand::Rng;
use treedist::{CostFunction, DefaultCosts, Forest, Tree};

/// A forest flattened in pre-order, built without the library's index.
pub struct Flat {
    pub labels: Vec<String>,
    /// 0-based parent, `None` for roots.
    pub parent: Vec<Option<usize>>,
}

impl Flat {
    pub fn new(forest: &Forest) -> Self {
        let mut flat = Flat {
            labels: Vec::new(),
            parent: Vec::new(),
        };
        for tree in forest.trees() {
            flat.push(tree, None);
        }
        flat
    }

    fn push(&mut self, tree: &Tree, parent: Option<usize>) {
        let id = self.labels.len();
        self.labels.push(tree.label.clone());
        self.parent.push(parent);
        for child in &tree.children {
            self.push(child, Some(id));
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    /// Whether `a` is a proper ancestor of `b` (0-based).
    pub fn is_ancestor(&self, a: usize, b: usize) -> bool {
        let mut v = self.parent[b];
        while let Some(p) = v {
            if p == a {
                return true;
            }
            v = self.parent[p];
        }
        false
    }
}

/// Decides whether a partial mapping is worth extending.
type Prune<'a> = dyn FnMut(usize, usize, &[(usize, usize)]) -> bool + 'a;
/// Receives one complete mapping.
type Visit<'a> = dyn FnMut(&[(usize, usize)]) + 'a;

/// Calls `visit` with every valid mapping between `x` and `y`, as 1-based
/// pairs in ascending order. Returning `false` from `prune` for a partial
/// mapping (given its committed cost) skips its extensions.
fn enumerate(
    x: &Flat,
    y: &Flat,
    prune: &mut Prune<'_>,
    visit: &mut Visit<'_>,
) {
    let mut pairs = Vec::new();
    fn go(
        x: &Flat,
        y: &Flat,
        i: usize,
        pairs: &mut Vec<(usize, usize)>,
        prune: &mut Prune<'_>,
        visit: &mut Visit<'_>,
    ) {
        if i == x.len() {
            visit(pairs);
            return;
        }
        let next_j = pairs.last().map_or(0, |&(_, j)| j);
        if !prune(i, next_j, pairs) {
            return;
        }
        // Leave source node i unmapped.
        go(x, y, i + 1, pairs, prune, visit);
        for j in next_j..y.len() {
            let consistent = pairs
                .iter()
                .all(|&(a, b)| x.is_ancestor(a - 1, i) == y.is_ancestor(b - 1, j));
            if consistent {
                pairs.push((i + 1, j + 1));
                go(x, y, i + 1, pairs, prune, visit);
                pairs.pop();
            }
        }
    }
    go(x, y, 0, &mut pairs, prune, visit);
}

/// Cost of a mapping given as 1-based pairs, computed from the definition.
pub fn mapping_cost(x: &Flat, y: &Flat, pairs: &[(usize, usize)], costs: &CostFunction) -> f64 {
    let mut mapped_x = vec![false; x.len()];
    let mut mapped_y = vec![false; y.len()];
    let mut total = 0.0;
    for &(i, j) in pairs {
        mapped_x[i - 1] = true;
        mapped_y[j - 1] = true;
        total += costs.rep(&x.labels[i - 1], &y.labels[j - 1]);
    }
    for (i, label) in x.labels.iter().enumerate() {
        if !mapped_x[i] {
            total += costs.del(label);
        }
    }
    for (j, label) in y.labels.iter().enumerate() {
        if !mapped_y[j] {
            total += costs.ins(label);
        }
    }
    total
}

/// Every valid mapping between two forests.
pub fn all_mappings(x: &Forest, y: &Forest) -> Vec<Vec<(usize, usize)>> {
    let (fx, fy) = (Flat::new(x), Flat::new(y));
    let mut out = Vec::new();
    enumerate(&fx, &fy, &mut |_, _, _| true, &mut |pairs| out.push(pairs.to_vec()));
    out
}

/// Minimum mapping cost by exhaustive search with a safe lower-bound cut.
///
/// The bound charges only what is already fixed: deletions of skipped source
/// nodes, insertions of skipped target nodes and replacements, plus the
/// unavoidable surplus of remaining nodes on one side.
pub fn oracle_distance(x: &Forest, y: &Forest, costs: &CostFunction) -> f64 {
    let (fx, fy) = (Flat::new(x), Flat::new(y));
    let min_del = fx.labels.iter().map(|l| costs.del(l)).fold(f64::INFINITY, f64::min);
    let min_ins = fy.labels.iter().map(|l| costs.ins(l)).fold(f64::INFINITY, f64::min);
    let committed = |i: usize, next_j: usize, pairs: &[(usize, usize)]| {
        let mut cost = 0.0;
        let mut mapped_x = vec![false; i];
        let mut mapped_y = vec![false; next_j];
        for &(a, b) in pairs {
            mapped_x[a - 1] = true;
            mapped_y[b - 1] = true;
            cost += costs.rep(&fx.labels[a - 1], &fy.labels[b - 1]);
        }
        for (label, mapped) in fx.labels.iter().zip(&mapped_x) {
            if !mapped {
                cost += costs.del(label);
            }
        }
        for (label, mapped) in fy.labels.iter().zip(&mapped_y) {
            if !mapped {
                cost += costs.ins(label);
            }
        }
        let rest_x = fx.len() - i;
        let rest_y = fy.len() - next_j;
        if rest_x > rest_y {
            cost += (rest_x - rest_y) as f64 * min_del;
        } else if rest_y > rest_x {
            cost += (rest_y - rest_x) as f64 * min_ins;
        }
        cost
    };
    let best_cell = std::cell::Cell::new(f64::INFINITY);
    enumerate(
        &fx,
        &fy,
        &mut |i, next_j, pairs| committed(i, next_j, pairs) < best_cell.get(),
        &mut |pairs| {
            let cost = mapping_cost(&fx, &fy, pairs, costs);
            if cost < best_cell.get() {
                best_cell.set(cost);
            }
        },
    );
    best_cell.get()
}

/// Minimum cost, number of minimum-cost mappings and, per pair, how many of
/// them contain it.
pub struct OracleCounts {
    pub distance: f64,
    pub total: BigUint,
    pub gamma: BTreeMap<(usize, usize), BigUint>,
    pub mappings: Vec<Vec<(usize, usize)>>,
}

pub fn oracle_counts(x: &Forest, y: &Forest, costs: &CostFunction) -> OracleCounts {
    let (fx, fy) = (Flat::new(x), Flat::new(y));
    let mut best = f64::INFINITY;
    let mut optimal: Vec<Vec<(usize, usize)>> = Vec::new();
    enumerate(&fx, &fy, &mut |_, _, _| true, &mut |pairs| {
        let cost = mapping_cost(&fx, &fy, pairs, costs);
        if cost < best {
            best = cost;
            optimal.clear();
        }
        if cost == best {
            optimal.push(pairs.to_vec());
        }
    });
    let mut gamma = BTreeMap::new();
    for mapping in &optimal {
        for &pair in mapping {
            *gamma.entry(pair).or_insert_with(BigUint::default) += 1u32;
        }
    }
    OracleCounts {
        distance: best,
        total: BigUint::from(optimal.len()),
        gamma,
        mappings: optimal,
    }
}

/// All ordered forests with exactly `n` nodes over `alphabet`.
pub fn all_forests(n: usize, alphabet: &[&str]) -> Vec<Vec<Tree>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    // The first tree takes `k` nodes, the rest of the forest `n - k`.
    for k in 1..=n {
        let firsts = all_trees(k, alphabet);
        let rests = all_forests(n - k, alphabet);
        for first in &firsts {
            for rest in &rests {
                let mut forest = vec![first.clone()];
                forest.extend(rest.iter().cloned());
                out.push(forest);
            }
        }
    }
    out
}

/// All ordered trees with exactly `n >= 1` nodes over `alphabet`.
pub fn all_trees(n: usize, alphabet: &[&str]) -> Vec<Tree> {
    let mut out = Vec::new();
    for children in all_forests(n - 1, alphabet) {
        for label in alphabet {
            out.push(Tree::new(*label, children.clone()));
        }
    }
    out
}

/// A random tree with `n >= 1` nodes: each new node becomes the last child of
/// a uniformly chosen existing node.
pub fn random_tree<R: Rng>(rng: &mut R, n: usize, alphabet: &[&str]) -> Tree {
    let mut children: Vec<Vec<usize>> = vec![Vec::new()];
    for id in 1..n {
        let parent = rng.gen_range(0..id);
        children[parent].push(id);
        children.push(Vec::new());
    }
    let labels: Vec<&str> = (0..n).map(|_| alphabet[rng.gen_range(0..alphabet.len())]).collect();
    build(0, &children, &labels)
}

/// A random tree with between 1 and `max` nodes.
pub fn random_tree_upto<R: Rng>(rng: &mut R, max: usize, alphabet: &[&str]) -> Tree {
    let n = rng.gen_range(1..=max);
    random_tree(rng, n, alphabet)
}

fn build(v: usize, children: &[Vec<usize>], labels: &[&str]) -> Tree {
    Tree::new(
        labels[v],
        children[v].iter().map(|&c| build(c, children, labels)).collect(),
    )
}

/// A random forest with `n` nodes (possibly empty).
pub fn random_forest<R: Rng>(rng: &mut R, n: usize, alphabet: &[&str]) -> Forest {
    if n == 0 {
        return Forest::empty();
    }
    let tree = random_tree(rng, n + 1, alphabet);
    Forest(tree.children)
}

/// Random small-integer costs that satisfy the triangle inequality: labels
/// are points on a line and relabelling costs their distance; deleting or
/// inserting costs at least half the diameter, plus a 0/1 bump that depends
/// only on the position (so gap costs of nearby labels differ by at most
/// their distance).
pub fn random_metric_costs<R: Rng>(rng: &mut R, alphabet: &[&str]) -> CostFunction {
    let positions: Vec<i32> = alphabet.iter().map(|_| rng.gen_range(0..4)).collect();
    let span = positions.iter().max().unwrap() - positions.iter().min().unwrap();
    let mut costs = CostFunction::new(DefaultCosts {
        rep: 1.0,
        del: 1.0,
        ins: 1.0,
    })
    .unwrap();
    let bump: Vec<i32> = (0..4).map(|_| rng.gen_range(0..2)).collect();
    let base = ((span + 1) / 2).max(1);
    let gap: Vec<f64> = positions.iter().map(|&p| (base + bump[p as usize]) as f64).collect();
    for (a, la) in alphabet.iter().enumerate() {
        costs.set(Some(la), None, gap[a]).unwrap();
        costs.set(None, Some(la), gap[a]).unwrap();
        for (b, lb) in alphabet.iter().enumerate() {
            let d = (positions[a] - positions[b]).abs() as f64;
            costs.set(Some(la), Some(lb), d).unwrap();
        }
    }
    costs
}

/// Costs where a relabelling costs exactly a deletion plus an insertion.
pub fn degenerate_costs() -> CostFunction {
    CostFunction::new(DefaultCosts {
        rep: 2.0,
        del: 1.0,
        ins: 1.0,
    })
    .unwrap()
}

/// A unary chain of `m` nodes labelled `label`.
pub fn chain(m: usize, label: &str) -> Tree {
    let mut tree = Tree::leaf(label);
    for _ in 1..m {
        tree = Tree::new(label, vec![tree]);
    }
    tree
}

/// The caterpillar with `n` nodes: every spine node has a leaf as first child
/// and continues the spine as its second child.
pub fn caterpillar(n: usize, labels: &[&str]) -> Tree {
    fn go(from: usize, n: usize, labels: &[&str]) -> Tree {
        let label = labels[from % labels.len()];
        let remaining = n - from;
        match remaining {
            1 => Tree::leaf(label),
            2 => Tree::new(label, vec![Tree::leaf(labels[(from + 1) % labels.len()])]),
            _ => Tree::new(
                label,
                vec![
                    Tree::leaf(labels[(from + 1) % labels.len()]),
                    go(from + 2, n, labels),
                ],
            ),
        }
    }
    go(0, n, labels)
}

/// The mirror image of a tree.
pub fn mirror(tree: &Tree) -> Tree {
    Tree::new(tree.label.clone(), tree.children.iter().rev().map(mirror).collect())
}

/// A complete binary tree with `n` nodes in level order.
pub fn balanced(n: usize, labels: &[&str]) -> Tree {
    fn go(v: usize, n: usize, labels: &[&str]) -> Tree {
        let children = [2 * v + 1, 2 * v + 2]
            .into_iter()
            .filter(|&c| c < n)
            .map(|c| go(c, n, labels))
            .collect();
        Tree::new(labels[v % labels.len()], children)
    }
    go(0, n, labels)
}

pub mod strategies {
    //! Proptest strategies for trees.

    use proptest::prelude::*;
    use treedist::{Forest, Tree};

    /// A tree with `1..=max` nodes over `alphabet`: node `k` attaches to the
    /// node picked by the k-th choice among `0..k`.
    pub fn tree(max: usize, alphabet: &'static [&'static str]) -> impl Strategy<Value = Tree> {
        (1..=max)
            .prop_flat_map(move |n| {
                (
                    proptest::collection::vec(any::<u32>(), n - 1),
                    proptest::collection::vec(0..alphabet.len(), n),
                )
            })
            .prop_map(move |(parents, labels)| {
                let n = labels.len();
                let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
                for (k, choice) in parents.iter().enumerate() {
                    let id = k + 1;
                    children[*choice as usize % id].push(id);
                }
                let names: Vec<&str> = labels.iter().map(|&l| alphabet[l]).collect();
                super::build(0, &children, &names)
            })
    }

    /// A forest with `0..=max` nodes.
    pub fn forest(max: usize, alphabet: &'static [&'static str]) -> impl Strategy<Value = Forest> {
        tree(max + 1, alphabet).prop_map(|t| Forest(t.children))
    }
}

/// A random valid mapping: source nodes are visited in pre-order and each is
/// mapped, with probability one half, to a random target node that keeps the
/// mapping valid.
pub fn random_mapping<R: Rng>(rng: &mut R, x: &Forest, y: &Forest) -> Vec<(usize, usize)> {
    let (fx, fy) = (Flat::new(x), Flat::new(y));
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for i in 0..fx.len() {
        if !rng.gen_bool(0.5) {
            continue;
        }
        let next_j = pairs.last().map_or(0, |&(_, j)| j);
        let candidates: Vec<usize> = (next_j..fy.len())
            .filter(|&j| {
                pairs
                    .iter()
                    .all(|&(a, b)| fx.is_ancestor(a - 1, i) == fy.is_ancestor(b - 1, j))
            })
            .collect();
        if !candidates.is_empty() {
            let j = candidates[rng.gen_range(0..candidates.len())];
            pairs.push((i + 1, j + 1));
        }
    }
    pairs
}

/// A random script of `len` edits, each drawn against the forest produced by
/// the edits before it. Indices occasionally fall out of range.
pub fn random_script<R: Rng>(
    rng: &mut R,
    forest: &Forest,
    len: usize,
    alphabet: &[&str],
) -> treedist::Script {
    use treedist::{Edit, PreorderIndex};
    let mut current = forest.clone();
    let mut edits = Vec::new();
    for _ in 0..len {
        let index = PreorderIndex::new(&current);
        let size = index.len();
        let node = rng.gen_range(0..=size + 1);
        let label = alphabet[rng.gen_range(0..alphabet.len())];
        let edit = match rng.gen_range(0..3) {
            0 => Edit::delete(node),
            1 => Edit::replace(node, label),
            _ => {
                let parent = rng.gen_range(0..=size);
                let slots = index.children(parent).len() + 1;
                let first = rng.gen_range(1..=slots);
                let end = rng.gen_range(first..=slots);
                Edit::insert(parent, label, first, end)
            }
        };
        edit.apply(&mut current);
        edits.push(edit);
    }
    treedist::Script(edits)
}
