//! Counting co-optimal mappings.
//!
//! Optimal mappings correspond to paths through a graph over the cells of the
//! forest-distance slabs: deletion, insertion and replacement moves whose cost
//! accounts exactly for the difference of the cell values. A replacement of
//! two nodes whose remaining sub-forests are more than their subtrees jumps
//! past both subtrees at once; its weight is the number of optimal mappings
//! of the two subtrees that map their roots onto each other, counted in the
//! slab of that subtree pair with the root replacement forced.
//!
//! Several paths can describe the same mapping: between two replacements, the
//! deletions and insertions can be interleaved arbitrarily. Only the
//! interleaving that performs all deletions first is counted, by tracking
//! whether the previous move was an insertion. This makes path counts equal
//! mapping counts.
//!
//! Forward counts `A` (paths from the start to a cell) and backward counts `B`
//! (paths from a cell to the end) combine into `Γ[i][j]`, the number of
//! co-optimal mappings containing the pair `(i, j)`.

use std::borrow::Cow;
use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::backtrace::same;
use crate::dp::{Grid, TreeDistance};
use crate::error::ContractError;

/// A directed acyclic graph whose node ids are a topological order: every
/// edge leads from a smaller id to a larger one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dag {
    successors: Vec<Vec<usize>>,
    predecessors: Vec<Vec<usize>>,
}

impl Dag {
    /// Builds a graph with nodes `0..nodes` from its edges.
    pub fn new(nodes: usize, edges: &[(usize, usize)]) -> Result<Self, ContractError> {
        let mut successors = vec![Vec::new(); nodes];
        let mut predecessors = vec![Vec::new(); nodes];
        for &(from, to) in edges {
            if from >= nodes || to >= nodes {
                return Err(ContractError::IndexOutOfRange {
                    index: from.max(to),
                    len: nodes,
                });
            }
            if from >= to {
                return Err(ContractError::InvalidQuery(format!(
                    "edge {from} -> {to} does not follow the node order"
                )));
            }
            successors[from].push(to);
            predecessors[to].push(from);
        }
        Ok(Dag {
            successors,
            predecessors,
        })
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.successors.len()
    }

    /// Whether the graph has no nodes.
    pub fn is_empty(&self) -> bool {
        self.successors.is_empty()
    }

    /// Number of paths from `source` to every node, visiting nodes from a
    /// worklist in ascending order.
    pub fn forward_counts(&self, source: usize) -> Vec<BigUint> {
        let mut counts = vec![BigUint::zero(); self.len()];
        counts[source] = BigUint::one();
        let mut queue = BTreeSet::from([source]);
        while let Some(node) = queue.pop_first() {
            let here = counts[node].clone();
            for &next in &self.successors[node] {
                counts[next] += &here;
                queue.insert(next);
            }
        }
        counts
    }

    /// Number of paths from every node to `sink`, visiting nodes from a
    /// worklist in descending order.
    pub fn backward_counts(&self, sink: usize) -> Vec<BigUint> {
        let mut counts = vec![BigUint::zero(); self.len()];
        counts[sink] = BigUint::one();
        let mut queue = BTreeSet::from([sink]);
        while let Some(node) = queue.pop_last() {
            let here = counts[node].clone();
            for &prev in &self.predecessors[node] {
                counts[prev] += &here;
                queue.insert(prev);
            }
        }
        counts
    }

    /// Number of source-to-sink paths through each edge, keyed by edge.
    pub fn edge_counts(&self, source: usize, sink: usize) -> BTreeMap<(usize, usize), BigUint> {
        let forward = self.forward_counts(source);
        let backward = self.backward_counts(sink);
        let mut out = BTreeMap::new();
        for (from, nexts) in self.successors.iter().enumerate() {
            for &to in nexts {
                *out.entry((from, to)).or_insert_with(BigUint::zero) += &forward[from] * &backward[to];
            }
        }
        out
    }
}

/// How sub-results of nested subtree pairs are reused.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum CountingStrategy {
    /// Recompute nested subtree pairs whenever they are reached. Uses little
    /// memory, but the running time can grow quickly with tree depth.
    #[default]
    Recursive,
    /// Remember the count of every subtree pair and visit each pair once,
    /// accumulating how many outer completions reach it.
    Tabulated,
}

/// Options for [`TreeDistance::count_cooptimal`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountOptions {
    /// Tolerance for co-optimality tests.
    pub eps: f64,
    /// How nested subtree pairs are handled.
    pub strategy: CountingStrategy,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions {
            eps: 1e-9,
            strategy: CountingStrategy::Recursive,
        }
    }
}

/// Co-optimal mapping counts for a pair of trees.
#[derive(Debug, Clone, PartialEq)]
pub struct CoOptimalCounts {
    total: BigUint,
    forward: Grid<BigUint>,
    backward: Grid<BigUint>,
    gamma: Grid<BigUint>,
}

impl CoOptimalCounts {
    /// Number of co-optimal mappings.
    pub fn total(&self) -> &BigUint {
        &self.total
    }

    /// Number of path prefixes reaching cell `(i, j)` of the root slab, for
    /// `1 <= i <= m + 1`, `1 <= j <= n + 1`.
    pub fn forward(&self, i: usize, j: usize) -> &BigUint {
        self.forward.get(i, j)
    }

    /// Number of path completions from cell `(i, j)` of the root slab.
    pub fn backward(&self, i: usize, j: usize) -> &BigUint {
        self.backward.get(i, j)
    }

    /// Number of co-optimal mappings containing the pair `(i, j)`.
    pub fn gamma(&self, i: usize, j: usize) -> &BigUint {
        self.gamma.get(i, j)
    }

    /// `Γ` as rows, `rows[i - 1][j - 1] = Γ[i][j]`.
    pub fn gamma_rows(&self) -> Vec<Vec<BigUint>> {
        self.gamma.to_rows()
    }

    /// For each source node, the number of co-optimal mappings deleting it.
    pub fn deletion_counts(&self) -> Vec<BigUint> {
        self.gamma_rows()
            .iter()
            .map(|row| &self.total - row.iter().sum::<BigUint>())
            .collect()
    }

    /// For each target node, the number of co-optimal mappings inserting it.
    pub fn insertion_counts(&self) -> Vec<BigUint> {
        let rows = self.gamma_rows();
        let cols = rows.first().map_or(0, Vec::len);
        (0..cols)
            .map(|j| &self.total - rows.iter().map(|row| &row[j]).sum::<BigUint>())
            .collect()
    }

    /// Probabilities of each pair, deletion and insertion under a uniform
    /// choice among the co-optimal mappings.
    pub fn probabilities(&self) -> Result<PairProbabilities, ContractError> {
        if self.total.is_zero() {
            return Err(ContractError::InvalidQuery("no co-optimal mapping was found".into()));
        }
        let total = BigRational::from_integer(self.total.clone().into());
        let ratio = |count: &BigUint| BigRational::from_integer(count.clone().into()) / &total;
        let pairs: Vec<Vec<BigRational>> = self
            .gamma_rows()
            .iter()
            .map(|row| row.iter().map(ratio).collect())
            .collect();
        let deletions = self.deletion_counts().iter().map(ratio).collect();
        let insertions = self.insertion_counts().iter().map(ratio).collect();
        Ok(PairProbabilities {
            pairs,
            deletions,
            insertions,
        })
    }
}

/// Exact probabilities derived from [`CoOptimalCounts`].
#[derive(Debug, Clone, PartialEq)]
pub struct PairProbabilities {
    /// `pairs[i - 1][j - 1]`: probability that `(i, j)` is mapped.
    pub pairs: Vec<Vec<BigRational>>,
    /// Probability that source node `i` is deleted, at index `i - 1`.
    pub deletions: Vec<BigRational>,
    /// Probability that target node `j` is inserted, at index `j - 1`.
    pub insertions: Vec<BigRational>,
}

impl PairProbabilities {
    /// The expected cost of a uniformly chosen co-optimal mapping, which
    /// equals the edit distance.
    pub fn expected_cost(&self, state: &TreeDistance) -> BigRational {
        let exact = |c: f64| BigRational::from_float(c).expect("costs are finite");
        let mut sum = BigRational::zero();
        for (i, row) in self.pairs.iter().enumerate() {
            for (j, p) in row.iter().enumerate() {
                if !p.is_zero() {
                    sum += p * exact(state.costs.rep(i + 1, j + 1));
                }
            }
        }
        for (i, p) in self.deletions.iter().enumerate() {
            sum += p * exact(state.costs.del(i + 1));
        }
        for (j, p) in self.insertions.iter().enumerate() {
            sum += p * exact(state.costs.ins(j + 1));
        }
        sum
    }
}

/// One step out of a slab cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Move {
    Delete,
    Insert,
    /// Map the two nodes; the target cell is the one after their subtrees
    /// when `nested`, else the diagonal neighbour.
    Replace { nested: bool },
}

/// The slab of one subtree pair, seen as a graph of co-optimal moves.
struct Scope<'a> {
    state: &'a TreeDistance,
    slab: Cow<'a, Grid<f64>>,
    root: (usize, usize),
    end: (usize, usize),
    /// Whether the root pair must be mapped onto each other.
    forced: bool,
    eps: f64,
}

impl<'a> Scope<'a> {
    fn top(state: &'a TreeDistance, eps: f64) -> Self {
        Scope {
            state,
            slab: state.slab(1, 1),
            root: (1, 1),
            end: (state.x.len(), state.y.len()),
            forced: false,
            eps,
        }
    }

    fn nested(state: &'a TreeDistance, i: usize, j: usize, eps: f64) -> Self {
        Scope {
            state,
            slab: state.slab(i, j),
            root: (i, j),
            end: (state.x.rl(i), state.y.rl(j)),
            forced: true,
            eps,
        }
    }

    fn sink(&self) -> (usize, usize) {
        (self.end.0 + 1, self.end.1 + 1)
    }

    /// Co-optimal moves out of `(i, j)` with their target cells.
    fn moves(&self, i: usize, j: usize) -> Vec<(Move, (usize, usize))> {
        let (x, y, costs) = (&self.state.x, &self.state.y, &self.state.costs);
        let slab = &self.slab;
        let here = slab.at(i, j);
        let mut out = Vec::with_capacity(3);
        let at_root = self.forced && (i, j) == self.root;
        if i <= self.end.0 && !at_root && same(here, slab.at(i + 1, j) + costs.del(i), self.eps) {
            out.push((Move::Delete, (i + 1, j)));
        }
        if j <= self.end.1 && !at_root && same(here, slab.at(i, j + 1) + costs.ins(j), self.eps) {
            out.push((Move::Insert, (i, j + 1)));
        }
        if i <= self.end.0 && j <= self.end.1 {
            let (rl_i, rl_j) = (x.rl(i), y.rl(j));
            if rl_i == self.end.0 && rl_j == self.end.1 {
                if same(here, slab.at(i + 1, j + 1) + costs.rep(i, j), self.eps) {
                    out.push((Move::Replace { nested: false }, (i + 1, j + 1)));
                }
            } else if same(here, slab.at(rl_i + 1, rl_j + 1) + self.state.tree_dist.at(i, j), self.eps)
            {
                out.push((Move::Replace { nested: true }, (rl_i + 1, rl_j + 1)));
            }
        }
        out
    }

    fn grid<T: Clone>(&self, fill: T) -> Grid<T> {
        let (end_x, end_y) = self.sink();
        Grid::new(self.root.0, end_x, self.root.1, end_y, fill)
    }
}

/// An outgoing transition: the move, the cell it leads to and its weight.
type Step = (Move, (usize, usize), BigUint);

/// Path counts within one scope, split by whether the last move was an
/// insertion.
struct Passes {
    /// Reached by the start, a deletion or a replacement.
    forward_free: Grid<BigUint>,
    /// Reached by an insertion.
    forward_after_insert: Grid<BigUint>,
    /// Completions allowed after any move.
    backward_free: Grid<BigUint>,
    /// Cells reached, in ascending order.
    reached: Vec<(usize, usize)>,
    /// Moves out of each reached cell, with the weight of each move.
    moves: HashMap<(usize, usize), Vec<Step>>,
}

impl Passes {
    fn forward(&self, cell: (usize, usize)) -> BigUint {
        self.forward_free.get(cell.0, cell.1) + self.forward_after_insert.get(cell.0, cell.1)
    }
}

/// Runs the forward and backward passes over a scope. `weight` gives the
/// number of root-mapping co-optimal mappings of a nested subtree pair.
fn passes(scope: &Scope<'_>, weight: &mut dyn FnMut(usize, usize) -> BigUint) -> Passes {
    let mut forward_free = scope.grid(BigUint::zero());
    let mut forward_after_insert = scope.grid(BigUint::zero());
    let mut moves = HashMap::new();
    let mut reached = Vec::new();
    let (i0, j0) = scope.root;
    forward_free.set(i0, j0, BigUint::one());
    let mut queue = BTreeSet::from([scope.root]);
    while let Some((i, j)) = queue.pop_first() {
        reached.push((i, j));
        let free = forward_free.get(i, j).clone();
        let any = &free + forward_after_insert.get(i, j);
        let mut out = Vec::new();
        for (step, (ti, tj)) in scope.moves(i, j) {
            let w = match step {
                Move::Replace { nested: true } => weight(i, j),
                _ => BigUint::one(),
            };
            if w.is_zero() {
                continue;
            }
            match step {
                Move::Delete => *forward_free.get_mut(ti, tj) += &free,
                Move::Insert => *forward_after_insert.get_mut(ti, tj) += &any,
                Move::Replace { .. } => *forward_free.get_mut(ti, tj) += &any * &w,
            }
            queue.insert((ti, tj));
            out.push((step, (ti, tj), w));
        }
        moves.insert((i, j), out);
    }

    let mut backward_free = scope.grid(BigUint::zero());
    let mut backward_after_insert = scope.grid(BigUint::zero());
    let (si, sj) = scope.sink();
    if reached.last() == Some(&(si, sj)) {
        backward_free.set(si, sj, BigUint::one());
        backward_after_insert.set(si, sj, BigUint::one());
    }
    for &(i, j) in reached.iter().rev() {
        if (i, j) == (si, sj) {
            continue;
        }
        let mut free = BigUint::zero();
        let mut after_insert = BigUint::zero();
        for (step, (ti, tj), w) in &moves[&(i, j)] {
            match step {
                Move::Delete => free += backward_free.get(*ti, *tj),
                Move::Insert => {
                    let next = backward_after_insert.get(*ti, *tj);
                    free += next;
                    after_insert += next;
                }
                Move::Replace { .. } => {
                    let next = backward_free.get(*ti, *tj) * w;
                    free += &next;
                    after_insert += next;
                }
            }
        }
        backward_free.set(i, j, free);
        backward_after_insert.set(i, j, after_insert);
    }

    Passes {
        forward_free,
        forward_after_insert,
        backward_free,
        reached,
        moves,
    }
}

/// Number of co-optimal mappings of the subtrees rooted at `(i, j)` that map
/// `i` onto `j`, recomputing nested pairs.
fn root_count_recursive(state: &TreeDistance, i: usize, j: usize, eps: f64) -> BigUint {
    let scope = Scope::nested(state, i, j, eps);
    let mut cache = HashMap::new();
    let result = passes(&scope, &mut |a, b| {
        cache
            .entry((a, b))
            .or_insert_with(|| root_count_recursive(state, a, b, eps))
            .clone()
    });
    let (si, sj) = scope.sink();
    result.forward((si, sj))
}

/// Adds `multiplier` times the pair counts of `scope` to `gamma`, recursing
/// into nested subtree pairs.
fn gamma_recursive(scope: &Scope<'_>, multiplier: &BigUint, gamma: &mut Grid<BigUint>) -> Passes {
    let state = scope.state;
    let eps = scope.eps;
    let mut cache = HashMap::new();
    let result = passes(scope, &mut |a, b| {
        cache
            .entry((a, b))
            .or_insert_with(|| root_count_recursive(state, a, b, eps))
            .clone()
    });
    for &cell in &result.reached {
        let reach = result.forward(cell);
        for (step, (ti, tj), _) in &result.moves[&cell] {
            let Move::Replace { nested } = step else { continue };
            let through = &reach * result.backward_free.get(*ti, *tj) * multiplier;
            if through.is_zero() {
                continue;
            }
            if *nested {
                let inner = Scope::nested(state, cell.0, cell.1, eps);
                gamma_recursive(&inner, &through, gamma);
            } else {
                *gamma.get_mut(cell.0, cell.1) += through;
            }
        }
    }
    result
}

/// Tabulated variant: subtree-pair counts are memoised and every nested pair
/// is expanded once with the summed multiplicity of all its occurrences.
fn gamma_tabulated(top: &Scope<'_>, gamma: &mut Grid<BigUint>) -> Passes {
    let state = top.state;
    let eps = top.eps;
    let mut memo: HashMap<(usize, usize), BigUint> = HashMap::new();
    let mut pending: BTreeMap<(usize, usize), BigUint> = BTreeMap::new();

    fn root_count(
        state: &TreeDistance,
        i: usize,
        j: usize,
        eps: f64,
        memo: &mut HashMap<(usize, usize), BigUint>,
    ) -> BigUint {
        if let Some(count) = memo.get(&(i, j)) {
            return count.clone();
        }
        let scope = Scope::nested(state, i, j, eps);
        let result = passes(&scope, &mut |a, b| root_count(state, a, b, eps, memo));
        let count = result.forward(scope.sink());
        memo.insert((i, j), count.clone());
        count
    }

    let expand = |scope: &Scope<'_>,
                      multiplier: &BigUint,
                      memo: &mut HashMap<(usize, usize), BigUint>,
                      pending: &mut BTreeMap<(usize, usize), BigUint>,
                      gamma: &mut Grid<BigUint>| {
        let result = passes(scope, &mut |a, b| root_count(state, a, b, eps, memo));
        for &cell in &result.reached {
            let reach = result.forward(cell);
            for (step, (ti, tj), _) in &result.moves[&cell] {
                let Move::Replace { nested } = step else { continue };
                let through = &reach * result.backward_free.get(*ti, *tj) * multiplier;
                if through.is_zero() {
                    continue;
                }
                if *nested {
                    *pending.entry(cell).or_insert_with(BigUint::zero) += through;
                } else {
                    *gamma.get_mut(cell.0, cell.1) += through;
                }
            }
        }
        result
    };

    let top_result = expand(top, &BigUint::one(), &mut memo, &mut pending, gamma);
    // A nested pair only occurs inside pairs with smaller indices, so
    // expanding in ascending order sees every contribution before its pair.
    while let Some(((i, j), multiplier)) = pending.pop_first() {
        let scope = Scope::nested(state, i, j, eps);
        expand(&scope, &multiplier, &mut memo, &mut pending, gamma);
    }
    top_result
}

impl TreeDistance {
    /// Counts the co-optimal mappings and, for every node pair, the number of
    /// co-optimal mappings containing it.
    pub fn count_cooptimal(&self, options: CountOptions) -> CoOptimalCounts {
        let (m, n) = (self.x.len(), self.y.len());
        let top = Scope::top(self, options.eps);
        let mut gamma = Grid::new(1, m, 1, n, BigUint::zero());
        let result = match options.strategy {
            CountingStrategy::Recursive => gamma_recursive(&top, &BigUint::one(), &mut gamma),
            CountingStrategy::Tabulated => gamma_tabulated(&top, &mut gamma),
        };
        let mut forward = top.grid(BigUint::zero());
        for &(i, j) in &result.reached {
            forward.set(i, j, result.forward((i, j)));
        }
        let total = forward.get(m + 1, n + 1).clone();
        CoOptimalCounts {
            total,
            forward,
            backward: result.backward_free,
            gamma,
        }
    }
}
