//! The keyroot dynamic program for tree edit distance.
//!
//! For every pair of keyroots `(k, l)`, processed from the last to the first,
//! a slab of forest distances `D[i][j] = dist(x[i..=rl(k)], y[j..=rl(l)])` is
//! filled for `k <= i <= rl(k) + 1` and `l <= j <= rl(l) + 1`. Cells where both
//! forests are single trees give the subtree distances `d[i][j]`, which later
//! slabs reuse for whole-subtree replacements. After the run the slab holds
//! the forest distances of the last pair processed, `(1, 1)`.

use std::borrow::Cow;

use crate::cost::{CostFunction, NodeCosts};
use crate::error::{ContractError, Error};
use crate::tree::{PreorderIndex, Tree, GAP};

/// A dense matrix addressed by absolute (row, column) indices starting at an
/// arbitrary origin.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Grid<T> {
    row0: usize,
    col0: usize,
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> Grid<T> {
    /// A grid covering rows `row0..=row_end` and columns `col0..=col_end`.
    pub(crate) fn new(row0: usize, row_end: usize, col0: usize, col_end: usize, fill: T) -> Self {
        let rows = (row_end + 1).saturating_sub(row0);
        let cols = (col_end + 1).saturating_sub(col0);
        Grid {
            row0,
            col0,
            rows,
            cols,
            data: vec![fill; rows * cols],
        }
    }

    #[inline]
    fn offset(&self, i: usize, j: usize) -> usize {
        debug_assert!(i >= self.row0 && i - self.row0 < self.rows, "row {i} out of grid");
        debug_assert!(j >= self.col0 && j - self.col0 < self.cols, "column {j} out of grid");
        (i - self.row0) * self.cols + (j - self.col0)
    }

    #[inline]
    pub(crate) fn get(&self, i: usize, j: usize) -> &T {
        &self.data[self.offset(i, j)]
    }

    #[inline]
    pub(crate) fn get_mut(&mut self, i: usize, j: usize) -> &mut T {
        let at = self.offset(i, j);
        &mut self.data[at]
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, j: usize, value: T) {
        let at = self.offset(i, j);
        self.data[at] = value;
    }

    /// Rows `row0..` as nested vectors.
    pub(crate) fn to_rows(&self) -> Vec<Vec<T>> {
        self.data.chunks(self.cols.max(1)).take(self.rows).map(<[T]>::to_vec).collect()
    }
}

impl Grid<f64> {
    #[inline]
    pub(crate) fn at(&self, i: usize, j: usize) -> f64 {
        *self.get(i, j)
    }
}

/// How cells where both sub-forests are whole subtrees are handled.
pub(crate) enum TreeCells<'a> {
    /// Compute them from the recurrence and record the subtree distance.
    Compute(&'a mut Grid<f64>),
    /// Take them from known subtree distances, shifted by the slab's base value.
    Reuse(&'a Grid<f64>),
}

impl TreeCells<'_> {
    #[inline]
    fn tree_distance(&self, i: usize, j: usize) -> f64 {
        match self {
            TreeCells::Compute(d) => d.at(i, j),
            TreeCells::Reuse(d) => d.at(i, j),
        }
    }
}

/// Fills the slab of the subtree pair `(k, l)`.
///
/// The base cell `slab[rl(k) + 1][rl(l) + 1]` must already be set; every
/// other cell of the block `k..=rl(k) + 1` by `l..=rl(l) + 1` is overwritten
/// with the distance between the remaining sub-forests plus that base.
pub(crate) fn fill_slab(
    x: &PreorderIndex,
    y: &PreorderIndex,
    costs: &NodeCosts,
    mut tree: TreeCells<'_>,
    slab: &mut Grid<f64>,
    k: usize,
    l: usize,
) {
    let (end_x, end_y) = (x.rl(k), y.rl(l));
    let base = slab.at(end_x + 1, end_y + 1);
    for i in (k..=end_x).rev() {
        let below = slab.at(i + 1, end_y + 1);
        slab.set(i, end_y + 1, below + costs.del(i));
    }
    for j in (l..=end_y).rev() {
        let right = slab.at(end_x + 1, j + 1);
        slab.set(end_x + 1, j, right + costs.ins(j));
    }
    for i in (k..=end_x).rev() {
        let rl_i = x.rl(i);
        let del = costs.del(i);
        for j in (l..=end_y).rev() {
            let rl_j = y.rl(j);
            let by_delete = slab.at(i + 1, j) + del;
            let by_insert = slab.at(i, j + 1) + costs.ins(j);
            let value = if rl_i == end_x && rl_j == end_y {
                match &mut tree {
                    TreeCells::Compute(d) => {
                        let by_replace = slab.at(i + 1, j + 1) + costs.rep(i, j);
                        let value = by_delete.min(by_insert).min(by_replace);
                        d.set(i, j, value - base);
                        value
                    }
                    TreeCells::Reuse(d) => d.at(i, j) + base,
                }
            } else {
                let by_subtree = slab.at(rl_i + 1, rl_j + 1) + tree.tree_distance(i, j);
                by_delete.min(by_insert).min(by_subtree)
            };
            slab.set(i, j, value);
        }
    }
}

/// The state left by the dynamic program: the subtree distance matrix and the
/// forest distances of the full trees.
#[derive(Debug, Clone)]
pub struct TreeDistance {
    pub(crate) x: PreorderIndex,
    pub(crate) y: PreorderIndex,
    pub(crate) costs: NodeCosts,
    pub(crate) cost_function: CostFunction,
    /// `d[i][j]`, rows `1..=m`, columns `1..=n`.
    pub(crate) tree_dist: Grid<f64>,
    /// `D[i][j]` of the root pair, rows `1..=m+1`, columns `1..=n+1`.
    pub(crate) forest_dist: Grid<f64>,
}

fn check_labels(index: &PreorderIndex) -> Result<(), ContractError> {
    if index.labels().iter().any(|l| l == GAP) {
        Err(ContractError::ReservedLabel)
    } else {
        Ok(())
    }
}

fn prepare(x: &Tree, y: &Tree, costs: &CostFunction) -> Result<TreeDistance, Error> {
    let xi = PreorderIndex::of_tree(x);
    let yi = PreorderIndex::of_tree(y);
    check_labels(&xi)?;
    check_labels(&yi)?;
    let (m, n) = (xi.len(), yi.len());
    Ok(TreeDistance {
        costs: NodeCosts::new(&xi, &yi, costs),
        cost_function: costs.clone(),
        tree_dist: Grid::new(1, m, 1, n, 0.0),
        forest_dist: Grid::new(1, m + 1, 1, n + 1, 0.0),
        x: xi,
        y: yi,
    })
}

/// Computes the edit distance between two trees.
///
/// The cost function should be non-negative, zero on identical labels and
/// satisfy the triangle inequality (see
/// [`CostFunction::check_admissible`]); otherwise the result is the optimum
/// of the recurrence, which need not be the cheapest edit script.
pub fn ted(x: &Tree, y: &Tree, costs: &CostFunction) -> Result<TreeDistance, Error> {
    let mut state = prepare(x, y, costs)?;
    let keyroots_x = state.x.keyroots();
    let keyroots_y = state.y.keyroots();
    for &k in keyroots_x.iter().rev() {
        for &l in keyroots_y.iter().rev() {
            let TreeDistance {
                x,
                y,
                costs,
                tree_dist,
                forest_dist,
                ..
            } = &mut state;
            forest_dist.set(x.rl(k) + 1, y.rl(l) + 1, 0.0);
            fill_slab(x, y, costs, TreeCells::Compute(tree_dist), forest_dist, k, l);
        }
    }
    Ok(state)
}

/// Computes the edit distance by filling a slab for every node pair rather
/// than only for keyroot pairs. Quadratically slower than [`ted`]; kept as
/// an independent reference implementation.
pub fn ted_proto(x: &Tree, y: &Tree, costs: &CostFunction) -> Result<TreeDistance, Error> {
    let mut state = prepare(x, y, costs)?;
    let (m, n) = (state.x.len(), state.y.len());
    let (xi, yi, c) = (&state.x, &state.y, &state.costs);
    let mut forest = vec![vec![0.0f64; n + 2]; m + 2];
    let mut tree = vec![vec![0.0f64; n + 1]; m + 1];
    for k in (1..=m).rev() {
        for l in (1..=n).rev() {
            let (rk, rl) = (xi.rl(k), yi.rl(l));
            forest[rk + 1][rl + 1] = 0.0;
            for i in (k..=rk).rev() {
                forest[i][rl + 1] = forest[i + 1][rl + 1] + c.del(i);
            }
            for j in (l..=rl).rev() {
                forest[rk + 1][j] = forest[rk + 1][j + 1] + c.ins(j);
            }
            for i in (k..=rk).rev() {
                for j in (l..=rl).rev() {
                    let del = forest[i + 1][j] + c.del(i);
                    let ins = forest[i][j + 1] + c.ins(j);
                    if xi.rl(i) == rk && yi.rl(j) == rl {
                        let rep = forest[i + 1][j + 1] + c.rep(i, j);
                        forest[i][j] = del.min(ins).min(rep);
                        tree[i][j] = forest[i][j];
                    } else {
                        let sub = forest[xi.rl(i) + 1][yi.rl(j) + 1] + tree[i][j];
                        forest[i][j] = del.min(ins).min(sub);
                    }
                }
            }
        }
    }
    for i in 1..=m + 1 {
        for j in 1..=n + 1 {
            state.forest_dist.set(i, j, forest[i][j]);
            if i <= m && j <= n {
                state.tree_dist.set(i, j, tree[i][j]);
            }
        }
    }
    Ok(state)
}

impl TreeDistance {
    /// The edit distance between the two trees.
    pub fn distance(&self) -> f64 {
        self.tree_dist.at(1, 1)
    }

    /// Pre-order index of the source tree.
    pub fn source(&self) -> &PreorderIndex {
        &self.x
    }

    /// Pre-order index of the target tree.
    pub fn target(&self) -> &PreorderIndex {
        &self.y
    }

    /// The cost function used.
    pub fn cost_function(&self) -> &CostFunction {
        &self.cost_function
    }

    /// Distance between the subtrees rooted at source node `i` and target node `j`.
    pub fn tree_distance(&self, i: usize, j: usize) -> f64 {
        self.tree_dist.at(i, j)
    }

    /// The subtree distance matrix, `rows[i - 1][j - 1] = d[i][j]`.
    pub fn tree_distances(&self) -> Vec<Vec<f64>> {
        self.tree_dist.to_rows()
    }

    /// Distance between the pre-order suffixes `x[i..]` and `y[j..]` as
    /// forests, for `1 <= i <= m + 1` and `1 <= j <= n + 1`.
    pub fn forest_distance(&self, i: usize, j: usize) -> f64 {
        self.forest_dist.at(i, j)
    }

    /// Distance between the sub-forests `x[i..=rl(k)]` and `y[j..=rl(l)]`,
    /// where `k <= i <= rl(k) + 1` and `l <= j <= rl(l) + 1`.
    pub fn subforest_distance(&self, k: usize, i: usize, l: usize, j: usize) -> Result<f64, ContractError> {
        let check = |index: &PreorderIndex, root: usize, at: usize, side: &str| {
            if !(1..=index.len()).contains(&root) || at < root || at > index.rl(root) + 1 {
                Err(ContractError::InvalidQuery(format!(
                    "{side} position {at} is not within subtree {root} or just past it"
                )))
            } else {
                Ok(())
            }
        };
        check(&self.x, k, i, "source")?;
        check(&self.y, l, j, "target")?;
        let slab = self.slab(k, l);
        Ok(slab.at(i, j))
    }

    /// The forest-distance slab of the subtree pair `(k, l)` with base zero.
    pub(crate) fn slab(&self, k: usize, l: usize) -> Cow<'_, Grid<f64>> {
        if k == 1 && l == 1 {
            return Cow::Borrowed(&self.forest_dist);
        }
        let (end_x, end_y) = (self.x.rl(k), self.y.rl(l));
        let mut slab = Grid::new(k, end_x + 1, l, end_y + 1, 0.0);
        fill_slab(
            &self.x,
            &self.y,
            &self.costs,
            TreeCells::Reuse(&self.tree_dist),
            &mut slab,
            k,
            l,
        );
        Cow::Owned(slab)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> TreeDistance {
        let x = Tree::parse("a(b(c,d),e)").unwrap();
        let y = Tree::parse("f(g)").unwrap();
        ted(&x, &y, &CostFunction::unit()).unwrap()
    }

    #[test]
    fn golden_distance_and_subtree_matrix() {
        let state = golden();
        assert_eq!(state.distance(), 5.0);
        assert_eq!(
            state.tree_distances(),
            vec![
                vec![5.0, 5.0],
                vec![3.0, 3.0],
                vec![2.0, 1.0],
                vec![2.0, 1.0],
                vec![2.0, 1.0]
            ]
        );
    }

    #[test]
    fn golden_root_slab() {
        let state = golden();
        let expected = [
            [5.0, 5.0, 5.0],
            [4.0, 4.0, 4.0],
            [4.0, 3.0, 3.0],
            [3.0, 2.0, 2.0],
            [2.0, 1.0, 1.0],
            [2.0, 1.0, 0.0],
        ];
        for (i, row) in expected.iter().enumerate() {
            for (j, &value) in row.iter().enumerate() {
                assert_eq!(state.forest_distance(i + 1, j + 1), value, "D[{}][{}]", i + 1, j + 1);
            }
        }
    }

    #[test]
    fn golden_inner_slabs() {
        let state = golden();
        // Slab of the pair (2, 1): rows 2..=5, columns 1..=3.
        let expected = [[3.0, 3.0, 3.0], [3.0, 2.0, 2.0], [2.0, 1.0, 1.0], [2.0, 1.0, 0.0]];
        for (r, row) in expected.iter().enumerate() {
            for (c, &value) in row.iter().enumerate() {
                assert_eq!(state.subforest_distance(2, r + 2, 1, c + 1).unwrap(), value);
            }
        }
        // Slab of the pair (3, 1): rows 3..=4, columns 1..=3.
        let expected = [[2.0, 1.0, 1.0], [2.0, 1.0, 0.0]];
        for (r, row) in expected.iter().enumerate() {
            for (c, &value) in row.iter().enumerate() {
                assert_eq!(state.subforest_distance(3, r + 3, 1, c + 1).unwrap(), value);
            }
        }
        assert_eq!(state.subforest_distance(1, 2, 1, 1).unwrap(), 4.0);
        assert_eq!(state.subforest_distance(2, 3, 1, 1).unwrap(), 3.0);
        assert_eq!(state.subforest_distance(3, 3, 1, 1).unwrap(), 2.0);
    }

    #[test]
    fn rejects_bad_queries() {
        let state = golden();
        assert!(state.subforest_distance(2, 1, 1, 1).is_err());
        assert!(state.subforest_distance(2, 6, 1, 1).is_err());
        assert!(state.subforest_distance(6, 6, 1, 1).is_err());
        assert!(state.subforest_distance(1, 1, 1, 4).is_err());
        assert!(state.subforest_distance(1, 6, 1, 3).is_ok());
    }

    #[test]
    fn proto_matches_keyroot_version() {
        let x = Tree::parse("a(b(c,d),e)").unwrap();
        let y = Tree::parse("f(g)").unwrap();
        let fast = ted(&x, &y, &CostFunction::unit()).unwrap();
        let slow = ted_proto(&x, &y, &CostFunction::unit()).unwrap();
        assert_eq!(fast.tree_distances(), slow.tree_distances());
        assert_eq!(fast.forest_dist, slow.forest_dist);
    }

    #[test]
    fn rejects_gap_labels() {
        let x = Tree::new("a", vec![Tree::leaf("-")]);
        assert!(ted(&x, &x, &CostFunction::unit()).is_err());
    }

    #[test]
    fn identical_trees_have_zero_distance() {
        let x = Tree::parse("a(b(c,d),e(f,g(h)))").unwrap();
        assert_eq!(ted(&x, &x, &CostFunction::unit()).unwrap().distance(), 0.0);
    }
}
