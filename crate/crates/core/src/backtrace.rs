//! Recovering one optimal mapping from the dynamic program.
//!
//! The walk starts at `D[1][1]` of the root slab and repeatedly follows a
//! transition whose value accounts exactly for the current cell, preferring
//! replacements over deletions over insertions. When a whole-subtree
//! replacement is taken, the slab of that subtree pair is recomputed in
//! place (offset by the value past the subtrees) and the walk continues
//! inside it; once it leaves the subtree pair it resumes in the enclosing
//! slab.

use crate::dp::{fill_slab, TreeCells, TreeDistance};
use crate::mapping::Mapping;
use crate::edits::Script;
use crate::tree::Forest;

/// Whether two computed costs agree within `eps`.
#[inline]
pub(crate) fn same(a: f64, b: f64, eps: f64) -> bool {
    (a - b).abs() <= eps
}

impl TreeDistance {
    /// One optimal mapping, with co-optimality tested up to `eps`.
    ///
    /// A single-node replacement `(i, j)` is only taken where both remaining
    /// sub-forests are the subtrees of `i` and `j`, so the result is always a
    /// valid mapping, also for cost functions where replacing costs exactly
    /// as much as deleting and inserting.
    pub fn backtrace(&self, eps: f64) -> Mapping {
        let (x, y, costs) = (&self.x, &self.y, &self.costs);
        let mut slab = self.forest_dist.clone();
        let mut mapping = Mapping::new();
        // Last source and target positions of each subtree pair entered.
        let mut scopes = vec![(x.len(), y.len())];
        let (mut i, mut j) = (1, 1);
        while let Some(&(end_x, end_y)) = scopes.last() {
            if i > end_x || j > end_y {
                // Only deletions or insertions remain in this scope.
                scopes.pop();
                i = end_x + 1;
                j = end_y + 1;
                continue;
            }
            let here = slab.at(i, j);
            let (rl_i, rl_j) = (x.rl(i), y.rl(j));
            if rl_i == end_x && rl_j == end_y {
                if same(here, slab.at(i + 1, j + 1) + costs.rep(i, j), eps) {
                    mapping.insert(i, j);
                    i += 1;
                    j += 1;
                    continue;
                }
            } else if same(here, slab.at(rl_i + 1, rl_j + 1) + self.tree_dist.at(i, j), eps) {
                fill_slab(x, y, costs, TreeCells::Reuse(&self.tree_dist), &mut slab, i, j);
                scopes.push((rl_i, rl_j));
                continue;
            }
            if same(here, slab.at(i + 1, j) + costs.del(i), eps) {
                i += 1;
            } else {
                debug_assert!(same(here, slab.at(i, j + 1) + costs.ins(j), eps));
                j += 1;
            }
        }
        mapping
    }

    /// An optimal edit script, derived from [`backtrace`](Self::backtrace).
    pub fn script(&self, eps: f64) -> Script {
        let mapping = self.backtrace(eps);
        mapping.to_script_indexed(&self.x, &self.y, &self.y.forest())
    }

    /// The source tree as a forest.
    pub fn source_forest(&self) -> Forest {
        self.x.forest()
    }

    /// The target tree as a forest.
    pub fn target_forest(&self) -> Forest {
        self.y.forest()
    }
}
