//! Ordered tree edit distance with general costs.
//!
//! The crate computes the edit distance between two ordered, labelled trees
//! under a user-supplied cost function, recovers an optimal mapping and edit
//! script, and counts every co-optimal mapping together with how often each
//! node pair occurs among them.
//!
//! ```
//! use treedist::{ted, CostFunction, CountOptions, Tree};
//!
//! let x = Tree::parse("a(b(c,d),e)").unwrap();
//! let y = Tree::parse("f(g)").unwrap();
//! let state = ted(&x, &y, &CostFunction::unit()).unwrap();
//! assert_eq!(state.distance(), 5.0);
//!
//! let mapping = state.backtrace(0.0);
//! assert_eq!(mapping.to_string(), "1 1\n2 2");
//!
//! let counts = state.count_cooptimal(CountOptions::default());
//! assert_eq!(counts.total().to_string(), "6");
//! ```
//!
//! Nodes are numbered from 1 in pre-order throughout.

#![warn(missing_docs)]

pub mod backtrace;
pub mod cost;
pub mod counting;
pub mod dp;
pub mod edits;
pub mod error;
pub mod mapping;
pub mod tree;

pub use cost::{CostFunction, DefaultCosts, MetricReport};
pub use counting::{CoOptimalCounts, CountOptions, CountingStrategy, Dag, PairProbabilities};
pub use dp::{ted, ted_proto, TreeDistance};
pub use edits::{Edit, Script};
pub use error::{ContractError, CostError, Error, ParseError};
pub use mapping::{num_descendants, Mapping};
pub use tree::{Forest, PreorderIndex, Tree};
