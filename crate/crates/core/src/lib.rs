//! Weighted tree augmentation.
//!
//! A spanning tree plus weighted links; pick a cheapest link set whose tree
//! paths cover every tree edge. The solver starts from a cheapest cover by
//! pairwise-disjoint vertical paths (at most twice optimal) and improves it
//! with a relative greedy over thin link components.

pub mod baseline;
pub mod bench;
pub mod component_dp;
pub mod decomposition;
pub mod edgeset;
pub mod error;
pub mod generators;
pub mod greedy;
pub mod instance;
pub mod io;
pub mod oracle;
pub mod ratio_search;
pub mod rational;
pub mod solution;
pub mod tree;

pub use edgeset::EdgeSet;
pub use instance::{Instance, Link, LinkCatalog, LinkId, Origin, ValidationError, VertexId};
pub use rational::Rational;
pub use error::{BudgetExceeded, SolveError};
pub use solution::Solution;
