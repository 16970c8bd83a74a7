use thiserror::Error;

use crate::instance::LinkId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("epsilon must be positive")]
    InvalidEpsilon,
    #[error("the up-link set is empty")]
    EmptyU,
    #[error("tree edge above vertex {0} cannot be covered")]
    Infeasible(usize),
    #[error("no nonempty component drops any up-link")]
    NoComponent,
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
    #[error("dependency graph is not a branching: link {link} has {indegree} incoming arcs")]
    NotABranching { link: LinkId, indegree: usize },
    #[error("link {0} is not an up-link")]
    NotAnUplink(LinkId),
    #[error("link set does not cover all tree edges")]
    NotASolution,
}

/// An exhaustive search refused to run or gave up.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("oracle budget exceeded: {what} ({actual} > {limit})")]
pub struct BudgetExceeded {
    pub what: &'static str,
    pub actual: u64,
    pub limit: u64,
}
