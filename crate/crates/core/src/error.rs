use crate::types::Var;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("variable {var:?} has cardinality {card}; at least 2 is required")]
    InvalidDomain { var: Var, card: usize },

    #[error("invalid factor: {0}")]
    InvalidFactor(String),

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("invalid ordering: {0}")]
    InvalidOrdering(String),

    #[error("evidence {var:?}={value} is out of range")]
    InvalidEvidence { var: Var, value: usize },

    #[error("variable {var:?} observed twice")]
    DuplicateEvidence { var: Var },

    #[error("variable {var:?} is not in the factor scope")]
    VarNotInScope { var: Var },

    #[error("table size overflows the address space")]
    TableTooLarge,

    #[error("resource limit exceeded: {what} needs {needed} cells, cap is {cap}")]
    ResourceLimit {
        what: &'static str,
        needed: usize,
        cap: usize,
    },

    #[error("search frontier exceeded {cap} nodes; best lower bound so far {lower_bound:e}")]
    FrontierLimit { cap: usize, lower_bound: f64 },

    #[error("infeasible mini-bucket configuration: {0}")]
    InfeasibleConfig(String),

    #[error("hypothesis variables must occupy the first positions of the ordering")]
    HypothesisOrdering,

    #[error("query variable must be first in the ordering")]
    QueryOrdering,

    #[error("network is not a poly-tree")]
    NotPolytree,

    #[error("the state space ({states} assignments) exceeds the oracle budget {budget}")]
    OracleBudget { states: usize, budget: usize },

    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
