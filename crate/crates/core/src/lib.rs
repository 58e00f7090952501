//! Discrete belief-network inference built on bucket elimination.
//!
//! The crate provides the exact engines (most probable explanation, belief
//! updating and maximum a posteriori hypothesis), the parameterized
//! mini-bucket approximations with certified upper/lower bounds, a
//! best-first exact MPE search driven by mini-bucket heuristics,
//! deterministic random-instance generators, brute-force oracles, and a
//! line-oriented network file format.

pub mod buckets;
pub mod elim;
pub mod error;
pub mod factor;
pub mod generate;
pub mod graph;
pub mod io;
pub mod minibucket;
pub mod network;
pub mod oracle;
pub mod polytree;
pub mod search;
pub mod types;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
pub use factor::{eliminate, eliminate_all, multiply, restrict, ElimOp, Factor};
pub use graph::{
    find_ordering, find_ordering_with_front, width_and_induced_width, OrderingStrategy,
    UndirectedGraph,
};
pub use network::BeliefNetwork;
pub use polytree::{is_polytree, legal_ordering};
pub use types::{Assignment, Domains, Evidence, Ordering, Var};
