//! Shared setup for the criterion benches: canonical instances so runs are
//! comparable across machines.

use bnet_core::elim::Limits;
use bnet_core::generate::{generate, GenSpec};
use bnet_core::{find_ordering, BeliefNetwork, Ordering, OrderingStrategy};

pub fn dense_30_80() -> (BeliefNetwork, Ordering) {
    let bn = generate(&GenSpec::uniform(30, 80, 17)).unwrap();
    let d = find_ordering(&bn.moral_graph(), &OrderingStrategy::MinFill).unwrap();
    (bn, d)
}

pub fn sparse_60_90() -> (BeliefNetwork, Ordering) {
    let bn = generate(&GenSpec::uniform(60, 90, 17)).unwrap();
    let d = find_ordering(&bn.moral_graph(), &OrderingStrategy::MinFill).unwrap();
    (bn, d)
}

pub fn limits() -> Limits {
    Limits::default()
}
