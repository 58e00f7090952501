//! Networks shared across the crate's unit tests.

use crate::factor::Factor;
use crate::generate::{gen_uniform_cpts, Dag, GenSpec};
use crate::network::BeliefNetwork;
use crate::types::{Domains, Var};

/// A -> B -> C with identity CPTs and root prior (0.3, 0.7).
pub fn chain3() -> BeliefNetwork {
    let d = Domains::binary(3);
    let prior = Factor::new(vec![Var(0)], vec![0.3, 0.7], &d).unwrap();
    let id01 = Factor::new(vec![Var(0), Var(1)], vec![1.0, 0.0, 0.0, 1.0], &d).unwrap();
    let id12 = Factor::new(vec![Var(1), Var(2)], vec![1.0, 0.0, 0.0, 1.0], &d).unwrap();
    BeliefNetwork::new(d, vec![vec![], vec![Var(0)], vec![Var(1)]], vec![prior, id01, id12])
        .unwrap()
}

/// Collider A -> C <- B.
pub fn collider() -> BeliefNetwork {
    random_structure(3, vec![vec![], vec![], vec![Var(0), Var(1)]], 1)
}

/// Single family: parents 0, 1 with child 2.
pub fn single_family() -> BeliefNetwork {
    collider()
}

/// Two stacked families: 0,1 -> 2 and 2,3 -> 4.
pub fn stacked_families() -> BeliefNetwork {
    random_structure(
        5,
        vec![vec![], vec![], vec![Var(0), Var(1)], vec![], vec![Var(2), Var(3)]],
        2,
    )
}

/// The eight-variable two-root layered network used throughout the tests:
/// variables 0..=7, with 7 <- {6,5}, 6 <- {3,4}, 5 <- {3,2}, 4 <- {0},
/// 3 <- {1,0}, 2 <- {1}, and roots 0, 1.
pub fn layered8() -> BeliefNetwork {
    layered8_seeded(3)
}

pub fn layered8_seeded(seed: u64) -> BeliefNetwork {
    random_structure(
        8,
        vec![
            vec![],
            vec![],
            vec![Var(1)],
            vec![Var(0), Var(1)],
            vec![Var(0)],
            vec![Var(2), Var(3)],
            vec![Var(3), Var(4)],
            vec![Var(5), Var(6)],
        ],
        seed,
    )
}

/// Binary network over the given parent structure with seeded random CPTs.
pub fn random_structure(n: usize, parents: Vec<Vec<Var>>, seed: u64) -> BeliefNetwork {
    let dag = Dag { n, parents };
    let spec = GenSpec::uniform(n, 0, seed);
    gen_uniform_cpts(&dag, &spec).unwrap()
}

/// Random binary network with `edges` edges.
pub fn random_network(n: usize, edges: usize, seed: u64) -> BeliefNetwork {
    crate::generate::generate(&GenSpec::uniform(n, edges, seed)).unwrap()
}
