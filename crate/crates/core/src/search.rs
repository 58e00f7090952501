//! Best-first search for exact MPE, guided by the functions a mini-bucket
//! pass leaves in the buckets.
//!
//! A node fixes the first `k` ordering positions. Its evaluation combines
//! the fully instantiated input functions of the assigned buckets with the
//! recorded functions and constants produced by the still-unassigned
//! buckets; because every recorded function over-estimates the exact one,
//! the evaluation upper-bounds the best completion, and it is consistent
//! along paths, so the popped values never increase and the first complete
//! assignment popped is optimal.

use std::cmp::Ordering as CmpOrdering;
use std::collections::BinaryHeap;

use crate::buckets::Buckets;
use crate::elim::Limits;
use crate::error::{Error, Result};
use crate::minibucket::{approx_mpe, BoundsResult, MiniBucketConfig};
use crate::network::BeliefNetwork;
use crate::types::{Assignment, Domains, Evidence, Ordering};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub expanded: u64,
    pub generated: u64,
    pub peak_frontier: usize,
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub value: f64,
    pub assignment: Assignment,
    pub evidence_impossible: bool,
    pub stats: SearchStats,
    /// Evaluation values of expanded nodes, in pop order.
    pub popped_f: Vec<f64>,
}

/// Evaluation of a prefix covering ordering positions `0..depth`: the
/// product of every function residing in an assigned bucket that is either
/// an input function or was recorded by a bucket at or above the frontier,
/// times the constants recorded at or above the frontier. A prefix that
/// contradicts the evidence evaluates to 0.
pub fn heuristic_value(
    trace: &Buckets,
    d: &Ordering,
    depth: usize,
    values: &[usize],
    e: &Evidence,
    domains: &Domains,
) -> f64 {
    for p in 0..depth {
        let v = d.var_at(p);
        if let Some(obs) = e.get(v) {
            if values[v.0] != obs {
                return 0.0;
            }
        }
    }
    let mut f = 1.0;
    for (value, producer) in &trace.scalars {
        if *producer >= depth {
            f *= value;
        }
    }
    for bucket in trace.list.iter().take(depth) {
        for tf in &bucket.factors {
            if tf.producer >= depth {
                f *= tf.factor.value_at(values, domains);
            }
        }
    }
    f
}

struct Node {
    f: f64,
    depth: usize,
    values: Vec<usize>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == CmpOrdering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<CmpOrdering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // Max-heap order: highest f, then deepest, then lexicographically
    // smallest value prefix.
    fn cmp(&self, other: &Self) -> CmpOrdering {
        self.f
            .total_cmp(&other.f)
            .then(self.depth.cmp(&other.depth))
            .then_with(|| other.values.cmp(&self.values))
    }
}

/// Best-first MPE search using the mini-bucket functions recorded along
/// `d` as the heuristic. Returns the exact MPE value.
pub fn best_first_mpe(
    bn: &BeliefNetwork,
    e: &Evidence,
    d: &Ordering,
    cfg: &MiniBucketConfig,
    limits: &Limits,
) -> Result<SearchOutcome> {
    // The heuristic pass works on plain per-variable buckets so that bucket
    // indices coincide with ordering positions.
    let mut plain = *cfg;
    plain.super_buckets = false;
    let bounds: BoundsResult = approx_mpe(bn, e, d, &plain, limits)?;
    let domains = bn.domains();
    let n = bn.n();

    if bounds.upper == 0.0 {
        return Ok(SearchOutcome {
            value: 0.0,
            assignment: bounds.lower_tuple,
            evidence_impossible: true,
            stats: SearchStats::default(),
            popped_f: Vec::new(),
        });
    }

    let mut stats = SearchStats::default();
    let mut popped_f = Vec::new();
    let mut frontier = BinaryHeap::new();
    frontier.push(Node {
        f: bounds.upper,
        depth: 0,
        values: vec![0; n],
    });
    stats.generated = 1;
    stats.peak_frontier = 1;

    while let Some(node) = frontier.pop() {
        popped_f.push(node.f);
        if node.depth == n {
            return Ok(SearchOutcome {
                value: node.f,
                assignment: Assignment(node.values),
                evidence_impossible: false,
                stats,
                popped_f,
            });
        }
        stats.expanded += 1;
        let v = d.var_at(node.depth);
        let candidates: Vec<usize> = match e.get(v) {
            Some(obs) => vec![obs],
            None => (0..domains.card(v)).collect(),
        };
        for val in candidates {
            let mut values = node.values.clone();
            values[v.0] = val;
            let f = heuristic_value(&bounds.buckets, d, node.depth + 1, &values, e, domains);
            if f > 0.0 {
                frontier.push(Node {
                    f,
                    depth: node.depth + 1,
                    values,
                });
                stats.generated += 1;
            }
        }
        stats.peak_frontier = stats.peak_frontier.max(frontier.len());
        if frontier.len() > limits.max_frontier_nodes {
            return Err(Error::FrontierLimit {
                cap: limits.max_frontier_nodes,
                lower_bound: bounds.lower,
            });
        }
    }

    // Every completion has probability zero; report the greedy tuple.
    Ok(SearchOutcome {
        value: 0.0,
        assignment: bounds.lower_tuple,
        evidence_impossible: true,
        stats,
        popped_f,
    })
}
