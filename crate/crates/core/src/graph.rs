//! Undirected interaction graphs, the width/induced-width computation and
//! greedy elimination-ordering heuristics.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::types::{Ordering, Var};

/// Simple undirected graph over variables `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UndirectedGraph {
    adj: Vec<BTreeSet<usize>>,
}

impl UndirectedGraph {
    pub fn new(n: usize) -> Self {
        UndirectedGraph {
            adj: vec![BTreeSet::new(); n],
        }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn add_edge(&mut self, a: Var, b: Var) {
        if a != b {
            self.adj[a.0].insert(b.0);
            self.adj[b.0].insert(a.0);
        }
    }

    pub fn has_edge(&self, a: Var, b: Var) -> bool {
        self.adj[a.0].contains(&b.0)
    }

    pub fn neighbors(&self, v: Var) -> impl Iterator<Item = Var> + '_ {
        self.adj[v.0].iter().map(|u| Var(*u))
    }

    pub fn degree(&self, v: Var) -> usize {
        self.adj[v.0].len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|s| s.len()).sum::<usize>() / 2
    }
}

/// Width `w(d)` and induced width `w*(d)` of the ordered graph `(g, d)`.
///
/// Nodes are processed from the last position to the first; when a node is
/// processed, all of its neighbors that precede it in the ordering are
/// connected. The width counts earlier neighbors in the original graph, the
/// induced width counts them in the graph built by the procedure.
pub fn width_and_induced_width(g: &UndirectedGraph, d: &Ordering) -> Result<(usize, usize)> {
    if d.n() != g.n() {
        return Err(Error::InvalidOrdering(format!(
            "ordering over {} nodes, graph has {}",
            d.n(),
            g.n()
        )));
    }
    let mut width = 0usize;
    for v in d.vars() {
        let earlier = g
            .neighbors(*v)
            .filter(|u| d.position(*u) < d.position(*v))
            .count();
        width = width.max(earlier);
    }

    let mut adj = g.adj.clone();
    let mut induced = 0usize;
    for p in (0..d.n()).rev() {
        let v = d.var_at(p);
        let earlier: Vec<usize> = adj[v.0]
            .iter()
            .copied()
            .filter(|u| d.position(Var(*u)) < p)
            .collect();
        induced = induced.max(earlier.len());
        for i in 0..earlier.len() {
            for j in i + 1..earlier.len() {
                adj[earlier[i]].insert(earlier[j]);
                adj[earlier[j]].insert(earlier[i]);
            }
        }
    }
    Ok((width, induced))
}

/// Greedy ordering heuristics. The variable chosen for elimination first is
/// placed in the last position of the produced ordering, matching the
/// top-to-bottom bucket processing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrderingStrategy {
    MinDegree,
    MinFill,
    /// Use the supplied permutation as-is.
    Given(Vec<Var>),
}

impl OrderingStrategy {
    pub fn name(&self) -> &'static str {
        match self {
            OrderingStrategy::MinDegree => "min-degree",
            OrderingStrategy::MinFill => "min-fill",
            OrderingStrategy::Given(_) => "given",
        }
    }
}

/// Number of fill edges elimination of `v` would add.
fn fill_count(adj: &[BTreeSet<usize>], v: usize) -> usize {
    let nbrs: Vec<usize> = adj[v].iter().copied().collect();
    let mut fill = 0;
    for i in 0..nbrs.len() {
        for j in i + 1..nbrs.len() {
            if !adj[nbrs[i]].contains(&nbrs[j]) {
                fill += 1;
            }
        }
    }
    fill
}

pub fn find_ordering(g: &UndirectedGraph, strategy: &OrderingStrategy) -> Result<Ordering> {
    find_ordering_with_front(g, strategy, &[])
}

/// Like [`find_ordering`] but forces `front` into the leading positions of
/// the ordering (they are eliminated last). Needed for MAP, where the
/// hypothesis variables must come first, and for belief queries.
pub fn find_ordering_with_front(
    g: &UndirectedGraph,
    strategy: &OrderingStrategy,
    front: &[Var],
) -> Result<Ordering> {
    if let OrderingStrategy::Given(order) = strategy {
        let d = Ordering::new(order.clone(), g.n())?;
        for (i, v) in front.iter().enumerate() {
            if d.position(*v) >= front.len() {
                return Err(Error::InvalidOrdering(format!(
                    "variable {} must be within the first {} positions (front position {})",
                    v.0,
                    front.len(),
                    i
                )));
            }
        }
        return Ok(d);
    }

    let n = g.n();
    let is_front = {
        let mut m = vec![false; n];
        for v in front {
            m[v.0] = true;
        }
        m
    };
    let mut adj = g.adj.clone();
    let mut remaining: BTreeSet<usize> = (0..n).collect();
    let mut rev = Vec::with_capacity(n);
    while !remaining.is_empty() {
        // Front variables become eligible only once everything else is gone.
        let any_back = remaining.iter().any(|v| !is_front[*v]);
        let mut best: Option<(usize, usize)> = None; // (key, var)
        for &v in &remaining {
            if any_back && is_front[v] {
                continue;
            }
            let key = match strategy {
                OrderingStrategy::MinDegree => adj[v].len(),
                OrderingStrategy::MinFill => fill_count(&adj, v),
                OrderingStrategy::Given(_) => unreachable!(),
            };
            // Ties go to the highest id so that tied variables come out in
            // ascending id order once positions are reversed.
            let better = match best {
                None => true,
                Some((bk, bv)) => key < bk || (key == bk && v > bv),
            };
            if better {
                best = Some((key, v));
            }
        }
        let (_, v) = best.expect("nonempty remaining set");
        // Connect the neighborhood, then remove v.
        let nbrs: Vec<usize> = adj[v].iter().copied().collect();
        for i in 0..nbrs.len() {
            for j in i + 1..nbrs.len() {
                adj[nbrs[i]].insert(nbrs[j]);
                adj[nbrs[j]].insert(nbrs[i]);
            }
        }
        for u in &nbrs {
            adj[*u].remove(&v);
        }
        adj[v].clear();
        remaining.remove(&v);
        rev.push(Var(v));
    }
    rev.reverse();
    Ordering::new(rev, n)
}
