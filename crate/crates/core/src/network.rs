//! Directed belief networks: a DAG plus one conditional probability table
//! per variable.

use crate::error::{Error, Result};
use crate::factor::Factor;
use crate::graph::UndirectedGraph;
use crate::types::{Assignment, Domains, Evidence, Var};

/// A belief network over `n` discrete variables. The CPT of variable `x`
/// has scope `(pa(x) in ascending id order, then x)`, so the child varies
/// fastest and each parent configuration owns a contiguous block of the
/// table.
#[derive(Clone, Debug, PartialEq)]
pub struct BeliefNetwork {
    domains: Domains,
    parents: Vec<Vec<Var>>,
    cpts: Vec<Factor>,
}

/// Absolute tolerance for CPT normalization checks.
pub const CPT_NORM_TOL: f64 = 1e-9;

impl BeliefNetwork {
    pub fn new(domains: Domains, parents: Vec<Vec<Var>>, cpts: Vec<Factor>) -> Result<Self> {
        let n = domains.n();
        if parents.len() != n || cpts.len() != n {
            return Err(Error::InvalidNetwork(format!(
                "expected {n} parent sets and {n} CPTs"
            )));
        }
        for (i, pa) in parents.iter().enumerate() {
            let mut sorted = pa.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != pa.len() || &sorted != pa {
                return Err(Error::InvalidNetwork(format!(
                    "parents of variable {i} must be distinct and ascending"
                )));
            }
            if pa.iter().any(|p| p.0 >= n || p.0 == i) {
                return Err(Error::InvalidNetwork(format!(
                    "invalid parent for variable {i}"
                )));
            }
            let mut scope = pa.clone();
            scope.push(Var(i));
            if cpts[i].scope() != scope.as_slice() {
                return Err(Error::InvalidNetwork(format!(
                    "CPT scope of variable {i} must be its parents followed by itself"
                )));
            }
        }
        let bn = BeliefNetwork {
            domains,
            parents,
            cpts,
        };
        bn.check_acyclic()?;
        bn.check_normalized()?;
        Ok(bn)
    }

    fn check_acyclic(&self) -> Result<()> {
        // Kahn's algorithm over parent -> child edges.
        let n = self.n();
        let mut indeg: Vec<usize> = (0..n).map(|i| self.parents[i].len()).collect();
        let mut queue: Vec<usize> = (0..n).filter(|i| indeg[*i] == 0).collect();
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, pa) in self.parents.iter().enumerate() {
            for p in pa {
                children[p.0].push(i);
            }
        }
        let mut seen = 0;
        while let Some(v) = queue.pop() {
            seen += 1;
            for &c in &children[v] {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    queue.push(c);
                }
            }
        }
        if seen != n {
            return Err(Error::InvalidNetwork("parent graph has a cycle".into()));
        }
        Ok(())
    }

    fn check_normalized(&self) -> Result<()> {
        for (i, cpt) in self.cpts.iter().enumerate() {
            let c = self.domains.card(Var(i));
            for (block, chunk) in cpt.table().chunks(c).enumerate() {
                let sum: f64 = chunk.iter().sum();
                if (sum - 1.0).abs() > CPT_NORM_TOL {
                    return Err(Error::InvalidNetwork(format!(
                        "CPT of variable {i} sums to {sum} for parent configuration {block}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.domains.n()
    }

    pub fn domains(&self) -> &Domains {
        &self.domains
    }

    pub fn parents(&self, v: Var) -> &[Var] {
        &self.parents[v.0]
    }

    pub fn cpt(&self, v: Var) -> &Factor {
        &self.cpts[v.0]
    }

    pub fn cpts(&self) -> &[Factor] {
        &self.cpts
    }

    /// Children of `v` in ascending id order.
    pub fn children(&self, v: Var) -> Vec<Var> {
        (0..self.n())
            .map(Var)
            .filter(|c| self.parents[c.0].contains(&v))
            .collect()
    }

    /// The family of `v`: the variable together with its parents, ascending.
    pub fn family(&self, v: Var) -> Vec<Var> {
        let mut fam = self.parents[v.0].clone();
        fam.push(v);
        fam.sort_unstable();
        fam
    }

    /// Largest family size (CPT scope size) in the network.
    pub fn max_family_size(&self) -> usize {
        (0..self.n())
            .map(|i| self.parents[i].len() + 1)
            .max()
            .unwrap_or(0)
    }

    /// The moral graph: every parent-child pair connected and the parents of
    /// each variable pairwise married, arrows dropped.
    pub fn moral_graph(&self) -> UndirectedGraph {
        let mut g = UndirectedGraph::new(self.n());
        for i in 0..self.n() {
            let pa = &self.parents[i];
            for p in pa {
                g.add_edge(*p, Var(i));
            }
            for a in 0..pa.len() {
                for b in a + 1..pa.len() {
                    g.add_edge(pa[a], pa[b]);
                }
            }
        }
        g
    }

    /// Product of all CPT entries at `x`, or 0 when `x` contradicts the
    /// evidence.
    pub fn joint_probability(&self, x: &Assignment, e: &Evidence) -> f64 {
        if !x.consistent_with(e) {
            return 0.0;
        }
        let mut p = 1.0;
        for cpt in &self.cpts {
            p *= cpt.value_at(x.values(), &self.domains);
        }
        p
    }

    /// A topological order (parents before children), lowest id first among
    /// the ready variables. Useful for forward sampling.
    pub fn topological_order(&self) -> Vec<Var> {
        let n = self.n();
        let mut indeg: Vec<usize> = (0..n).map(|i| self.parents[i].len()).collect();
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, pa) in self.parents.iter().enumerate() {
            for p in pa {
                children[p.0].push(i);
            }
        }
        let mut ready: std::collections::BTreeSet<usize> =
            (0..n).filter(|i| indeg[*i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(&v) = ready.iter().next() {
            ready.remove(&v);
            order.push(Var(v));
            for &c in &children[v] {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    ready.insert(c);
                }
            }
        }
        order
    }
}
