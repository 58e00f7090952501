//! Poly-tree detection and legal orderings.
//!
//! A legal ordering places observed variables last (so they are restricted
//! first), keeps the parents of each family consecutive, and sequences the
//! remaining variables family-by-family so that every bucket reached during
//! processing carries a single nonsubsumed function. Orderings are derived
//! from a junction forest over the (evidence-restricted) family cliques,
//! rooted at sink families; this is the schedule under which mini-bucket
//! processing with one function per mini-bucket reproduces message passing
//! on the tree exactly.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::network::BeliefNetwork;
use crate::types::{Evidence, Ordering, Var};

/// True iff the underlying undirected graph (ignoring arrows) is a forest.
pub fn is_polytree(bn: &BeliefNetwork) -> bool {
    let n = bn.n();
    let mut parent = (0..n).collect::<Vec<usize>>();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..n {
        for p in bn.parents(Var(i)) {
            let a = find(&mut parent, p.0);
            let b = find(&mut parent, i);
            if a == b {
                return false;
            }
            parent[a] = b;
        }
    }
    true
}

#[derive(Debug)]
struct Clique {
    scope: BTreeSet<Var>,
    /// The unobserved variable whose family this clique came from, if any.
    child: Option<Var>,
}

/// A legal ordering for a poly-tree with evidence.
pub fn legal_ordering(bn: &BeliefNetwork, e: &Evidence) -> Result<Ordering> {
    if !is_polytree(bn) {
        return Err(Error::NotPolytree);
    }
    let n = bn.n();
    for (v, _) in e.iter() {
        if v.0 >= n {
            return Err(Error::InvalidEvidence { var: v, value: 0 });
        }
    }

    // Evidence-restricted family cliques.
    let mut cliques: Vec<Clique> = Vec::new();
    for i in 0..n {
        let v = Var(i);
        let mut scope: BTreeSet<Var> = bn
            .parents(v)
            .iter()
            .copied()
            .filter(|p| !e.contains(*p))
            .collect();
        if e.contains(v) {
            if !scope.is_empty() {
                cliques.push(Clique { scope, child: None });
            }
        } else {
            scope.insert(v);
            cliques.push(Clique {
                scope,
                child: Some(v),
            });
        }
    }

    // Keep maximal cliques only; absorb subsumed ones.
    cliques.sort_by_key(|c| std::cmp::Reverse(c.scope.len()));
    let mut kept: Vec<Clique> = Vec::new();
    for c in cliques {
        if let Some(k) = kept.iter_mut().find(|k| c.scope.is_subset(&k.scope)) {
            if k.child.is_none() {
                k.child = c.child;
            }
            continue;
        }
        kept.push(c);
    }

    // Junction forest: for every variable, chain the cliques containing it.
    let m = kept.len();
    let mut comp = (0..m).collect::<Vec<usize>>();
    fn find(comp: &mut [usize], mut x: usize) -> usize {
        while comp[x] != x {
            comp[x] = comp[comp[x]];
            x = comp[x];
        }
        x
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); m];
    for i in 0..n {
        let v = Var(i);
        let holders: Vec<usize> = (0..m).filter(|k| kept[*k].scope.contains(&v)).collect();
        for w in holders.windows(2) {
            let (a, b) = (find(&mut comp, w[0]), find(&mut comp, w[1]));
            if a != b {
                comp[a] = b;
                adj[w[0]].push(w[1]);
                adj[w[1]].push(w[0]);
            }
        }
    }

    // Home clique of each unobserved variable: the first kept clique whose
    // scope contains its restricted family.
    let mut home = vec![usize::MAX; n];
    for (i, slot) in home.iter_mut().enumerate() {
        let v = Var(i);
        if e.contains(v) {
            continue;
        }
        let mut fam: BTreeSet<Var> = bn
            .parents(v)
            .iter()
            .copied()
            .filter(|p| !e.contains(*p))
            .collect();
        fam.insert(v);
        *slot = (0..m)
            .find(|k| fam.is_subset(&kept[*k].scope))
            .expect("family clique is subsumed by a kept clique");
    }

    // Root each component at the home of its lowest-id unobserved sink
    // (an unobserved variable with no unobserved children).
    let mut roots: Vec<(usize, usize)> = Vec::new(); // (component rep, root clique)
    let mut sinks: Vec<Var> = Vec::new();
    for i in 0..n {
        let v = Var(i);
        if e.contains(v) {
            continue;
        }
        let has_unobserved_child = bn.children(v).iter().any(|c| !e.contains(*c));
        if !has_unobserved_child {
            sinks.push(v);
        }
    }
    for s in sinks {
        let k = home[s.0];
        let rep = find(&mut comp, k);
        if !roots.iter().any(|(r, _)| *r == rep) {
            roots.push((rep, k));
        }
    }
    // Components are emitted in ascending order of their smallest variable.
    roots.sort_by_key(|(_, k)| kept[*k].scope.iter().next().copied());

    // DFS per component, claiming each variable at its root-most clique.
    let mut claimed = vec![false; n];
    let mut order: Vec<Var> = Vec::new();
    for (_, root) in roots {
        let mut stack = vec![(root, usize::MAX)];
        let mut visited = vec![false; m];
        while let Some((k, from)) = stack.pop() {
            if visited[k] {
                continue;
            }
            visited[k] = true;
            let mut block: Vec<Var> = kept[k]
                .scope
                .iter()
                .copied()
                .filter(|v| !claimed[v.0])
                .collect();
            // In the root clique the child leads its block; elsewhere the
            // claimed co-parents come first so they sit next to the
            // separator parent already placed above, and the child closes
            // the block.
            if let Some(c) = kept[k].child {
                if let Some(p) = block.iter().position(|v| *v == c) {
                    block.remove(p);
                    if k == root {
                        block.insert(0, c);
                    } else {
                        block.push(c);
                    }
                }
            }
            for v in &block {
                claimed[v.0] = true;
            }
            order.extend(block);
            let mut next: Vec<usize> = adj[k].iter().copied().filter(|x| *x != from).collect();
            next.sort_by_key(|x| kept[*x].scope.iter().next().copied());
            // Reverse so the lowest-keyed child is visited first.
            for x in next.into_iter().rev() {
                stack.push((x, k));
            }
        }
    }

    // Observed variables occupy the final positions, ascending.
    for (v, _) in e.iter() {
        order.push(v);
    }
    debug_assert_eq!(order.len(), n);
    Ordering::new(order, n)
}
