//! Bucket data structures: partitioning functions into buckets along an
//! ordering, routing recorded functions downward, and the super-bucket
//! grouping used on poly-trees.

use std::collections::BTreeSet;

use crate::error::Result;
use crate::factor::Factor;
use crate::network::BeliefNetwork;
use crate::types::{Evidence, Ordering, Var};

/// Where a factor came from. The CPT tag survives evidence restriction so
/// that the mini-bucket "first is summed" rule can find a bucket variable's
/// own conditional table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FactorOrigin {
    Cpt(Var),
    Recorded,
}

/// Producer index attached to input factors: they are "from above" every
/// bucket.
pub const INPUT_PRODUCER: usize = usize::MAX;

#[derive(Clone, Debug)]
pub struct TracedFactor {
    pub factor: Factor,
    pub origin: FactorOrigin,
    /// Index of the bucket whose processing recorded this function;
    /// [`INPUT_PRODUCER`] for input factors.
    pub producer: usize,
}

/// A bucket owns one variable (or a consecutive group, for super-buckets)
/// and the functions whose latest scope variable lies in that group.
#[derive(Clone, Debug)]
pub struct Bucket {
    /// Variables of this bucket in ordering position order.
    pub vars: Vec<Var>,
    /// Observed values for observed bucket variables.
    pub observed: Vec<(Var, usize)>,
    pub factors: Vec<TracedFactor>,
}

impl Bucket {
    pub fn is_observed(&self) -> bool {
        !self.observed.is_empty()
    }
}

/// The bucket list for one run, plus the pool of scalar constants produced
/// while processing.
#[derive(Clone, Debug)]
pub struct Buckets {
    pub list: Vec<Bucket>,
    var_to_bucket: Vec<usize>,
    /// Scalar constants with the index of the bucket that produced them.
    pub scalars: Vec<(f64, usize)>,
}

impl Buckets {
    /// Index of the bucket owning variable `v`.
    pub fn bucket_of(&self, v: Var) -> usize {
        self.var_to_bucket[v.0]
    }

    /// Product of all scalar constants.
    pub fn constant(&self) -> f64 {
        self.scalars.iter().map(|(v, _)| v).product()
    }

    /// Place a function produced by bucket `producer`: scalars join the
    /// constant pool, everything else goes to the bucket of its latest
    /// scope variable.
    pub fn route(&mut self, factor: Factor, origin: FactorOrigin, producer: usize, d: &Ordering) {
        if factor.is_scalar() {
            self.scalars.push((factor.scalar_value(), producer));
            return;
        }
        let latest = d.latest(factor.scope()).expect("nonempty scope");
        let idx = self.var_to_bucket[latest.0];
        self.list[idx].factors.push(TracedFactor {
            factor,
            origin,
            producer,
        });
    }

    /// Largest recorded-function arity present.
    pub fn max_recorded_arity(&self) -> usize {
        self.list
            .iter()
            .flat_map(|b| b.factors.iter())
            .filter(|tf| tf.origin == FactorOrigin::Recorded)
            .map(|tf| tf.factor.arity())
            .max()
            .unwrap_or(0)
    }
}

/// Partition input factors into one bucket per ordering position. Each
/// factor lands in the bucket of its latest scope variable; scope-less
/// factors accumulate into the constant pool; evidence values are attached
/// to their buckets.
pub fn partition_buckets(
    factors: Vec<(Factor, FactorOrigin)>,
    d: &Ordering,
    e: &Evidence,
) -> Result<Buckets> {
    let n = d.n();
    let mut list: Vec<Bucket> = (0..n)
        .map(|p| {
            let v = d.var_at(p);
            Bucket {
                vars: vec![v],
                observed: e.get(v).map(|val| (v, val)).into_iter().collect(),
                factors: Vec::new(),
            }
        })
        .collect();
    let mut scalars = Vec::new();
    let var_to_bucket: Vec<usize> = (0..n).map(|i| d.position(Var(i))).collect();
    for (factor, origin) in factors {
        if factor.is_scalar() {
            scalars.push((factor.scalar_value(), INPUT_PRODUCER));
            continue;
        }
        let latest = d.latest(factor.scope()).expect("nonempty scope");
        list[var_to_bucket[latest.0]].factors.push(TracedFactor {
            factor,
            origin,
            producer: INPUT_PRODUCER,
        });
    }
    Ok(Buckets {
        list,
        var_to_bucket,
        scalars,
    })
}

/// Bucket list for a network's CPTs.
pub fn network_buckets(bn: &BeliefNetwork, d: &Ordering, e: &Evidence) -> Result<Buckets> {
    let factors = (0..bn.n())
        .map(|i| (bn.cpt(Var(i)).clone(), FactorOrigin::Cpt(Var(i))))
        .collect();
    partition_buckets(factors, d, e)
}

/// Merge maximal runs of consecutive unobserved buckets whose variables all
/// belong to one family, provided all functions reaching the run are
/// subsumed by a single function. The subsumption gate keeps joint
/// elimination of the merged group output-equivalent to exact sequential
/// processing, which is what makes mini-bucket processing with one function
/// per mini-bucket complete on legal poly-tree orderings.
///
/// Runs are decided in processing order (last position first) over a
/// scope-level simulation of the backward pass, so the check sees every
/// function that will reside in the run when it is actually processed.
pub fn super_bucket_grouping(buckets: Buckets, bn: &BeliefNetwork, d: &Ordering) -> Buckets {
    let n = d.n();
    let observed: BTreeSet<Var> = buckets
        .list
        .iter()
        .flat_map(|b| b.observed.iter().map(|(v, _)| *v))
        .collect();

    // Scope-level view of every function, with observed variables projected
    // out (their restrictions happen before any unobserved bucket is
    // processed), keyed by the position that will process it.
    let mut scopes_at: Vec<Vec<BTreeSet<Var>>> = vec![Vec::new(); n];
    for b in &buckets.list {
        for tf in &b.factors {
            let scope: BTreeSet<Var> = tf
                .factor
                .scope()
                .iter()
                .copied()
                .filter(|v| !observed.contains(v))
                .collect();
            if let Some(latest) = scope.iter().max_by_key(|v| d.position(**v)) {
                scopes_at[d.position(*latest)].push(scope.clone());
            }
        }
    }

    let mut families: Vec<BTreeSet<Var>> = Vec::with_capacity(n);
    for i in 0..n {
        families.push(bn.family(Var(i)).into_iter().collect());
    }
    let run_in_one_family = |vars: &BTreeSet<Var>| -> bool {
        families.iter().any(|fam| vars.is_subset(fam))
    };
    let single_nonsubsumed = |scopes: &[&BTreeSet<Var>]| -> bool {
        scopes.len() <= 1
            || scopes
                .iter()
                .any(|big| scopes.iter().all(|s| s.is_subset(big)))
    };

    // Decide runs back-to-front, simulating canonical (one nonsubsumed
    // function per mini-bucket) processing as buckets complete.
    let mut groups_rev: Vec<Vec<usize>> = Vec::new();
    let mut end = n;
    while end > 0 {
        let p = end - 1;
        let mut run_start = p;
        if !buckets.list[p].is_observed() {
            let mut run_vars: BTreeSet<Var> = [d.var_at(p)].into_iter().collect();
            while run_start > 0 {
                let q = run_start - 1;
                if buckets.list[q].is_observed() {
                    break;
                }
                let mut cand_vars = run_vars.clone();
                cand_vars.insert(d.var_at(q));
                let all_scopes: Vec<&BTreeSet<Var>> = (q..=p)
                    .flat_map(|pos| scopes_at[pos].iter())
                    .collect();
                if run_in_one_family(&cand_vars) && single_nonsubsumed(&all_scopes) {
                    run_vars = cand_vars;
                    run_start = q;
                } else {
                    break;
                }
            }
        }
        let run: Vec<usize> = (run_start..end).collect();

        // Simulate processing the run: canonical blocks by subsumption,
        // one output scope per block, routed to its latest position.
        let group_vars: BTreeSet<Var> = run.iter().map(|pos| d.var_at(*pos)).collect();
        let mut pending: Vec<BTreeSet<Var>> = run
            .iter()
            .flat_map(|pos| scopes_at[*pos].iter().cloned())
            .collect();
        // Representatives: scopes not contained in a different (larger or
        // equal, earlier) scope.
        pending.sort_by_key(|s| std::cmp::Reverse(s.len()));
        let mut reps: Vec<BTreeSet<Var>> = Vec::new();
        for s in pending {
            if !reps.iter().any(|r| s.is_subset(r)) {
                reps.push(s);
            }
        }
        for rep in reps {
            let out: BTreeSet<Var> = rep.difference(&group_vars).copied().collect();
            if let Some(latest) = out.iter().max_by_key(|v| d.position(**v)) {
                scopes_at[d.position(*latest)].push(out.clone());
            }
        }
        end = run_start;
        groups_rev.push(run);
    }
    let groups: Vec<Vec<usize>> = groups_rev.into_iter().rev().collect();

    let mut list = Vec::with_capacity(groups.len());
    let mut var_to_bucket = vec![usize::MAX; n];
    for (gi, group) in groups.iter().enumerate() {
        let mut merged = Bucket {
            vars: Vec::new(),
            observed: Vec::new(),
            factors: Vec::new(),
        };
        for &pos in group {
            let b = &buckets.list[pos];
            merged.vars.extend(b.vars.iter().copied());
            merged.observed.extend(b.observed.iter().copied());
            merged.factors.extend(b.factors.iter().cloned());
        }
        for v in &merged.vars {
            var_to_bucket[v.0] = gi;
        }
        list.push(merged);
    }
    Buckets {
        list,
        var_to_bucket,
        scalars: buckets.scalars,
    }
}
