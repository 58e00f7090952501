//! The (i,m)-partitioning machinery and the bounded approximation
//! algorithms: mini-bucket MPE with upper/lower certificates, guarded
//! belief bounds (upper, lower and mean modes) and mini-bucket MAP.
//!
//! A bucket's functions are first grouped canonically: a function whose
//! scope is contained in another function's scope rides along with its
//! earliest subsumer. The canonical mini-buckets are then merged either in
//! groups of `m` successive blocks, or greedily while the merged block's
//! recorded arity stays within `i`. Each mini-bucket is processed
//! independently, which replaces one big recorded function by several
//! smaller ones and turns the result into a certified bound.

use std::time::{Duration, Instant};

use crate::buckets::{network_buckets, super_bucket_grouping, Bucket, Buckets, FactorOrigin};
use crate::elim::{
    bounded_product, check_hypothesis_first, forward_assignment, process_observed_bucket,
    query_joint, Limits,
};
use crate::error::{Error, Result};
use crate::factor::{eliminate_all, ElimOp, Factor};
use crate::network::BeliefNetwork;
use crate::types::{Assignment, Domains, Evidence, Ordering, Var};

/// A partitioning of a bucket's factor indices into mini-buckets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partitioning {
    pub blocks: Vec<Vec<usize>>,
}

impl Partitioning {
    /// Validate that the blocks disjointly cover `0..ground`.
    pub fn validate(&self, ground: usize) -> Result<()> {
        let mut seen = vec![false; ground];
        for block in &self.blocks {
            for &i in block {
                if i >= ground || seen[i] {
                    return Err(Error::InfeasibleConfig(format!(
                        "partitioning does not disjointly cover 0..{ground}"
                    )));
                }
                seen[i] = true;
            }
        }
        if seen.iter().all(|s| *s) {
            Ok(())
        } else {
            Err(Error::InfeasibleConfig(format!(
                "partitioning does not cover 0..{ground}"
            )))
        }
    }
}

/// True iff every block of `qa` is contained in some block of `qb`.
pub fn is_refinement(qa: &Partitioning, qb: &Partitioning) -> Result<bool> {
    let ground = qa.blocks.iter().flatten().count();
    qa.validate(ground)?;
    qb.validate(ground).map_err(|_| {
        Error::InfeasibleConfig("partitionings are over different ground sets".into())
    })?;
    Ok(qa.blocks.iter().all(|a| {
        qb.blocks
            .iter()
            .any(|b| a.iter().all(|x| b.contains(x)))
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PartitionStrategy {
    /// Merge canonical mini-buckets greedily under the variable budget `i`.
    ByI,
    /// Combine each `m` successive canonical mini-buckets.
    ByM,
}

/// Parameters of the approximation. `i_bound` caps the recorded arity of a
/// merged mini-bucket (so the block may mention `i` variables besides the
/// bucket's own); `m_bound` is the number of successive canonical blocks
/// combined under the by-m strategy. A canonical block that exceeds the
/// budget on its own is kept whole: single functions are never split.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MiniBucketConfig {
    pub i_bound: usize,
    pub m_bound: usize,
    pub strategy: PartitionStrategy,
    pub super_buckets: bool,
}

impl MiniBucketConfig {
    pub fn by_i(i_bound: usize) -> Result<Self> {
        if i_bound < 1 {
            return Err(Error::InfeasibleConfig("i must be at least 1".into()));
        }
        Ok(MiniBucketConfig {
            i_bound,
            m_bound: usize::MAX,
            strategy: PartitionStrategy::ByI,
            super_buckets: false,
        })
    }

    pub fn by_m(m_bound: usize) -> Result<Self> {
        if m_bound < 1 {
            return Err(Error::InfeasibleConfig("m must be at least 1".into()));
        }
        Ok(MiniBucketConfig {
            i_bound: usize::MAX,
            m_bound,
            strategy: PartitionStrategy::ByM,
            super_buckets: false,
        })
    }

    /// Unbounded configuration: full buckets, identical to exact
    /// elimination.
    pub fn exact() -> Self {
        MiniBucketConfig {
            i_bound: usize::MAX,
            m_bound: usize::MAX,
            strategy: PartitionStrategy::ByM,
            super_buckets: false,
        }
    }

    pub fn with_super_buckets(mut self) -> Self {
        self.super_buckets = true;
        self
    }
}

/// Canonical partitioning: subsumed functions ride with their earliest
/// subsumer; nonsubsumed functions start singleton mini-buckets, in bucket
/// order.
pub fn canonical_partition(bucket: &Bucket) -> Partitioning {
    let scopes: Vec<Vec<Var>> = bucket
        .factors
        .iter()
        .map(|tf| {
            let mut s = tf.factor.scope().to_vec();
            s.sort_unstable();
            s
        })
        .collect();
    let subset = |a: &[Var], b: &[Var]| a.iter().all(|x| b.binary_search(x).is_ok());
    let k = scopes.len();
    // subsumer[j]: earliest t with scope(j) strictly inside scope(t), or an
    // earlier t with the identical scope.
    let mut subsumer: Vec<Option<usize>> = vec![None; k];
    for j in 0..k {
        for t in 0..k {
            if t == j {
                continue;
            }
            let strict = scopes[j].len() < scopes[t].len() && subset(&scopes[j], &scopes[t]);
            let equal_earlier = t < j && scopes[j] == scopes[t];
            if strict || equal_earlier {
                subsumer[j] = Some(t);
                break;
            }
        }
    }
    let mut rep = vec![0usize; k];
    for (j, slot) in rep.iter_mut().enumerate() {
        let mut r = j;
        while let Some(s) = subsumer[r] {
            r = s;
        }
        *slot = r;
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut block_of_rep: Vec<Option<usize>> = vec![None; k];
    for (j, r) in rep.iter().copied().enumerate() {
        match block_of_rep[r] {
            Some(b) => blocks[b].push(j),
            None => {
                block_of_rep[r] = Some(blocks.len());
                blocks.push(vec![j]);
            }
        }
    }
    Partitioning { blocks }
}

/// Number of variables a block mentions besides the bucket's own.
fn recorded_arity(block: &[usize], bucket: &Bucket) -> usize {
    let mut vars: Vec<Var> = block
        .iter()
        .flat_map(|&i| bucket.factors[i].factor.scope().iter().copied())
        .collect();
    vars.sort_unstable();
    vars.dedup();
    vars.iter().filter(|v| !bucket.vars.contains(v)).count()
}

/// Refine or coarsen the canonical partitioning according to the
/// configuration. By-m combines each `m` successive canonical blocks;
/// by-i walks the canonical blocks and merges each into the first earlier
/// block whose merged recorded arity stays within `i`.
pub fn im_partition(
    canonical: &Partitioning,
    cfg: &MiniBucketConfig,
    bucket: &Bucket,
) -> Result<Partitioning> {
    if cfg.i_bound < 1 || cfg.m_bound < 1 {
        return Err(Error::InfeasibleConfig("i and m must be at least 1".into()));
    }
    let blocks = match cfg.strategy {
        PartitionStrategy::ByM => {
            let mut out: Vec<Vec<usize>> = Vec::new();
            for chunk in canonical.blocks.chunks(cfg.m_bound.min(canonical.blocks.len().max(1))) {
                out.push(chunk.iter().flatten().copied().collect());
            }
            out
        }
        PartitionStrategy::ByI => {
            let mut out: Vec<Vec<usize>> = Vec::new();
            for block in &canonical.blocks {
                let mut placed = false;
                for existing in out.iter_mut() {
                    let mut merged = existing.clone();
                    merged.extend(block.iter().copied());
                    if recorded_arity(&merged, bucket) <= cfg.i_bound {
                        *existing = merged;
                        placed = true;
                        break;
                    }
                }
                if !placed {
                    out.push(block.clone());
                }
            }
            out
        }
    };
    Ok(Partitioning { blocks })
}

/// Per-bucket statistics produced while processing.
struct BucketStats {
    mini_buckets: usize,
    max_recorded_arity: usize,
}

/// Process one bucket by maximization: multiply each mini-bucket, eliminate
/// the bucket variables by max, and route the outputs downward.
pub fn process_bucket_max(
    buckets: &mut Buckets,
    idx: usize,
    q: &Partitioning,
    d: &Ordering,
    domains: &Domains,
    limits: &Limits,
) -> Result<Vec<Factor>> {
    process_bucket(buckets, idx, q, d, domains, limits, |_| ElimOp::Max).map(|(fs, _)| fs)
}

/// Mode of the guarded-sum processing used for belief bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BelMode {
    Upper,
    Lower,
    Mean,
}

impl BelMode {
    fn guard_op(self) -> ElimOp {
        match self {
            BelMode::Upper => ElimOp::Max,
            BelMode::Lower => ElimOp::Min,
            BelMode::Mean => ElimOp::Mean,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            BelMode::Upper => "upper",
            BelMode::Lower => "lower",
            BelMode::Mean => "mean",
        }
    }
}

/// Process one bucket for belief updating: one designated mini-bucket is
/// eliminated by summation, the rest by the mode's guard operator. The
/// summed block is the one holding the bucket variable's own conditional
/// table when present, else the first in scan order.
pub fn process_bucket_sum_guarded(
    buckets: &mut Buckets,
    idx: usize,
    q: &Partitioning,
    mode: BelMode,
    d: &Ordering,
    domains: &Domains,
    limits: &Limits,
) -> Result<Vec<Factor>> {
    let summed = summed_block(&buckets.list[idx], q);
    process_bucket(buckets, idx, q, d, domains, limits, |block_idx| {
        if block_idx == summed {
            ElimOp::Sum
        } else {
            mode.guard_op()
        }
    })
    .map(|(fs, _)| fs)
}

fn summed_block(bucket: &Bucket, q: &Partitioning) -> usize {
    q.blocks
        .iter()
        .position(|block| {
            block.iter().any(|&i| {
                matches!(bucket.factors[i].origin, FactorOrigin::Cpt(v) if bucket.vars.contains(&v))
            })
        })
        .unwrap_or(0)
}

fn process_bucket(
    buckets: &mut Buckets,
    idx: usize,
    q: &Partitioning,
    d: &Ordering,
    domains: &Domains,
    limits: &Limits,
    op_for: impl Fn(usize) -> ElimOp,
) -> Result<(Vec<Factor>, BucketStats)> {
    let vars = buckets.list[idx].vars.clone();
    let mut outputs = Vec::with_capacity(q.blocks.len());
    let mut stats = BucketStats {
        mini_buckets: q.blocks.len(),
        max_recorded_arity: 0,
    };
    for (bi, block) in q.blocks.iter().enumerate() {
        let refs: Vec<&Factor> = block
            .iter()
            .map(|&i| &buckets.list[idx].factors[i].factor)
            .collect();
        let product = bounded_product(&refs, domains, limits)?;
        let h = eliminate_all(&product, &vars, op_for(bi), domains)?;
        stats.max_recorded_arity = stats.max_recorded_arity.max(h.arity());
        outputs.push(h.clone());
        buckets.route(h, FactorOrigin::Recorded, idx, d);
    }
    Ok((outputs, stats))
}

/// Upper/lower bound certificate for MPE, with processing diagnostics.
#[derive(Clone, Debug)]
pub struct BoundsResult {
    pub upper: f64,
    pub lower: f64,
    pub lower_tuple: Assignment,
    pub evidence_impossible: bool,
    /// Max mini-buckets that occurred in any bucket.
    pub mb: usize,
    /// Max input family size.
    pub f_i: usize,
    /// Max recorded-function arity.
    pub f_o: usize,
    pub elapsed: Duration,
    /// Final bucket residents, consumed by the search heuristic.
    pub buckets: Buckets,
}

/// Mini-bucket MPE: an upper bound from the certified elimination pass and
/// a lower bound from the probability of the greedily generated tuple.
pub fn approx_mpe(
    bn: &BeliefNetwork,
    e: &Evidence,
    d: &Ordering,
    cfg: &MiniBucketConfig,
    limits: &Limits,
) -> Result<BoundsResult> {
    let start = Instant::now();
    let domains = bn.domains();
    let mut buckets = network_buckets(bn, d, e)?;
    if cfg.super_buckets {
        buckets = super_bucket_grouping(buckets, bn, d);
    }
    let mut mb = 1usize;
    let mut f_o = 0usize;
    for idx in (0..buckets.list.len()).rev() {
        if buckets.list[idx].is_observed() {
            process_observed_bucket(&mut buckets, idx, d, domains)?;
            continue;
        }
        if buckets.list[idx].factors.is_empty() {
            continue;
        }
        let canonical = canonical_partition(&buckets.list[idx]);
        let q = im_partition(&canonical, cfg, &buckets.list[idx])?;
        let (_, stats) =
            process_bucket(&mut buckets, idx, &q, d, domains, limits, |_| ElimOp::Max)?;
        mb = mb.max(stats.mini_buckets);
        f_o = f_o.max(stats.max_recorded_arity);
    }
    let upper = buckets.constant();
    let lower_tuple = forward_assignment(&buckets, domains);
    let lower = bn.joint_probability(&lower_tuple, e);
    Ok(BoundsResult {
        upper,
        lower,
        lower_tuple,
        evidence_impossible: upper == 0.0,
        mb,
        f_i: bn.max_family_size(),
        f_o,
        elapsed: start.elapsed(),
        buckets,
    })
}

/// Belief bound over the query variable.
#[derive(Clone, Debug)]
pub struct BelBounds {
    /// Bound (or mean estimate) on the joint P(query, e), pointwise.
    pub bound: Factor,
    /// Bound (or estimate) on P(e): the sum of `bound` over the query.
    pub p_evidence_bound: f64,
    pub mb: usize,
    pub f_o: usize,
    pub elapsed: Duration,
    /// Every recorded function with the index of the bucket that produced
    /// it, in processing order. Mode-monotonicity tests compare these
    /// across runs.
    pub recorded: Vec<(usize, Factor)>,
}

/// Mini-bucket belief updating. Upper mode over-bounds the exact joint
/// pointwise, lower mode under-bounds it; mean mode is an uncertified
/// estimate.
pub fn approx_bel(
    bn: &BeliefNetwork,
    e: &Evidence,
    d: &Ordering,
    query: Var,
    cfg: &MiniBucketConfig,
    mode: BelMode,
    limits: &Limits,
) -> Result<BelBounds> {
    if d.var_at(0) != query {
        return Err(Error::QueryOrdering);
    }
    let start = Instant::now();
    let domains = bn.domains();
    let mut buckets = network_buckets(bn, d, e)?;
    let mut mb = 1usize;
    let mut f_o = 0usize;
    let mut recorded = Vec::new();
    for idx in (1..buckets.list.len()).rev() {
        if buckets.list[idx].is_observed() {
            process_observed_bucket(&mut buckets, idx, d, domains)?;
            continue;
        }
        if buckets.list[idx].factors.is_empty() {
            continue;
        }
        let canonical = canonical_partition(&buckets.list[idx]);
        let q = im_partition(&canonical, cfg, &buckets.list[idx])?;
        let summed = summed_block(&buckets.list[idx], &q);
        let (outputs, stats) =
            process_bucket(&mut buckets, idx, &q, d, domains, limits, |bi| {
                if bi == summed {
                    ElimOp::Sum
                } else {
                    mode.guard_op()
                }
            })?;
        for h in outputs {
            recorded.push((idx, h));
        }
        mb = mb.max(stats.mini_buckets);
        f_o = f_o.max(stats.max_recorded_arity);
    }
    let bound = query_joint(&buckets, query, e, domains, limits)?;
    let p_evidence_bound = bound.table().iter().sum();
    Ok(BelBounds {
        bound,
        p_evidence_bound,
        mb,
        f_o,
        elapsed: start.elapsed(),
        recorded,
    })
}

/// Mini-bucket MAP bounds.
#[derive(Clone, Debug)]
pub struct MapBounds {
    /// Upper bound on the unnormalized MAP value.
    pub upper: f64,
    /// Hypothesis tuple from the forward phase over hypothesis buckets.
    pub hyp_assignment: Vec<(Var, usize)>,
    /// Exact score of the hypothesis tuple (summing out the rest exactly),
    /// when the state space permits it.
    pub lower: Option<f64>,
    pub evidence_impossible: bool,
    pub mb: usize,
    pub f_i: usize,
    pub f_o: usize,
    pub elapsed: Duration,
    /// Final bucket residents.
    pub buckets: Buckets,
}

/// Mini-bucket MAP: summation buckets use the guarded upper-bound rule,
/// hypothesis buckets the max rule; the result upper-bounds the MAP value.
pub fn approx_map(
    bn: &BeliefNetwork,
    e: &Evidence,
    d: &Ordering,
    hyp: &[Var],
    cfg: &MiniBucketConfig,
    limits: &Limits,
) -> Result<MapBounds> {
    check_hypothesis_first(d, hyp)?;
    let start = Instant::now();
    let domains = bn.domains();
    let hyp_set = {
        let mut m = vec![false; d.n()];
        for v in hyp {
            m[v.0] = true;
        }
        m
    };
    let mut buckets = network_buckets(bn, d, e)?;
    if cfg.super_buckets {
        buckets = super_bucket_grouping(buckets, bn, d);
    }
    let mut mb = 1usize;
    let mut f_o = 0usize;
    for idx in (0..buckets.list.len()).rev() {
        if buckets.list[idx].is_observed() {
            process_observed_bucket(&mut buckets, idx, d, domains)?;
            continue;
        }
        if buckets.list[idx].factors.is_empty() {
            continue;
        }
        let canonical = canonical_partition(&buckets.list[idx]);
        let q = im_partition(&canonical, cfg, &buckets.list[idx])?;
        let is_hyp = buckets.list[idx].vars.iter().any(|v| hyp_set[v.0]);
        let summed = summed_block(&buckets.list[idx], &q);
        let (_, stats) = process_bucket(&mut buckets, idx, &q, d, domains, limits, |bi| {
            if is_hyp || bi != summed {
                ElimOp::Max
            } else {
                ElimOp::Sum
            }
        })?;
        mb = mb.max(stats.mini_buckets);
        f_o = f_o.max(stats.max_recorded_arity);
    }
    let upper = buckets.constant();
    let full = forward_assignment(&buckets, domains);
    let hyp_assignment: Vec<(Var, usize)> = (0..hyp.len())
        .map(|p| {
            let v = d.var_at(p);
            (v, full.value(v))
        })
        .collect();
    let lower = exact_hyp_score(bn, e, d, &hyp_assignment, limits).ok();
    Ok(MapBounds {
        upper,
        hyp_assignment,
        lower,
        evidence_impossible: upper == 0.0,
        mb,
        f_i: bn.max_family_size(),
        f_o,
        elapsed: start.elapsed(),
        buckets,
    })
}

/// Exact unnormalized score of a hypothesis tuple: fix it as additional
/// evidence and sum everything else out.
fn exact_hyp_score(
    bn: &BeliefNetwork,
    e: &Evidence,
    d: &Ordering,
    hyp_assignment: &[(Var, usize)],
    limits: &Limits,
) -> Result<f64> {
    let mut pairs: Vec<(Var, usize)> = e.iter().collect();
    for (v, val) in hyp_assignment {
        if let Some(obs) = e.get(*v) {
            if obs != *val {
                return Ok(0.0);
            }
            continue;
        }
        pairs.push((*v, *val));
    }
    let fixed = Evidence::new(&pairs, bn.domains())?;
    let buckets = network_buckets(bn, d, &fixed)?;
    let mut buckets = buckets;
    let domains = bn.domains();
    for idx in (0..buckets.list.len()).rev() {
        if buckets.list[idx].is_observed() {
            process_observed_bucket(&mut buckets, idx, d, domains)?;
            continue;
        }
        if buckets.list[idx].factors.is_empty() {
            continue;
        }
        let refs: Vec<&Factor> = buckets.list[idx].factors.iter().map(|tf| &tf.factor).collect();
        let product = bounded_product(&refs, domains, limits)?;
        let vars = buckets.list[idx].vars.clone();
        let h = eliminate_all(&product, &vars, ElimOp::Sum, domains)?;
        buckets.route(h, FactorOrigin::Recorded, idx, d);
    }
    Ok(buckets.constant())
}

/// Accuracy ratios between the exact value and the two bounds. A zero
/// denominator flags the ratio as infinite rather than raising an error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ratios {
    /// exact / lower.
    pub ml: Option<f64>,
    /// upper / exact.
    pub um: Option<f64>,
    /// upper / lower.
    pub ul: f64,
}

pub fn bound_ratios(exact: Option<f64>, upper: f64, lower: f64) -> Ratios {
    let div = |a: f64, b: f64| if b > 0.0 { a / b } else { f64::INFINITY };
    Ratios {
        ml: exact.map(|m| div(m, lower)),
        um: exact.map(|m| div(upper, m)),
        ul: div(upper, lower),
    }
}
