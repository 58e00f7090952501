//! Exact bucket elimination for the three probabilistic tasks: most
//! probable explanation, belief updating and maximum a posteriori
//! hypothesis.
//!
//! Buckets are processed from the last ordering position to the first.
//! An observed bucket restricts its functions and redistributes them; any
//! other bucket multiplies its functions, eliminates its variable(s) and
//! routes the result to the bucket of the latest remaining scope variable.
//! The forward phase then assigns values in ordering positions, maximizing
//! the product of the functions residing in each bucket.

use std::time::{Duration, Instant};

use crate::buckets::{network_buckets, Bucket, Buckets, FactorOrigin};
use crate::error::{Error, Result};
use crate::factor::{eliminate_all, multiply, restrict, ElimOp, Factor};
use crate::network::BeliefNetwork;
use crate::types::{Assignment, Domains, Evidence, Ordering, Var};

/// Resource caps. `max_table_cells` bounds any table materialized while a
/// bucket is processed; exceeding it aborts with a resource error rather
/// than truncating. `BNET_MEM_CELLS` overrides it in the CLI.
#[derive(Clone, Copy, Debug)]
pub struct Limits {
    pub max_table_cells: usize,
    pub max_frontier_nodes: usize,
}

pub const DEFAULT_MAX_TABLE_CELLS: usize = 1 << 26;

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_table_cells: DEFAULT_MAX_TABLE_CELLS,
            max_frontier_nodes: 1 << 22,
        }
    }
}

/// What a finished run leaves behind: the final bucket residents (inputs
/// plus every recorded function), the scalar pool, and diagnostics.
#[derive(Clone, Debug)]
pub struct Trace {
    pub buckets: Buckets,
    /// Max input family size.
    pub f_i: usize,
    /// Max recorded-function arity.
    pub f_o: usize,
    /// Max mini-buckets in any bucket (1 for the exact engines).
    pub mb: usize,
    pub elapsed: Duration,
}

#[derive(Clone, Debug)]
pub struct MpeResult {
    pub value: f64,
    pub assignment: Assignment,
    /// Set when no assignment consistent with the evidence has positive
    /// probability; the value is 0 and the algebra is still well defined.
    pub evidence_impossible: bool,
    pub trace: Trace,
}

#[derive(Clone, Debug)]
pub struct BelResult {
    /// Unnormalized joint P(query, e) over the query variable.
    pub joint: Factor,
    pub p_evidence: f64,
    pub evidence_impossible: bool,
    pub trace: Trace,
}

impl BelResult {
    /// Posterior belief P(query | e): the joint normalized by the evidence
    /// probability. None when the evidence is impossible.
    pub fn posterior(&self, domains: &Domains) -> Option<Factor> {
        if self.p_evidence <= 0.0 {
            return None;
        }
        let table = self
            .joint
            .table()
            .iter()
            .map(|x| x / self.p_evidence)
            .collect();
        Some(
            Factor::new(self.joint.scope().to_vec(), table, domains)
                .expect("normalizing keeps the factor valid"),
        )
    }
}

#[derive(Clone, Debug)]
pub struct MapResult {
    /// Unnormalized max over hypothesis assignments of the summed product.
    pub value: f64,
    /// Hypothesis assignment in ordering position order.
    pub hyp_assignment: Vec<(Var, usize)>,
    pub p_evidence: f64,
    pub evidence_impossible: bool,
    pub trace: Trace,
}

impl MapResult {
    /// The normalized MAP probability, value / P(e). None when the
    /// evidence is impossible.
    pub fn normalized(&self) -> Option<f64> {
        if self.p_evidence > 0.0 {
            Some(self.value / self.p_evidence)
        } else {
            None
        }
    }
}

/// Multiply a bucket's functions under the resource cap.
pub(crate) fn bounded_product(
    factors: &[&Factor],
    domains: &Domains,
    limits: &Limits,
) -> Result<Factor> {
    let mut scope: Vec<Var> = factors
        .iter()
        .flat_map(|f| f.scope().iter().copied())
        .collect();
    scope.sort_unstable();
    scope.dedup();
    let cells = domains.table_len(&scope)?;
    if cells > limits.max_table_cells {
        return Err(Error::ResourceLimit {
            what: "bucket product table",
            needed: cells,
            cap: limits.max_table_cells,
        });
    }
    multiply(factors, domains)
}

/// Restrict every function of an observed bucket and put the results back
/// into their appropriate buckets.
pub(crate) fn process_observed_bucket(
    buckets: &mut Buckets,
    idx: usize,
    d: &Ordering,
    domains: &Domains,
) -> Result<()> {
    let observed = buckets.list[idx].observed.clone();
    let factors = std::mem::take(&mut buckets.list[idx].factors);
    // Residents are retained for the forward phase and search heuristics.
    buckets.list[idx].factors = factors.clone();
    for tf in factors {
        let mut f = tf.factor;
        for (v, val) in &observed {
            if f.scope().contains(v) {
                f = restrict(&f, *v, *val, domains)?;
            }
        }
        buckets.route(f, tf.origin, idx, d);
    }
    Ok(())
}

/// Operator selection per bucket for the exact engines.
enum BucketOp {
    Max,
    Sum,
}

fn process_exact(
    mut buckets: Buckets,
    bn: &BeliefNetwork,
    d: &Ordering,
    limits: &Limits,
    op_for: impl Fn(&Bucket) -> BucketOp,
    skip_first: bool,
) -> Result<(Buckets, usize)> {
    let domains = bn.domains();
    let mut f_o = 0usize;
    let first = usize::from(skip_first);
    for idx in (first..buckets.list.len()).rev() {
        if buckets.list[idx].is_observed() {
            process_observed_bucket(&mut buckets, idx, d, domains)?;
            continue;
        }
        if buckets.list[idx].factors.is_empty() {
            continue;
        }
        let op = match op_for(&buckets.list[idx]) {
            BucketOp::Max => ElimOp::Max,
            BucketOp::Sum => ElimOp::Sum,
        };
        let refs: Vec<&Factor> = buckets.list[idx].factors.iter().map(|tf| &tf.factor).collect();
        let product = bounded_product(&refs, domains, limits)?;
        let vars = buckets.list[idx].vars.clone();
        let h = eliminate_all(&product, &vars, op, domains)?;
        f_o = f_o.max(h.arity());
        buckets.route(h, FactorOrigin::Recorded, idx, d);
    }
    Ok((buckets, f_o))
}

/// Greedy forward phase: walk the buckets in ordering position order and
/// pick the value combination maximizing the product of each bucket's
/// resident functions. Ties break toward the lowest value index.
pub(crate) fn forward_assignment(
    buckets: &Buckets,
    domains: &Domains,
) -> Assignment {
    let n = domains.n();
    let mut values = vec![0usize; n];
    for bucket in &buckets.list {
        let mut free: Vec<Var> = Vec::new();
        for v in &bucket.vars {
            if let Some((_, val)) = bucket.observed.iter().find(|(o, _)| o == v) {
                values[v.0] = *val;
            } else {
                free.push(*v);
            }
        }
        if free.is_empty() {
            continue;
        }
        let cards: Vec<usize> = free.iter().map(|v| domains.card(*v)).collect();
        let total: usize = cards.iter().product();
        let mut best = f64::NEG_INFINITY;
        let mut best_combo = vec![0usize; free.len()];
        let mut combo = vec![0usize; free.len()];
        for _ in 0..total {
            for (v, c) in free.iter().zip(&combo) {
                values[v.0] = *c;
            }
            let score: f64 = bucket
                .factors
                .iter()
                .map(|tf| tf.factor.value_at(&values, domains))
                .product();
            if score > best {
                best = score;
                best_combo.copy_from_slice(&combo);
            }
            // Lexicographic odometer, last variable fastest.
            for j in (0..combo.len()).rev() {
                combo[j] += 1;
                if combo[j] < cards[j] {
                    break;
                }
                combo[j] = 0;
            }
        }
        for (v, c) in free.iter().zip(&best_combo) {
            values[v.0] = *c;
        }
    }
    Assignment(values)
}

/// Exact MPE over a prepared bucket list (possibly super-bucket grouped).
pub fn elim_mpe_on(
    buckets: Buckets,
    bn: &BeliefNetwork,
    d: &Ordering,
    limits: &Limits,
) -> Result<MpeResult> {
    let start = Instant::now();
    let (buckets, f_o) = process_exact(buckets, bn, d, limits, |_| BucketOp::Max, false)?;
    let value = buckets.constant();
    let assignment = forward_assignment(&buckets, bn.domains());
    Ok(MpeResult {
        value,
        assignment,
        evidence_impossible: value == 0.0,
        trace: Trace {
            buckets,
            f_i: bn.max_family_size(),
            f_o,
            mb: 1,
            elapsed: start.elapsed(),
        },
    })
}

/// Most probable explanation: the max over assignments consistent with the
/// evidence of the product of all CPT entries, plus an attaining tuple.
pub fn elim_mpe(
    bn: &BeliefNetwork,
    e: &Evidence,
    d: &Ordering,
    limits: &Limits,
) -> Result<MpeResult> {
    let buckets = network_buckets(bn, d, e)?;
    elim_mpe_on(buckets, bn, d, limits)
}

/// Belief updating: the unnormalized joint P(query, e) and the evidence
/// probability. The query variable must occupy the first ordering position.
pub fn elim_bel(
    bn: &BeliefNetwork,
    e: &Evidence,
    d: &Ordering,
    query: Var,
    limits: &Limits,
) -> Result<BelResult> {
    if d.var_at(0) != query {
        return Err(Error::QueryOrdering);
    }
    let start = Instant::now();
    let buckets = network_buckets(bn, d, e)?;
    let (buckets, f_o) = process_exact(buckets, bn, d, limits, |_| BucketOp::Sum, true)?;
    let joint = query_joint(&buckets, query, e, bn.domains(), limits)?;
    let p_evidence: f64 = joint.table().iter().sum();
    Ok(BelResult {
        joint,
        p_evidence,
        evidence_impossible: p_evidence == 0.0,
        trace: Trace {
            buckets,
            f_i: bn.max_family_size(),
            f_o,
            mb: 1,
            elapsed: start.elapsed(),
        },
    })
}

/// Assemble the joint over the query variable from the first bucket's
/// residents and the scalar pool.
pub(crate) fn query_joint(
    buckets: &Buckets,
    query: Var,
    e: &Evidence,
    domains: &Domains,
    limits: &Limits,
) -> Result<Factor> {
    let refs: Vec<&Factor> = buckets.list[0].factors.iter().map(|tf| &tf.factor).collect();
    let product = bounded_product(&refs, domains, limits)?;
    let constant = buckets.constant();
    let card = domains.card(query);
    let mut table = Vec::with_capacity(card);
    for val in 0..card {
        let raw = if product.is_scalar() {
            product.scalar_value()
        } else {
            let mut values = vec![0usize; domains.n()];
            values[query.0] = val;
            product.value_at(&values, domains)
        };
        let keep = match e.get(query) {
            Some(obs) => obs == val,
            None => true,
        };
        table.push(if keep { raw * constant } else { 0.0 });
    }
    Factor::new(vec![query], table, domains)
}

/// Maximum a posteriori hypothesis: hypothesis variables are maximized,
/// the rest summed out. The hypothesis set must occupy the leading
/// ordering positions; the forward phase runs only over those buckets.
pub fn elim_map(
    bn: &BeliefNetwork,
    e: &Evidence,
    d: &Ordering,
    hyp: &[Var],
    limits: &Limits,
) -> Result<MapResult> {
    check_hypothesis_first(d, hyp)?;
    let start = Instant::now();
    let hyp_set: Vec<bool> = {
        let mut m = vec![false; d.n()];
        for v in hyp {
            m[v.0] = true;
        }
        m
    };
    let buckets = network_buckets(bn, d, e)?;
    let (buckets, f_o) = process_exact(
        buckets,
        bn,
        d,
        limits,
        |b| {
            if b.vars.iter().any(|v| hyp_set[v.0]) {
                BucketOp::Max
            } else {
                BucketOp::Sum
            }
        },
        false,
    )?;
    let value = buckets.constant();
    let full = forward_assignment(&buckets, bn.domains());
    let hyp_assignment: Vec<(Var, usize)> = (0..hyp.len())
        .map(|p| {
            let v = d.var_at(p);
            (v, full.value(v))
        })
        .collect();

    // Evidence probability by full summation.
    let sum_buckets = network_buckets(bn, d, e)?;
    let (sum_buckets, _) = process_exact(sum_buckets, bn, d, limits, |_| BucketOp::Sum, false)?;
    let p_evidence = sum_buckets.constant();

    Ok(MapResult {
        value,
        hyp_assignment,
        p_evidence,
        evidence_impossible: p_evidence == 0.0,
        trace: Trace {
            buckets,
            f_i: bn.max_family_size(),
            f_o,
            mb: 1,
            elapsed: start.elapsed(),
        },
    })
}

pub(crate) fn check_hypothesis_first(d: &Ordering, hyp: &[Var]) -> Result<()> {
    let mut sorted: Vec<Var> = hyp.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != hyp.len() {
        return Err(Error::HypothesisOrdering);
    }
    for v in hyp {
        if d.position(*v) >= hyp.len() {
            return Err(Error::HypothesisOrdering);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{brute_bel, brute_map, brute_mpe, OracleBudget};
    use crate::testutil::{layered8, random_network, stacked_families};
    use crate::types::Domains;
    use crate::{find_ordering, width_and_induced_width, OrderingStrategy};

    fn lim() -> Limits {
        Limits::default()
    }

    fn rel_eq(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn independent_priors() {
        // Independent binary variables with priors (0.3, 0.7).
        let n = 6;
        let d = Domains::binary(n);
        let cpts = (0..n)
            .map(|i| Factor::new(vec![Var(i)], vec![0.3, 0.7], &d).unwrap())
            .collect();
        let bn = BeliefNetwork::new(d, (0..n).map(|_| vec![]).collect(), cpts).unwrap();
        let ord = Ordering::identity(n);
        let r = elim_mpe(&bn, &Evidence::empty(), &ord, &lim()).unwrap();
        assert!(rel_eq(r.value, 0.7f64.powi(n as i32)));
        assert_eq!(r.assignment.values(), &vec![1; n][..]);
    }

    #[test]
    fn layered_network_records_expected_scopes() {
        let bn = layered8();
        let d = Ordering::identity(8);
        let r = elim_mpe(&bn, &Evidence::empty(), &d, &lim()).unwrap();
        let mut scopes: Vec<Vec<usize>> = r
            .trace
            .buckets
            .list
            .iter()
            .flat_map(|b| b.factors.iter())
            .filter(|tf| tf.origin == FactorOrigin::Recorded)
            .map(|tf| tf.factor.scope().iter().map(|v| v.0).collect())
            .collect();
        scopes.sort();
        let mut expected = vec![
            vec![5, 6],
            vec![3, 4, 5],
            vec![2, 3, 4],
            vec![0, 2, 3],
            vec![0, 1, 2],
            vec![0, 1],
            vec![0],
        ];
        expected.sort();
        assert_eq!(scopes, expected);
        assert_eq!(r.trace.f_o, 3);
        // Matches the induced width of the moral graph along this ordering.
        let (_, wi) = width_and_induced_width(&bn.moral_graph(), &d).unwrap();
        assert_eq!(wi, 3);
    }

    #[test]
    fn mpe_matches_oracle_on_random_networks() {
        let budget = OracleBudget::default();
        for seed in 0..25u64 {
            let bn = random_network(8, 12, seed);
            let evidence = if seed % 3 == 0 {
                Evidence::new(&[(Var(1), (seed % 2) as usize)], bn.domains()).unwrap()
            } else {
                Evidence::empty()
            };
            let d = find_ordering(&bn.moral_graph(), &OrderingStrategy::MinFill).unwrap();
            let r = elim_mpe(&bn, &evidence, &d, &lim()).unwrap();
            let (want, _) = brute_mpe(&bn, &evidence, &budget).unwrap();
            assert!(rel_eq(r.value, want), "seed {seed}: {} vs {want}", r.value);
            // Forward contract: the returned tuple attains the value.
            let p = bn.joint_probability(&r.assignment, &evidence);
            assert!(rel_eq(p, r.value), "seed {seed}: tuple {p} vs {}", r.value);
        }
    }

    #[test]
    fn mpe_value_invariant_across_orderings() {
        let bn = random_network(9, 14, 77);
        let e = Evidence::new(&[(Var(3), 1)], bn.domains()).unwrap();
        let a = elim_mpe(&bn, &e, &Ordering::identity(9), &lim()).unwrap();
        let d2 = find_ordering(&bn.moral_graph(), &OrderingStrategy::MinDegree).unwrap();
        let b = elim_mpe(&bn, &e, &d2, &lim()).unwrap();
        let d3 = Ordering::new((0..9).rev().map(Var).collect(), 9).unwrap();
        let c = elim_mpe(&bn, &e, &d3, &lim()).unwrap();
        assert!(rel_eq(a.value, b.value));
        assert!(rel_eq(a.value, c.value));
    }

    #[test]
    fn recorded_arity_equals_induced_width_without_evidence() {
        for seed in 0..10u64 {
            let bn = random_network(10, 16, seed);
            let d = find_ordering(&bn.moral_graph(), &OrderingStrategy::MinFill).unwrap();
            let r = elim_mpe(&bn, &Evidence::empty(), &d, &lim()).unwrap();
            let (_, wi) = width_and_induced_width(&bn.moral_graph(), &d).unwrap();
            assert_eq!(r.trace.f_o, wi, "seed {seed}");
        }
    }

    #[test]
    fn memory_cap_aborts_with_resource_error() {
        let bn = random_network(12, 30, 5);
        let d = Ordering::identity(12);
        let tight = Limits {
            max_table_cells: 4,
            max_frontier_nodes: 1 << 20,
        };
        match elim_mpe(&bn, &Evidence::empty(), &d, &tight) {
            Err(Error::ResourceLimit { .. }) => {}
            other => panic!("expected resource error, got {other:?}"),
        }
    }

    #[test]
    fn bel_without_evidence_is_total_probability() {
        let bn = random_network(8, 13, 10);
        let d = find_ordering_front(&bn, Var(0));
        let r = elim_bel(&bn, &Evidence::empty(), &d, Var(0), &lim()).unwrap();
        assert!((r.p_evidence - 1.0).abs() < 1e-9);
    }

    fn find_ordering_front(bn: &BeliefNetwork, query: Var) -> Ordering {
        crate::find_ordering_with_front(
            &bn.moral_graph(),
            &OrderingStrategy::MinFill,
            &[query],
        )
        .unwrap()
    }

    #[test]
    fn bel_on_chain_matches_bayes_rule() {
        // A -> B, query A, evidence B=1. Joint must match the 2x2 hand
        // computation P(A=a) * P(B=1|A=a).
        let d = Domains::binary(2);
        let prior = Factor::new(vec![Var(0)], vec![0.25, 0.75], &d).unwrap();
        let cond = Factor::new(vec![Var(0), Var(1)], vec![0.9, 0.1, 0.4, 0.6], &d).unwrap();
        let bn = BeliefNetwork::new(d, vec![vec![], vec![Var(0)]], vec![prior, cond]).unwrap();
        let e = Evidence::new(&[(Var(1), 1)], bn.domains()).unwrap();
        let ord = Ordering::identity(2);
        let r = elim_bel(&bn, &e, &ord, Var(0), &lim()).unwrap();
        assert!(rel_eq(r.joint.table()[0], 0.25 * 0.1));
        assert!(rel_eq(r.joint.table()[1], 0.75 * 0.6));
        assert!(rel_eq(r.p_evidence, 0.25 * 0.1 + 0.75 * 0.6));
        let post = r.posterior(bn.domains()).unwrap();
        assert!(rel_eq(post.table().iter().sum::<f64>(), 1.0));
        assert!(rel_eq(post.table()[0], 0.025 / 0.475));
    }

    #[test]
    fn map_normalized_probability() {
        let bn = random_network(7, 11, 9);
        let e = Evidence::new(&[(Var(5), 1)], bn.domains()).unwrap();
        let d = find_ordering_front(&bn, Var(0));
        let m = elim_map(&bn, &e, &d, &[Var(0)], &lim()).unwrap();
        let norm = m.normalized().unwrap();
        assert!(norm > 0.0 && norm <= 1.0 + 1e-12);
        assert!(rel_eq(norm * m.p_evidence, m.value));
    }

    #[test]
    fn bel_matches_oracle_on_random_networks() {
        for seed in 30..45u64 {
            let bn = random_network(8, 12, seed);
            let e = Evidence::new(&[(Var(4), 1)], bn.domains()).unwrap();
            let d = find_ordering_front(&bn, Var(0));
            let r = elim_bel(&bn, &e, &d, Var(0), &lim()).unwrap();
            let (joint, pe) = brute_bel(&bn, &e, Var(0), &OracleBudget::default()).unwrap();
            for (a, b) in r.joint.table().iter().zip(joint.table()) {
                assert!(rel_eq(*a, *b), "seed {seed}");
            }
            assert!(rel_eq(r.p_evidence, pe));
        }
    }

    #[test]
    fn map_with_all_variables_equals_mpe() {
        let bn = random_network(7, 10, 3);
        let e = Evidence::new(&[(Var(6), 0)], bn.domains()).unwrap();
        let d = Ordering::identity(7);
        let hyp: Vec<Var> = (0..7).map(Var).collect();
        let m = elim_map(&bn, &e, &d, &hyp, &lim()).unwrap();
        let r = elim_mpe(&bn, &e, &d, &lim()).unwrap();
        assert!(rel_eq(m.value, r.value));
    }

    #[test]
    fn map_with_single_hypothesis_is_bel_argmax() {
        let bn = random_network(7, 11, 9);
        let e = Evidence::new(&[(Var(5), 1)], bn.domains()).unwrap();
        let d = find_ordering_front(&bn, Var(0));
        let m = elim_map(&bn, &e, &d, &[Var(0)], &lim()).unwrap();
        let b = elim_bel(&bn, &e, &d, Var(0), &lim()).unwrap();
        let best = b.joint.table().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!(rel_eq(m.value, best));
    }

    #[test]
    fn map_matches_oracle_on_random_networks() {
        for seed in 50..65u64 {
            let bn = random_network(8, 12, seed);
            let e = Evidence::new(&[(Var(7), (seed % 2) as usize)], bn.domains()).unwrap();
            let hyp = vec![Var(0), Var(1), Var(2)];
            let d = crate::find_ordering_with_front(
                &bn.moral_graph(),
                &OrderingStrategy::MinFill,
                &hyp,
            )
            .unwrap();
            let m = elim_map(&bn, &e, &d, &hyp, &lim()).unwrap();
            let (want, _) = brute_map(&bn, &e, &hyp, &OracleBudget::default()).unwrap();
            assert!(rel_eq(m.value, want), "seed {seed}: {} vs {want}", m.value);
        }
    }

    #[test]
    fn map_requires_hypothesis_first() {
        let bn = random_network(6, 8, 1);
        let d = Ordering::identity(6);
        assert!(matches!(
            elim_map(&bn, &Evidence::empty(), &d, &[Var(5)], &lim()),
            Err(Error::HypothesisOrdering)
        ));
    }

    #[test]
    fn zero_probability_evidence_flags_not_errors() {
        let bn = crate::testutil::chain3(); // deterministic chain
        // Chain forces X2 = X0; evidence X0=0, X2=1 is impossible.
        let e = Evidence::new(&[(Var(0), 0), (Var(2), 1)], bn.domains()).unwrap();
        let d = Ordering::identity(3);
        let r = elim_mpe(&bn, &e, &d, &lim()).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(r.evidence_impossible);

        let db = Ordering::identity(3);
        let b = elim_bel(&bn, &e, &db, Var(0), &lim()).unwrap();
        assert_eq!(b.p_evidence, 0.0);
        assert!(b.evidence_impossible);
    }

    #[test]
    fn sampled_evidence_has_positive_probability() {
        use crate::generate::{gen_evidence, EvidencePolicy};
        for seed in 0..10u64 {
            let bn = random_network(9, 15, 70 + seed);
            let e = gen_evidence(&bn, 3, EvidencePolicy::Sampled, seed).unwrap();
            let d = find_ordering_front(&bn, Var(0));
            let r = elim_bel(&bn, &e, &d, Var(0), &lim()).unwrap();
            assert!(r.p_evidence > 0.0, "seed {seed}");
        }
    }

    #[test]
    fn super_bucket_grouping_preserves_exact_value() {
        let bn = stacked_families();
        let e = Evidence::empty();
        let d = crate::legal_ordering(&bn, &e).unwrap();
        let plain = elim_mpe(&bn, &e, &d, &lim()).unwrap();
        let grouped_buckets = crate::buckets::super_bucket_grouping(
            network_buckets(&bn, &d, &e).unwrap(),
            &bn,
            &d,
        );
        let grouped = elim_mpe_on(grouped_buckets, &bn, &d, &lim()).unwrap();
        assert!(rel_eq(plain.value, grouped.value));
        let p = bn.joint_probability(&grouped.assignment, &e);
        assert!(rel_eq(p, grouped.value));
    }
}
