//! Brute-force reference implementations by exhaustive enumeration. These
//! are deliberately independent of the bucket machinery: they iterate raw
//! assignments and multiply CPT entries directly, and exist to validate
//! everything else on small instances.

use crate::error::{Error, Result};
use crate::factor::Factor;
use crate::network::BeliefNetwork;
use crate::types::{Assignment, Evidence, Var};

/// Cap on the number of enumerated assignments.
#[derive(Clone, Copy, Debug)]
pub struct OracleBudget {
    pub max_states: usize,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_states: 1 << 20,
        }
    }
}

fn state_count(bn: &BeliefNetwork, budget: &OracleBudget) -> Result<usize> {
    let mut states: usize = 1;
    for i in 0..bn.n() {
        states = states
            .checked_mul(bn.domains().card(Var(i)))
            .ok_or(Error::TableTooLarge)?;
        if states > budget.max_states {
            return Err(Error::OracleBudget {
                states,
                budget: budget.max_states,
            });
        }
    }
    Ok(states)
}

/// Visit every full assignment in ascending lexicographic order (variable 0
/// slowest) along with its joint probability under the evidence.
fn for_each_state(
    bn: &BeliefNetwork,
    e: &Evidence,
    budget: &OracleBudget,
    mut visit: impl FnMut(&Assignment, f64),
) -> Result<()> {
    let n = bn.n();
    let states = state_count(bn, budget)?;
    let mut x = Assignment(vec![0usize; n]);
    for _ in 0..states {
        let p = bn.joint_probability(&x, e);
        visit(&x, p);
        for j in (0..n).rev() {
            x.0[j] += 1;
            if x.0[j] < bn.domains().card(Var(j)) {
                break;
            }
            x.0[j] = 0;
        }
    }
    Ok(())
}

/// Exhaustive MPE. Ties break toward the lexicographically smallest
/// assignment.
pub fn brute_mpe(
    bn: &BeliefNetwork,
    e: &Evidence,
    budget: &OracleBudget,
) -> Result<(f64, Assignment)> {
    let mut best = f64::NEG_INFINITY;
    let mut arg = Assignment(vec![0; bn.n()]);
    for_each_state(bn, e, budget, |x, p| {
        if p > best {
            best = p;
            arg = x.clone();
        }
    })?;
    Ok((best.max(0.0), arg))
}

/// Exhaustive belief: the unnormalized joint over the query variable and
/// the evidence probability.
pub fn brute_bel(
    bn: &BeliefNetwork,
    e: &Evidence,
    query: Var,
    budget: &OracleBudget,
) -> Result<(Factor, f64)> {
    let card = bn.domains().card(query);
    let mut sums = vec![0.0f64; card];
    for_each_state(bn, e, budget, |x, p| {
        sums[x.value(query)] += p;
    })?;
    let p_evidence = sums.iter().sum();
    let joint = Factor::new(vec![query], sums, bn.domains())?;
    Ok((joint, p_evidence))
}

/// Exhaustive MAP: max over hypothesis assignments of the summed
/// completions. The hypothesis assignment is reported in ascending
/// variable order; ties break toward the lexicographically smallest one.
pub fn brute_map(
    bn: &BeliefNetwork,
    e: &Evidence,
    hyp: &[Var],
    budget: &OracleBudget,
) -> Result<(f64, Vec<(Var, usize)>)> {
    let mut hyp_sorted = hyp.to_vec();
    hyp_sorted.sort_unstable();
    hyp_sorted.dedup();
    let cards: Vec<usize> = hyp_sorted.iter().map(|v| bn.domains().card(*v)).collect();
    let combos: usize = cards.iter().product();
    let mut sums = vec![0.0f64; combos.max(1)];
    for_each_state(bn, e, budget, |x, p| {
        let mut idx = 0usize;
        for (v, c) in hyp_sorted.iter().zip(&cards) {
            idx = idx * c + x.value(*v);
        }
        sums[idx] += p;
    })?;
    let (mut best_idx, mut best) = (0usize, f64::NEG_INFINITY);
    for (i, s) in sums.iter().enumerate() {
        if *s > best {
            best = *s;
            best_idx = i;
        }
    }
    let mut values = vec![0usize; hyp_sorted.len()];
    for j in (0..hyp_sorted.len()).rev() {
        values[j] = best_idx % cards[j];
        best_idx /= cards[j];
    }
    let assignment = hyp_sorted.into_iter().zip(values).collect();
    Ok((best.max(0.0), assignment))
}
