//! Basic domain vocabulary: variables, domains, assignments, evidence and
//! elimination orderings.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Index of a discrete variable. Ids are dense in `[0, n)` for a given network.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub usize);

impl Var {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X{}", self.0)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Domain cardinalities, one per variable. Every cardinality is at least 2;
/// a one-valued variable is a constant and is rejected at construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Domains {
    cards: Vec<usize>,
}

impl Domains {
    pub fn new(cards: Vec<usize>) -> Result<Self> {
        if let Some((i, &c)) = cards.iter().enumerate().find(|(_, &c)| c < 2) {
            return Err(Error::InvalidDomain {
                var: Var(i),
                card: c,
            });
        }
        Ok(Domains { cards })
    }

    /// All-binary domains over `n` variables.
    pub fn binary(n: usize) -> Self {
        Domains { cards: vec![2; n] }
    }

    pub fn n(&self) -> usize {
        self.cards.len()
    }

    pub fn card(&self, v: Var) -> usize {
        self.cards[v.0]
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    /// Number of cells of a table over `scope`, or an error when it
    /// overflows the address space.
    pub fn table_len(&self, scope: &[Var]) -> Result<usize> {
        let mut len: usize = 1;
        for v in scope {
            len = len
                .checked_mul(self.card(*v))
                .ok_or(Error::TableTooLarge)?;
        }
        Ok(len)
    }
}

/// A full assignment: one value index per variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment(pub Vec<usize>);

impl Assignment {
    pub fn value(&self, v: Var) -> usize {
        self.0[v.0]
    }

    pub fn values(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// True when the assignment agrees with every observed value.
    pub fn consistent_with(&self, e: &Evidence) -> bool {
        e.iter().all(|(v, val)| self.0[v.0] == val)
    }
}

/// A partial assignment of observed variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Evidence {
    map: BTreeMap<Var, usize>,
}

impl Evidence {
    pub fn empty() -> Self {
        Evidence::default()
    }

    pub fn new(pairs: &[(Var, usize)], domains: &Domains) -> Result<Self> {
        let mut map = BTreeMap::new();
        for &(v, val) in pairs {
            if v.0 >= domains.n() || val >= domains.card(v) {
                return Err(Error::InvalidEvidence { var: v, value: val });
            }
            if map.insert(v, val).is_some() {
                return Err(Error::DuplicateEvidence { var: v });
            }
        }
        Ok(Evidence { map })
    }

    pub fn get(&self, v: Var) -> Option<usize> {
        self.map.get(&v).copied()
    }

    pub fn contains(&self, v: Var) -> bool {
        self.map.contains_key(&v)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Observed variables in ascending id order.
    pub fn iter(&self) -> impl Iterator<Item = (Var, usize)> + '_ {
        self.map.iter().map(|(v, val)| (*v, *val))
    }
}

/// An elimination ordering: a permutation of all variables. Position 0 is
/// "first" and is processed last; the variable in the final position is
/// eliminated first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ordering {
    order: Vec<Var>,
    pos: Vec<usize>,
}

impl Ordering {
    pub fn new(order: Vec<Var>, n: usize) -> Result<Self> {
        if order.len() != n {
            return Err(Error::InvalidOrdering(format!(
                "ordering has {} entries, expected {}",
                order.len(),
                n
            )));
        }
        let mut pos = vec![usize::MAX; n];
        for (i, v) in order.iter().enumerate() {
            if v.0 >= n {
                return Err(Error::InvalidOrdering(format!(
                    "variable {} out of range",
                    v.0
                )));
            }
            if pos[v.0] != usize::MAX {
                return Err(Error::InvalidOrdering(format!(
                    "variable {} appears twice",
                    v.0
                )));
            }
            pos[v.0] = i;
        }
        Ok(Ordering { order, pos })
    }

    /// Identity ordering `0, 1, ..., n-1`.
    pub fn identity(n: usize) -> Self {
        Ordering {
            order: (0..n).map(Var).collect(),
            pos: (0..n).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.order.len()
    }

    /// Zero-based position of `v` in the ordering.
    pub fn position(&self, v: Var) -> usize {
        self.pos[v.0]
    }

    pub fn var_at(&self, position: usize) -> Var {
        self.order[position]
    }

    pub fn vars(&self) -> &[Var] {
        &self.order
    }

    /// The variable of `scope` occupying the latest position, i.e. the one
    /// whose bucket a function over `scope` belongs to.
    pub fn latest(&self, scope: &[Var]) -> Option<Var> {
        scope.iter().copied().max_by_key(|v| self.pos[v.0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domains_reject_constants() {
        assert!(Domains::new(vec![2, 1, 3]).is_err());
        assert!(Domains::new(vec![2, 2]).is_ok());
    }

    #[test]
    fn evidence_rejects_out_of_range_and_duplicates() {
        let d = Domains::binary(3);
        assert!(Evidence::new(&[(Var(0), 2)], &d).is_err());
        assert!(Evidence::new(&[(Var(0), 1), (Var(0), 0)], &d).is_err());
        let e = Evidence::new(&[(Var(2), 1), (Var(0), 0)], &d).unwrap();
        let seen: Vec<_> = e.iter().collect();
        assert_eq!(seen, vec![(Var(0), 0), (Var(2), 1)]);
    }

    #[test]
    fn ordering_must_be_permutation() {
        assert!(Ordering::new(vec![Var(0), Var(0)], 2).is_err());
        assert!(Ordering::new(vec![Var(0)], 2).is_err());
        let d = Ordering::new(vec![Var(1), Var(0)], 2).unwrap();
        assert_eq!(d.position(Var(1)), 0);
        assert_eq!(d.latest(&[Var(0), Var(1)]), Some(Var(0)));
    }
}
