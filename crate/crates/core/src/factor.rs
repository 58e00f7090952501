//! Nonnegative real-valued tables over ordered variable scopes, with the
//! three primitives every elimination algorithm is built from: multiply,
//! eliminate and restrict.
//!
//! Indexing convention (relied on bit-exactly by file I/O): the table is
//! row-major with the *last* scope variable varying fastest.

use crate::error::{Error, Result};
use crate::types::{Domains, Var};

/// Elimination operator applied when a variable is removed from a factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ElimOp {
    Max,
    Min,
    Sum,
    /// Sum divided by the cardinality of the eliminated variable.
    Mean,
}

/// A table over an ordered scope of distinct variables. A factor with an
/// empty scope is a scalar and has exactly one cell.
#[derive(Clone, Debug, PartialEq)]
pub struct Factor {
    scope: Vec<Var>,
    table: Vec<f64>,
}

impl Factor {
    pub fn new(scope: Vec<Var>, table: Vec<f64>, domains: &Domains) -> Result<Self> {
        let mut seen = vec![false; domains.n()];
        for v in &scope {
            if v.0 >= domains.n() {
                return Err(Error::InvalidFactor(format!("variable {} out of range", v.0)));
            }
            if seen[v.0] {
                return Err(Error::InvalidFactor(format!(
                    "duplicate variable {} in scope",
                    v.0
                )));
            }
            seen[v.0] = true;
        }
        let expect = domains.table_len(&scope)?;
        if table.len() != expect {
            return Err(Error::InvalidFactor(format!(
                "table has {} entries, scope needs {}",
                table.len(),
                expect
            )));
        }
        if let Some(x) = table.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(Error::InvalidFactor(format!("entry {x} is not a finite nonnegative real")));
        }
        Ok(Factor { scope, table })
    }

    /// Constant factor over the empty scope.
    pub fn scalar(value: f64) -> Self {
        Factor {
            scope: Vec::new(),
            table: vec![value],
        }
    }

    pub fn scope(&self) -> &[Var] {
        &self.scope
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn arity(&self) -> usize {
        self.scope.len()
    }

    pub fn is_scalar(&self) -> bool {
        self.scope.is_empty()
    }

    pub fn scalar_value(&self) -> f64 {
        debug_assert!(self.is_scalar());
        self.table[0]
    }

    /// Stride of each scope position; the last position has stride 1.
    pub fn strides(&self, domains: &Domains) -> Vec<usize> {
        let mut strides = vec![1usize; self.scope.len()];
        for j in (0..self.scope.len().saturating_sub(1)).rev() {
            strides[j] = strides[j + 1] * domains.card(self.scope[j + 1]);
        }
        strides
    }

    /// Table value at a full assignment (indexed by variable id).
    pub fn value_at(&self, values: &[usize], domains: &Domains) -> f64 {
        let strides = self.strides(domains);
        let mut idx = 0usize;
        for (j, v) in self.scope.iter().enumerate() {
            idx += values[v.0] * strides[j];
        }
        self.table[idx]
    }

    /// Largest entry of the table.
    pub fn max_value(&self) -> f64 {
        self.table.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Product of a sequence of factors over the ascending union of their scopes.
/// An empty sequence yields the neutral scalar 1.
pub fn multiply(factors: &[&Factor], domains: &Domains) -> Result<Factor> {
    if factors.is_empty() {
        return Ok(Factor::scalar(1.0));
    }
    if factors.len() == 1 {
        return Ok(factors[0].clone());
    }
    let mut scope: Vec<Var> = factors.iter().flat_map(|f| f.scope.iter().copied()).collect();
    scope.sort_unstable();
    scope.dedup();
    let cards: Vec<usize> = scope.iter().map(|v| domains.card(*v)).collect();
    let total = domains.table_len(&scope)?;

    // Per-factor stride aligned with the output scope; 0 where the variable
    // is absent so the odometer update is uniform.
    let mut aligned: Vec<Vec<usize>> = Vec::with_capacity(factors.len());
    for f in factors {
        let fstrides = f.strides(domains);
        let mut a = vec![0usize; scope.len()];
        for (j, v) in f.scope.iter().enumerate() {
            let p = scope.binary_search(v).expect("scope var in union");
            a[p] = fstrides[j];
        }
        aligned.push(a);
    }

    let mut table = Vec::with_capacity(total);
    let mut counters = vec![0usize; scope.len()];
    let mut indices = vec![0usize; factors.len()];
    for cell in 0..total {
        let mut prod = 1.0;
        for (fi, f) in factors.iter().enumerate() {
            prod *= f.table[indices[fi]];
        }
        table.push(prod);
        if cell + 1 == total {
            break;
        }
        // Advance the odometer; the last scope variable varies fastest.
        for j in (0..scope.len()).rev() {
            counters[j] += 1;
            if counters[j] < cards[j] {
                for (fi, a) in aligned.iter().enumerate() {
                    indices[fi] += a[j];
                }
                break;
            }
            counters[j] = 0;
            for (fi, a) in aligned.iter().enumerate() {
                indices[fi] -= (cards[j] - 1) * a[j];
            }
        }
    }
    Ok(Factor { scope, table })
}

/// Remove `x` from the factor by aggregating over its values.
pub fn eliminate(f: &Factor, x: Var, op: ElimOp, domains: &Domains) -> Result<Factor> {
    let p = f
        .scope
        .iter()
        .position(|v| *v == x)
        .ok_or(Error::VarNotInScope { var: x })?;
    let cx = domains.card(x);
    let inner: usize = f.scope[p + 1..].iter().map(|v| domains.card(*v)).product();
    let block = cx * inner;
    let out_len = f.table.len() / cx;
    let mut scope = f.scope.clone();
    scope.remove(p);
    let mut table = Vec::with_capacity(out_len);
    for out in 0..out_len {
        let base = (out / inner) * block + out % inner;
        let mut acc = match op {
            ElimOp::Max => f64::NEG_INFINITY,
            ElimOp::Min => f64::INFINITY,
            ElimOp::Sum | ElimOp::Mean => 0.0,
        };
        for k in 0..cx {
            let v = f.table[base + k * inner];
            acc = match op {
                ElimOp::Max => acc.max(v),
                ElimOp::Min => acc.min(v),
                ElimOp::Sum | ElimOp::Mean => acc + v,
            };
        }
        if let ElimOp::Mean = op {
            acc /= cx as f64;
        }
        table.push(acc);
    }
    Ok(Factor { scope, table })
}

/// Eliminate several variables in turn with the same operator. A variable
/// the factor does not mention is a no-op for max/min/mean; summation over
/// it scales the table by its cardinality.
pub fn eliminate_all(f: &Factor, xs: &[Var], op: ElimOp, domains: &Domains) -> Result<Factor> {
    let mut cur = f.clone();
    for x in xs {
        if cur.scope.contains(x) {
            cur = eliminate(&cur, *x, op, domains)?;
        } else if let ElimOp::Sum = op {
            let c = domains.card(*x) as f64;
            for v in &mut cur.table {
                *v *= c;
            }
        }
    }
    Ok(cur)
}

/// Slice the factor at `x = value`, dropping `x` from the scope.
pub fn restrict(f: &Factor, x: Var, value: usize, domains: &Domains) -> Result<Factor> {
    let p = f
        .scope
        .iter()
        .position(|v| *v == x)
        .ok_or(Error::VarNotInScope { var: x })?;
    if value >= domains.card(x) {
        return Err(Error::InvalidEvidence { var: x, value });
    }
    let cx = domains.card(x);
    let inner: usize = f.scope[p + 1..].iter().map(|v| domains.card(*v)).product();
    let block = cx * inner;
    let out_len = f.table.len() / cx;
    let mut scope = f.scope.clone();
    scope.remove(p);
    let mut table = Vec::with_capacity(out_len);
    for out in 0..out_len {
        let base = (out / inner) * block + out % inner;
        table.push(f.table[base + value * inner]);
    }
    Ok(Factor { scope, table })
}
