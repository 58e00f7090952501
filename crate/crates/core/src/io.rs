//! The BNET v1 network file format: line-oriented text, `#` comments,
//! whitespace-separated tokens.
//!
//! ```text
//! BNET 1
//! vars <n>
//! card <c_0> ... <c_{n-1}>
//! factors <k>
//! scope <s> <v_0> ... <v_{s-1}> child <v_c>     # scope ascending
//! <table values, last scope variable fastest>
//! evidence <t>                                   # optional
//! <var> <value>                                  # t lines
//! meta seed <u64> kind <uniform|noisy_or>        # optional
//! ```
//!
//! Probabilities are serialized with 17 significant digits, which makes
//! save/load round trips byte-identical.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::factor::Factor;
use crate::generate::NetKind;
use crate::network::BeliefNetwork;
use crate::types::{Domains, Evidence, Var};

/// Optional trailer recorded by the generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Meta {
    pub seed: u64,
    pub kind: NetKind,
}

#[derive(Clone, Debug)]
pub struct NetworkFile {
    pub network: BeliefNetwork,
    pub evidence: Evidence,
    pub meta: Option<Meta>,
}

fn fmt_prob(x: f64) -> String {
    format!("{x:.16e}")
}

/// Serialize a network (plus optional evidence and generator metadata) to
/// the BNET v1 text form.
pub fn network_to_string(bn: &BeliefNetwork, e: &Evidence, meta: Option<Meta>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "BNET 1");
    if meta.is_some() {
        let _ = writeln!(out, "# rng {}", crate::generate::RNG_FAMILY);
    }
    let n = bn.n();
    let _ = writeln!(out, "vars {n}");
    let cards: Vec<String> = (0..n)
        .map(|i| bn.domains().card(Var(i)).to_string())
        .collect();
    let _ = writeln!(out, "card {}", cards.join(" "));
    let _ = writeln!(out, "factors {n}");
    for i in 0..n {
        let child = Var(i);
        let cpt = bn.cpt(child);
        let mut file_scope: Vec<Var> = cpt.scope().to_vec();
        file_scope.sort_unstable();
        let ids: Vec<String> = file_scope.iter().map(|v| v.0.to_string()).collect();
        let _ = writeln!(
            out,
            "scope {} {} child {}",
            file_scope.len(),
            ids.join(" "),
            child.0
        );
        let values = reorder_table(cpt, &file_scope, bn.domains());
        let cells: Vec<String> = values.iter().map(|x| fmt_prob(*x)).collect();
        let _ = writeln!(out, "{}", cells.join(" "));
    }
    if !e.is_empty() {
        let _ = writeln!(out, "evidence {}", e.len());
        for (v, val) in e.iter() {
            let _ = writeln!(out, "{} {}", v.0, val);
        }
    }
    if let Some(m) = meta {
        let _ = writeln!(out, "meta seed {} kind {}", m.seed, m.kind.name());
    }
    out
}

/// Read the factor's table in the index order of `target_scope` (last
/// variable fastest). Pure permutation, no arithmetic.
fn reorder_table(f: &Factor, target_scope: &[Var], domains: &Domains) -> Vec<f64> {
    if f.scope() == target_scope {
        return f.table().to_vec();
    }
    let cards: Vec<usize> = target_scope.iter().map(|v| domains.card(*v)).collect();
    let total: usize = cards.iter().product();
    let mut values = vec![0usize; domains.n()];
    let mut out = Vec::with_capacity(total);
    for cell in 0..total {
        let mut rem = cell;
        for (j, v) in target_scope.iter().enumerate().rev() {
            values[v.0] = rem % cards[j];
            rem /= cards[j];
        }
        out.push(f.value_at(&values, domains));
    }
    out
}

pub fn save_network(path: &Path, bn: &BeliefNetwork, e: &Evidence, meta: Option<Meta>) -> Result<()> {
    fs::write(path, network_to_string(bn, e, meta))?;
    Ok(())
}

pub fn load_network(path: &Path) -> Result<NetworkFile> {
    let text = fs::read_to_string(path)?;
    parse_network(&text)
}

/// Tokens of one logical line with their positions.
struct Line<'a> {
    no: usize,
    tokens: Vec<(usize, &'a str)>,
}

struct Cursor<'a> {
    lines: Vec<Line<'a>>,
    at: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        let mut lines = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let body = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            };
            let mut tokens = Vec::new();
            let mut col = 0;
            for tok in body.split_whitespace() {
                let at = body[col..].find(tok).map(|o| col + o).unwrap_or(col);
                tokens.push((at + 1, tok));
                col = at + tok.len();
            }
            if !tokens.is_empty() {
                lines.push(Line {
                    no: idx + 1,
                    tokens,
                });
            }
        }
        Cursor { lines, at: 0 }
    }

    fn peek(&self) -> Option<&Line<'a>> {
        self.lines.get(self.at)
    }

    fn next_line(&mut self, what: &str) -> Result<&Line<'a>> {
        let line = self.lines.get(self.at).ok_or_else(|| Error::Parse {
            line: self.lines.last().map(|l| l.no + 1).unwrap_or(1),
            col: 1,
            msg: format!("expected {what}, found end of file"),
        })?;
        self.at += 1;
        Ok(line)
    }
}

fn parse_err(line: &Line<'_>, tok: usize, msg: impl Into<String>) -> Error {
    let col = line
        .tokens
        .get(tok)
        .map(|(c, _)| *c)
        .unwrap_or_else(|| line.tokens.last().map(|(c, t)| c + t.len()).unwrap_or(1));
    Error::Parse {
        line: line.no,
        col,
        msg: msg.into(),
    }
}

fn want<T: std::str::FromStr>(line: &Line<'_>, tok: usize, what: &str) -> Result<T> {
    let (_, s) = line
        .tokens
        .get(tok)
        .ok_or_else(|| parse_err(line, tok, format!("missing {what}")))?;
    s.parse::<T>()
        .map_err(|_| parse_err(line, tok, format!("invalid {what}: {s}")))
}

fn want_keyword(line: &Line<'_>, tok: usize, kw: &str) -> Result<()> {
    match line.tokens.get(tok) {
        Some((_, s)) if *s == kw => Ok(()),
        Some((_, s)) => Err(parse_err(line, tok, format!("expected `{kw}`, found `{s}`"))),
        None => Err(parse_err(line, tok, format!("expected `{kw}`"))),
    }
}

pub fn parse_network(text: &str) -> Result<NetworkFile> {
    let mut cur = Cursor::new(text);

    let header = cur.next_line("BNET header")?;
    want_keyword(header, 0, "BNET")?;
    let version: usize = want(header, 1, "format version")?;
    if version != 1 {
        return Err(parse_err(header, 1, format!("unsupported version {version}")));
    }

    let vars_line = cur.next_line("vars line")?;
    want_keyword(vars_line, 0, "vars")?;
    let n: usize = want(vars_line, 1, "variable count")?;

    let card_line = cur.next_line("card line")?;
    want_keyword(card_line, 0, "card")?;
    if card_line.tokens.len() != n + 1 {
        return Err(parse_err(
            card_line,
            card_line.tokens.len().min(n + 1),
            format!("expected {n} cardinalities"),
        ));
    }
    let mut cards = Vec::with_capacity(n);
    for t in 1..=n {
        cards.push(want::<usize>(card_line, t, "cardinality")?);
    }
    let domains = Domains::new(cards).map_err(|err| parse_err(card_line, 1, err.to_string()))?;

    let factors_line = cur.next_line("factors line")?;
    want_keyword(factors_line, 0, "factors")?;
    let k: usize = want(factors_line, 1, "factor count")?;

    let mut parents: Vec<Option<Vec<Var>>> = vec![None; n];
    let mut cpts: Vec<Option<Factor>> = vec![None; n];
    for fi in 0..k {
        let scope_line = cur.next_line("scope line")?;
        want_keyword(scope_line, 0, "scope")?;
        let s: usize = want(scope_line, 1, "scope size")?;
        let mut scope = Vec::with_capacity(s);
        for t in 0..s {
            let id: usize = want(scope_line, 2 + t, "scope variable")?;
            if id >= n {
                return Err(parse_err(
                    scope_line,
                    2 + t,
                    format!("factor {fi}: variable {id} out of range"),
                ));
            }
            scope.push(Var(id));
        }
        if scope.windows(2).any(|w| w[0] >= w[1]) {
            return Err(parse_err(
                scope_line,
                2,
                format!("factor {fi}: scope must be strictly ascending"),
            ));
        }
        want_keyword(scope_line, 2 + s, "child")?;
        let child_id: usize = want(scope_line, 3 + s, "child variable")?;
        let child = Var(child_id);
        if !scope.contains(&child) {
            return Err(parse_err(
                scope_line,
                3 + s,
                format!("factor {fi}: child {child_id} not in scope"),
            ));
        }
        if cpts.get(child_id).map(|c| c.is_some()).unwrap_or(true) {
            return Err(parse_err(
                scope_line,
                3 + s,
                format!("factor {fi}: duplicate factor for variable {child_id}"),
            ));
        }

        let table_line = cur.next_line("table line")?;
        let expect = domains
            .table_len(&scope)
            .map_err(|err| parse_err(table_line, 0, err.to_string()))?;
        if table_line.tokens.len() != expect {
            return Err(parse_err(
                table_line,
                table_line.tokens.len().min(expect),
                format!(
                    "factor {fi}: expected {expect} table values, found {}",
                    table_line.tokens.len()
                ),
            ));
        }
        let mut table = Vec::with_capacity(expect);
        for t in 0..expect {
            table.push(want::<f64>(table_line, t, "table value")?);
        }
        let file_factor = Factor::new(scope.clone(), table, &domains)
            .map_err(|err| parse_err(table_line, 0, format!("factor {fi}: {err}")))?;

        // Rearrange into the in-memory CPT layout (parents, then child).
        let pa: Vec<Var> = scope.iter().copied().filter(|v| *v != child).collect();
        let mut mem_scope = pa.clone();
        mem_scope.push(child);
        let mem_table = reorder_table(&file_factor, &mem_scope, &domains);
        let cpt = Factor::new(mem_scope, mem_table, &domains)
            .map_err(|err| parse_err(table_line, 0, format!("factor {fi}: {err}")))?;
        parents[child_id] = Some(pa);
        cpts[child_id] = Some(cpt);
    }

    let mut evidence = Evidence::empty();
    let mut meta = None;
    while let Some(line) = cur.peek() {
        match line.tokens[0].1 {
            "evidence" => {
                let count_line_no;
                let t: usize = {
                    let line = cur.next_line("evidence line")?;
                    count_line_no = line.no;
                    want(line, 1, "evidence count")?
                };
                let mut pairs = Vec::with_capacity(t);
                let mut last_line = count_line_no;
                for _ in 0..t {
                    let pair = cur.next_line("evidence pair")?;
                    let v: usize = want(pair, 0, "evidence variable")?;
                    let val: usize = want(pair, 1, "evidence value")?;
                    pairs.push((Var(v), val));
                    last_line = pair.no;
                }
                evidence = Evidence::new(&pairs, &domains).map_err(|err| Error::Parse {
                    line: last_line,
                    col: 1,
                    msg: err.to_string(),
                })?;
            }
            "meta" => {
                let line = cur.next_line("meta line")?;
                want_keyword(line, 1, "seed")?;
                let seed: u64 = want(line, 2, "seed")?;
                want_keyword(line, 3, "kind")?;
                let kind = match line.tokens.get(4).map(|(_, s)| *s) {
                    Some("uniform") => NetKind::Uniform,
                    Some("noisy_or") => NetKind::NoisyOr,
                    _ => return Err(parse_err(line, 4, "expected `uniform` or `noisy_or`")),
                };
                meta = Some(Meta { seed, kind });
            }
            other => {
                let msg = format!("unexpected directive `{other}`");
                return Err(parse_err(line, 0, msg));
            }
        }
    }

    if let Some(missing) = (0..n).find(|i| cpts[*i].is_none()) {
        return Err(Error::Parse {
            line: 1,
            col: 1,
            msg: format!("no factor for variable {missing}"),
        });
    }
    let network = BeliefNetwork::new(
        domains,
        parents.into_iter().map(Option::unwrap).collect(),
        cpts.into_iter().map(Option::unwrap).collect(),
    )
    .map_err(|err| Error::Parse {
        line: 1,
        col: 1,
        msg: err.to_string(),
    })?;
    Ok(NetworkFile {
        network,
        evidence,
        meta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{gen_evidence, generate, EvidencePolicy, GenSpec};

    #[test]
    fn round_trip_is_byte_identical() {
        for seed in 0..20u64 {
            let spec = GenSpec::uniform(10, 18, seed);
            let bn = generate(&spec).unwrap();
            let e = gen_evidence(&bn, 2, EvidencePolicy::Sampled, seed).unwrap();
            let meta = Some(Meta {
                seed,
                kind: NetKind::Uniform,
            });
            let text = network_to_string(&bn, &e, meta);
            let parsed = parse_network(&text).unwrap();
            assert_eq!(parsed.network, bn);
            assert_eq!(parsed.evidence, e);
            assert_eq!(parsed.meta, meta);
            let again = network_to_string(&parsed.network, &parsed.evidence, parsed.meta);
            assert_eq!(text, again);
        }
    }

    #[test]
    fn child_not_last_in_ascending_scope_round_trips() {
        // A CPT whose child id is smaller than a parent id exercises the
        // table permutation on both save and load.
        let bn = crate::testutil::random_structure(3, vec![vec![Var(1), Var(2)], vec![], vec![]], 4);
        let text = network_to_string(&bn, &Evidence::empty(), None);
        let parsed = parse_network(&text).unwrap();
        assert_eq!(parsed.network, bn);
    }

    #[test]
    fn malformed_header_reports_line_one() {
        match parse_network("BNOT 1\nvars 1\n") {
            Err(Error::Parse { line: 1, .. }) => {}
            other => panic!("expected parse error on line 1, got {other:?}"),
        }
    }

    #[test]
    fn bad_table_value_reports_position() {
        let text = "BNET 1\nvars 1\ncard 2\nfactors 1\nscope 1 0 child 0\n5.0e-1 oops\n";
        match parse_network(text) {
            Err(Error::Parse { line: 6, col, msg }) => {
                assert!(col > 1, "col {col}");
                assert!(msg.contains("table value"), "{msg}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn mismatched_table_length_names_factor() {
        let text = "BNET 1\nvars 2\ncard 2 2\nfactors 2\nscope 1 0 child 0\n0.5 0.5\nscope 2 0 1 child 1\n0.5 0.5\n";
        match parse_network(text) {
            Err(Error::Parse { msg, .. }) => assert!(msg.contains("factor 1"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn hand_encoded_layered_network_loads() {
        // Eight variables, eight factors, layered two-root structure.
        let bn = crate::testutil::layered8();
        let text = network_to_string(&bn, &Evidence::empty(), None);
        let parsed = parse_network(&text).unwrap();
        assert_eq!(parsed.network.n(), 8);
        assert_eq!(parsed.network.cpts().len(), 8);
        assert_eq!(parsed.network.parents(Var(7)), &[Var(5), Var(6)]);
    }
}
