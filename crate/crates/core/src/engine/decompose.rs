use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use crate::dictionary::{CanonicalCode, Dictionary};
use crate::query::{EdgeLabel, QueryGraph};

/// Where a subquery's matches live.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SubqueryKind {
    /// An instance of a stored pattern.
    Pattern(CanonicalCode),
    /// A maximal connected component of cold edges.
    Cold,
    /// A single variable-property edge, answered by every fragment.
    Wildcard,
}

impl fmt::Display for SubqueryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubqueryKind::Pattern(c) => write!(f, "{c}"),
            SubqueryKind::Cold => f.write_str("cold"),
            SubqueryKind::Wildcard => f.write_str("wildcard"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subquery {
    pub graph: QueryGraph,
    /// Positions of the subquery's edges in the original query.
    pub edges: Vec<usize>,
    pub kind: SubqueryKind,
    pub card: u128,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    /// Ordered by first edge position.
    pub subqueries: Vec<Subquery>,
    /// Product of subquery cardinalities.
    pub cost: u128,
}

impl Decomposition {
    pub fn len(&self) -> usize {
        self.subqueries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subqueries.is_empty()
    }
}

/// Largest query accepted by [`decompose`].
pub const MAX_QUERY_EDGES: usize = 64;

fn mask_edges(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask & (1 << i) != 0).collect()
}

/// Ranking of a partial cover: cost, then subquery count, then sorted codes.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Score {
    cost: u128,
    count: usize,
    codes: Vec<CanonicalCode>,
}

#[derive(Clone, Debug)]
struct Cover {
    score: Score,
    parts: Vec<u64>,
}

impl Cover {
    fn extend(&self, mask: u64, code: &CanonicalCode, card: u128) -> Cover {
        let mut codes = self.score.codes.clone();
        let at = codes.binary_search(code).unwrap_or_else(|i| i);
        codes.insert(at, code.clone());
        let mut parts = self.parts.clone();
        parts.push(mask);
        Cover { score: Score { cost: self.score.cost.saturating_mul(card), count: self.score.count + 1, codes }, parts }
    }

    /// Ranking that ignores cost, used once a zero-cardinality part makes the
    /// product zero regardless of the rest.
    fn shape_key(&self) -> (usize, &[CanonicalCode]) {
        (self.score.count, &self.score.codes)
    }
}

struct Search<'a> {
    q: &'a QueryGraph,
    dict: &'a Dictionary,
    adjacent: Vec<u64>,
    max_edges: usize,
    probes: HashMap<u64, Option<(CanonicalCode, u128)>>,
    // Per remaining-edge mask: best by score and best by shape alone.
    memo: HashMap<u64, Option<(Cover, Cover)>>,
}

impl Search<'_> {
    fn probe(&mut self, mask: u64) -> Option<(CanonicalCode, u128)> {
        if let Some(hit) = self.probes.get(&mask) {
            return hit.clone();
        }
        let hit = self.q.edge_subgraph(&mask_edges(mask)).and_then(|g| {
            let l = self.dict.lookup(&g)?;
            Some((l.entry.pattern.code().clone(), l.card as u128))
        });
        self.probes.insert(mask, hit.clone());
        hit
    }

    /// Connected subsets of `within` that contain `seed`, up to `max_edges`.
    fn connected_subsets(&self, seed: usize, within: u64) -> Vec<u64> {
        let start = 1u64 << seed;
        let mut seen: HashSet<u64> = HashSet::from([start]);
        let mut frontier = vec![start];
        while let Some(s) = frontier.pop() {
            if s.count_ones() as usize >= self.max_edges {
                continue;
            }
            let reach = mask_edges(s).iter().fold(0u64, |acc, &e| acc | self.adjacent[e]) & within & !s;
            for e in mask_edges(reach) {
                let t = s | (1 << e);
                if seen.insert(t) {
                    frontier.push(t);
                }
            }
        }
        let mut out: Vec<u64> = seen.into_iter().collect();
        out.sort_unstable();
        out
    }

    fn best(&mut self, remaining: u64) -> Option<(Cover, Cover)> {
        if remaining == 0 {
            let empty = Cover { score: Score { cost: 1, count: 0, codes: Vec::new() }, parts: Vec::new() };
            return Some((empty.clone(), empty));
        }
        if let Some(hit) = self.memo.get(&remaining) {
            return hit.clone();
        }
        let seed = remaining.trailing_zeros() as usize;
        let mut by_score: Option<Cover> = None;
        let mut by_shape: Option<Cover> = None;
        for s in self.connected_subsets(seed, remaining) {
            let Some((code, card)) = self.probe(s) else { continue };
            let Some((rest_score, rest_shape)) = self.best(remaining & !s) else { continue };
            let rest = if card == 0 { &rest_shape } else { &rest_score };
            let cand = rest.extend(s, &code, card);
            if by_score.as_ref().is_none_or(|b| cand.score < b.score) {
                by_score = Some(cand.clone());
            }
            let cand_shape = rest_shape.extend(s, &code, card);
            if by_shape.as_ref().is_none_or(|b| cand_shape.shape_key() < b.shape_key()) {
                by_shape = Some(cand_shape);
            }
        }
        let out = by_score.zip(by_shape);
        self.memo.insert(remaining, out.clone());
        out
    }
}

/// Splits a query into fragment-aligned subqueries of minimum estimated
/// cost. Cold edges form fixed components; hot edges are covered by
/// connected instances of dictionary patterns. Ties prefer fewer
/// subqueries, then smaller sorted pattern codes.
///
/// Panics if the query has more than [`MAX_QUERY_EDGES`] edges.
pub fn decompose(q: &QueryGraph, dict: &Dictionary) -> Decomposition {
    assert!(q.edge_count() <= MAX_QUERY_EDGES, "query too large to decompose");
    let mut fixed: Vec<Subquery> = Vec::new();
    let mut hot = 0u64;
    let mut cold: Vec<usize> = Vec::new();
    for (i, e) in q.edges().iter().enumerate() {
        match &e.label {
            EdgeLabel::Var(_) => {
                let graph = q.edge_subgraph(&[i]).expect("single edge");
                let card = dict.estimate_card(&graph);
                fixed.push(Subquery { graph, edges: vec![i], kind: SubqueryKind::Wildcard, card });
            }
            EdgeLabel::Property(p) if dict.is_hot(p) => hot |= 1 << i,
            EdgeLabel::Property(_) => cold.push(i),
        }
    }
    for component in cold_components(q, &cold) {
        let graph = q.edge_subgraph(&component).expect("component is connected");
        let card = dict.estimate_card(&graph);
        fixed.push(Subquery { graph, edges: component, kind: SubqueryKind::Cold, card });
    }

    let adjacent = (0..q.edge_count())
        .map(|i| {
            let a = &q.edges()[i];
            (0..q.edge_count()).filter(|&j| j != i).fold(0u64, |m, j| {
                let b = &q.edges()[j];
                let touches = [b.subject, b.object].iter().any(|v| *v == a.subject || *v == a.object);
                if touches { m | (1 << j) } else { m }
            })
        })
        .collect();
    let mut search =
        Search { q, dict, adjacent, max_edges: dict.max_pattern_edges().max(1), probes: HashMap::new(), memo: HashMap::new() };
    let (cover, _) = search.best(hot).expect("single-edge patterns cover every hot edge");
    for part in cover.parts {
        let edges = mask_edges(part);
        let graph = q.edge_subgraph(&edges).expect("connected part");
        let (code, card) = search.probe(part).expect("probed during search");
        fixed.push(Subquery { graph, edges, kind: SubqueryKind::Pattern(code), card });
    }
    fixed.sort_by_key(|s| s.edges[0]);
    let cost = fixed.iter().fold(1u128, |c, s| c.saturating_mul(s.card));
    Decomposition { subqueries: fixed, cost }
}

/// Maximal groups of cold edges connected through shared vertices.
fn cold_components(q: &QueryGraph, cold: &[usize]) -> Vec<Vec<usize>> {
    let mut groups: Vec<(BTreeSet<usize>, Vec<usize>)> = Vec::new();
    for &i in cold {
        let e = &q.edges()[i];
        let ends: BTreeSet<usize> = [e.subject, e.object].into();
        let (touching, apart): (Vec<_>, Vec<_>) = groups.into_iter().partition(|(vs, _)| !vs.is_disjoint(&ends));
        let mut merged = (ends, vec![i]);
        for (vs, es) in touching {
            merged.0.extend(vs);
            merged.1.extend(es);
        }
        merged.1.sort_unstable();
        groups = apart;
        groups.push(merged);
    }
    let mut out: Vec<Vec<usize>> = groups.into_iter().map(|(_, es)| es).collect();
    out.sort();
    out
}
