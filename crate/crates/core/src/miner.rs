//! Frequent access pattern mining over a normalized workload.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::dictionary::{canonical_form, CanonicalCode};
use crate::matcher::{contains_pattern, evaluate, instantiate};
use crate::query::{normalize, EdgeLabel, QEdge, QVertex, QueryGraph, TriplePattern, Workload};
use crate::rdf::RdfGraph;

/// A connected, all-variable query shape identified by its canonical code.
///
/// Vertex `i` is named `?v{i}` after its discovery index in the code, so two
/// isomorphic patterns are structurally identical.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pattern {
    graph: QueryGraph,
    code: CanonicalCode,
}

impl Pattern {
    /// Canonical pattern for a query shape; constants are treated as
    /// variables. `None` if the shape has variable properties.
    pub fn from_shape(q: &QueryGraph) -> Option<Pattern> {
        let form = canonical_form(q)?;
        Some(Self::from_code(&form.code))
    }

    pub fn from_code(code: &CanonicalCode) -> Pattern {
        let entries = code.entries();
        let n = entries.iter().map(|e| e.from.max(e.to)).max().unwrap_or(0) + 1;
        let vertices = (0..n).map(|i| QVertex::Var(format!("?v{i}"))).collect();
        let edges = entries
            .iter()
            .map(|e| {
                let (subject, object) = e.endpoints();
                QEdge { subject, label: EdgeLabel::Property(e.label.clone()), object }
            })
            .collect();
        Pattern { graph: QueryGraph::from_parts(vertices, edges), code: code.clone() }
    }

    pub fn single_edge(property: &str) -> Pattern {
        let q = QueryGraph::new([TriplePattern::new(
            QVertex::var("v0"),
            EdgeLabel::property(property),
            QVertex::var("v1"),
        )])
        .expect("single edge is connected");
        Self::from_shape(&q).expect("fixed property")
    }

    pub fn graph(&self) -> &QueryGraph {
        &self.graph
    }

    pub fn code(&self) -> &CanonicalCode {
        &self.code
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    /// Name of pattern vertex `i`.
    pub fn variable(i: usize) -> String {
        format!("?v{i}")
    }

    /// Property of a single-edge pattern.
    pub fn single_property(&self) -> Option<&Arc<str>> {
        match self.graph.edges() {
            [e] if e.subject != e.object => e.label.as_property(),
            _ => None,
        }
    }
}

impl PartialOrd for Pattern {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Orders by edge count, then canonical code.
impl Ord for Pattern {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.edge_count(), &self.code).cmp(&(other.edge_count(), &other.code))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrequentPattern {
    pub pattern: Pattern,
    pub acc: usize,
}

/// A mined pattern with its access frequency and its footprint on the hot graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternStats {
    pub pattern: Pattern,
    pub acc: usize,
    /// `|⟦p⟧|` over the hot graph.
    pub match_count: usize,
    /// Distinct hot edges covered by those matches.
    pub match_edge_count: usize,
}

impl PatternStats {
    pub fn measure(fp: FrequentPattern, hot: &RdfGraph) -> Self {
        let m = evaluate(fp.pattern.graph(), hot);
        let edges: BTreeSet<_> = m
            .rows()
            .iter()
            .flat_map(|r| instantiate(fp.pattern.graph(), m.variables(), r))
            .collect();
        PatternStats { pattern: fp.pattern, acc: fp.acc, match_count: m.len(), match_edge_count: edges.len() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MinerConfig {
    pub min_sup: usize,
    pub max_pattern_edges: usize,
}

impl Default for MinerConfig {
    fn default() -> Self {
        MinerConfig { min_sup: 1, max_pattern_edges: 4 }
    }
}

/// `use(Q, p)`: 1 when `p` is an edge-injective subgraph of the normalized query.
pub fn usage(q: &QueryGraph, p: &Pattern) -> usize {
    contains_pattern(&normalize(q), p.graph()) as usize
}

/// `acc(p)`: number of workload queries (duplicates included) containing `p`.
pub fn access_frequency(workload: &Workload, p: &Pattern) -> usize {
    workload.queries().iter().map(|q| usage(q, p)).sum()
}

/// Normalized workload with repeated shapes folded into weights.
pub(crate) struct WeightedShapes {
    pub shapes: Vec<(QueryGraph, usize)>,
}

impl WeightedShapes {
    pub fn new(workload: &Workload) -> Self {
        let mut index: BTreeMap<String, usize> = BTreeMap::new();
        let mut shapes: Vec<(QueryGraph, usize)> = Vec::new();
        for q in workload.queries() {
            let n = normalize(q);
            let key = n.to_string();
            match index.get(&key) {
                Some(&i) => shapes[i].1 += 1,
                None => {
                    index.insert(key, shapes.len());
                    shapes.push((n, 1));
                }
            }
        }
        WeightedShapes { shapes }
    }

    /// Shape indices containing `p`, restricted to `among`.
    pub fn support(&self, p: &Pattern, among: impl IntoIterator<Item = usize>) -> Vec<usize> {
        among.into_iter().filter(|&i| contains_pattern(&self.shapes[i].0, p.graph())).collect()
    }

    pub fn weight(&self, support: &[usize]) -> usize {
        support.iter().map(|&i| self.shapes[i].1).sum()
    }
}

/// Mines every connected, loop-free, all-variable pattern over
/// `frequent_properties` with `1..=max_pattern_edges` edges and
/// `acc >= min_sup`. Every single-edge pattern of a frequent property is
/// returned regardless of its frequency. Sorted by `(edge count, code)`.
pub fn mine_frequent_patterns(
    workload: &Workload,
    frequent_properties: &BTreeSet<Arc<str>>,
    cfg: MinerConfig,
) -> Vec<FrequentPattern> {
    assert!(cfg.min_sup >= 1, "minSup must be at least 1");
    let shapes = WeightedShapes::new(workload);
    let all: Vec<usize> = (0..shapes.shapes.len()).collect();

    let mut out: BTreeMap<Pattern, usize> = BTreeMap::new();
    let mut level: Vec<(Pattern, Vec<usize>)> = Vec::new();
    for prop in frequent_properties {
        let p = Pattern::single_edge(prop);
        let support = shapes.support(&p, all.iter().copied());
        let acc = shapes.weight(&support);
        out.insert(p.clone(), acc);
        if acc >= cfg.min_sup {
            level.push((p, support));
        }
    }

    for _ in 1..cfg.max_pattern_edges {
        let mut next: BTreeMap<Pattern, Vec<usize>> = BTreeMap::new();
        let mut rejected: BTreeSet<CanonicalCode> = BTreeSet::new();
        for (parent, support) in &level {
            for child in extensions(parent, frequent_properties) {
                if next.contains_key(&child) || rejected.contains(child.code()) {
                    continue;
                }
                let child_support = shapes.support(&child, support.iter().copied());
                if shapes.weight(&child_support) >= cfg.min_sup {
                    next.insert(child, child_support);
                } else {
                    rejected.insert(child.code().clone());
                }
            }
        }
        // A child reached from one frequent parent may have other, infrequent
        // parents; its support is exact either way because it is recomputed
        // against a superset of its true support.
        if next.is_empty() {
            break;
        }
        level = next.into_iter().collect();
        for (p, support) in &level {
            out.insert(p.clone(), shapes.weight(support));
        }
    }
    out.into_iter().map(|(pattern, acc)| FrequentPattern { pattern, acc }).collect()
}

/// All patterns obtained by adding one loop-free edge with a frequent label.
fn extensions(parent: &Pattern, labels: &BTreeSet<Arc<str>>) -> Vec<Pattern> {
    let n = parent.vertex_count();
    let base: Vec<TriplePattern> = parent.graph().triple_patterns().collect();
    let v = |i: usize| QVertex::Var(Pattern::variable(i));
    let mut out = Vec::new();
    for label in labels {
        let l = EdgeLabel::Property(label.clone());
        let mut candidates = Vec::new();
        for u in 0..n {
            candidates.push(TriplePattern::new(v(u), l.clone(), v(n)));
            candidates.push(TriplePattern::new(v(n), l.clone(), v(u)));
            for w in (0..n).filter(|&w| w != u) {
                candidates.push(TriplePattern::new(v(u), l.clone(), v(w)));
            }
        }
        for c in candidates {
            if base.contains(&c) {
                continue;
            }
            let mut tps = base.clone();
            tps.push(c);
            let q = QueryGraph::new(tps).expect("extension stays connected");
            out.push(Pattern::from_shape(&q).expect("fixed labels"));
        }
    }
    out
}
