//! Seeded generators for random graphs and workloads.
//!
//! Queries are random walks over the data graph, so most of them have at
//! least one answer. Each walk vertex stays a constant with a configurable
//! probability and becomes a variable otherwise.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::query::{EdgeLabel, QVertex, QueryGraph, TriplePattern, Workload};
use crate::rdf::{RdfGraph, Term, Triple};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GraphShape {
    pub edges: usize,
    pub vertices: usize,
    pub properties: usize,
    /// Share of edges whose object is a literal.
    pub literal_ratio: f64,
    /// Property `i` is drawn with weight `1 / (i + 1)^skew`.
    pub skew: f64,
}

impl Default for GraphShape {
    fn default() -> Self {
        GraphShape { edges: 100, vertices: 40, properties: 8, literal_ratio: 0.05, skew: 0.8 }
    }
}

pub fn property_name(i: usize) -> String {
    format!("http://example.org/p{i}")
}

fn vertex_name(i: usize) -> String {
    format!("http://example.org/n{i}")
}

/// Draws up to `shape.edges` distinct triples; fewer when duplicates collide.
pub fn random_graph(rng: &mut impl Rng, shape: &GraphShape) -> RdfGraph {
    assert!(shape.vertices >= 1 && shape.properties >= 1);
    let weights: Vec<f64> = (0..shape.properties).map(|i| 1.0 / ((i + 1) as f64).powf(shape.skew)).collect();
    let total: f64 = weights.iter().sum();
    let names: Vec<String> = (0..shape.properties).map(property_name).collect();
    let pick_prop = |rng: &mut dyn rand::RngCore| {
        let mut x = rng.gen::<f64>() * total;
        for (i, w) in weights.iter().enumerate() {
            if x < *w {
                return i;
            }
            x -= w;
        }
        weights.len() - 1
    };
    let mut triples = Vec::with_capacity(shape.edges);
    for _ in 0..shape.edges {
        let s = Term::iri(&vertex_name(rng.gen_range(0..shape.vertices)));
        let p = &names[pick_prop(rng)];
        let o = if rng.gen_bool(shape.literal_ratio.clamp(0.0, 1.0)) {
            Term::literal(&format!("v{}", rng.gen_range(0..shape.vertices)))
        } else {
            Term::iri(&vertex_name(rng.gen_range(0..shape.vertices)))
        };
        triples.push(Triple::new(s, p, o));
    }
    RdfGraph::new(triples)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WalkShape {
    pub max_edges: usize,
    /// Chance that a walk vertex is kept as a constant.
    pub constant_prob: f64,
    /// Chance that an edge label becomes a variable.
    pub variable_property_prob: f64,
}

impl Default for WalkShape {
    fn default() -> Self {
        WalkShape { max_edges: 4, constant_prob: 0.15, variable_property_prob: 0.0 }
    }
}

/// Adjacency over edge ids, built once per graph.
pub struct Walker<'g> {
    g: &'g RdfGraph,
    incident: BTreeMap<&'g Term, Vec<usize>>,
}

impl<'g> Walker<'g> {
    pub fn new(g: &'g RdfGraph) -> Self {
        let mut incident: BTreeMap<&Term, Vec<usize>> = BTreeMap::new();
        for (i, t) in g.triples().iter().enumerate() {
            incident.entry(&t.subject).or_default().push(i);
            if t.object != t.subject {
                incident.entry(&t.object).or_default().push(i);
            }
        }
        Walker { g, incident }
    }

    /// A connected query with 1 to `max_edges` edges taken from the graph.
    /// `None` for an empty graph.
    pub fn query(&self, rng: &mut impl Rng, shape: &WalkShape) -> Option<QueryGraph> {
        let triples = self.g.triples();
        if triples.is_empty() {
            return None;
        }
        let target = rng.gen_range(1..=shape.max_edges.max(1));
        let mut chosen: BTreeSet<usize> = BTreeSet::from([rng.gen_range(0..triples.len())]);
        let mut frontier: BTreeSet<&Term> = BTreeSet::new();
        let first = &triples[*chosen.first().unwrap()];
        frontier.insert(&first.subject);
        frontier.insert(&first.object);
        for _ in 1..target {
            let options: Vec<usize> = frontier
                .iter()
                .flat_map(|v| self.incident.get(v).into_iter().flatten().copied())
                .filter(|e| !chosen.contains(e))
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            let Some(&e) = options.choose(rng) else { break };
            chosen.insert(e);
            frontier.insert(&triples[e].subject);
            frontier.insert(&triples[e].object);
        }

        let mut names: BTreeMap<&Term, QVertex> = BTreeMap::new();
        let mut next_var = 0;
        let mut vertex = |t: &'g Term, rng: &mut dyn rand::RngCore| -> QVertex {
            names
                .entry(t)
                .or_insert_with(|| {
                    if rng.gen_bool(shape.constant_prob.clamp(0.0, 1.0)) {
                        QVertex::Const(t.clone())
                    } else {
                        next_var += 1;
                        QVertex::var(&format!("x{next_var}"))
                    }
                })
                .clone()
        };
        let mut tps = Vec::new();
        let mut next_pvar = 0;
        for &e in &chosen {
            let t = &triples[e];
            let s = vertex(&t.subject, rng);
            let o = vertex(&t.object, rng);
            let label = if rng.gen_bool(shape.variable_property_prob.clamp(0.0, 1.0)) {
                next_pvar += 1;
                EdgeLabel::Var(format!("?p{next_pvar}"))
            } else {
                EdgeLabel::property(&t.property)
            };
            tps.push(TriplePattern::new(s, label, o));
        }
        QueryGraph::new(tps).ok()
    }
}

/// `n` random-walk queries over `g`.
pub fn random_workload(rng: &mut impl Rng, g: &RdfGraph, n: usize, shape: &WalkShape) -> Workload {
    let walker = Walker::new(g);
    (0..n).filter_map(|_| walker.query(rng, shape)).collect()
}

/// Larger graph and workload for benchmarking: a skewed property
/// distribution over sparse vertices, and walk queries that usually pin
/// one constant so answers stay small.
pub fn bench_dataset(seed: u64, triples: usize, queries: usize) -> (RdfGraph, Workload) {
    let mut rng = rng(seed);
    let shape = GraphShape {
        edges: triples,
        vertices: (triples / 3).max(1),
        properties: 24,
        literal_ratio: 0.1,
        skew: 1.0,
    };
    let g = random_graph(&mut rng, &shape);
    let walker = Walker::new(&g);
    let walk = WalkShape { max_edges: 4, constant_prob: 0.35, variable_property_prob: 0.0 };
    let mut w = Workload::default();
    while w.len() < queries {
        if let Some(q) = walker.query(&mut rng, &walk) {
            // Keep answers bounded: multi-edge queries must pin a constant.
            if q.edge_count() == 1 || !q.is_all_variable() {
                w.push(q);
            }
        }
    }
    (g, w)
}
