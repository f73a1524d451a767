//! Brute-force oracles and instance generators shared by the integration
//! tests. Nothing here calls the library's matcher, miner or optimizer.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rdffrag::query::{EdgeLabel, QVertex, QueryGraph, Workload};
use rdffrag::rdf::{RdfGraph, Term, Triple};
use rdffrag::synth::{random_graph, random_workload, GraphShape, WalkShape};

/// Answers of `q` on `g` by extending partial bindings one edge at a time
/// over a full scan of the triples. Rows follow the sorted variable names.
pub fn naive_eval(q: &QueryGraph, g: &RdfGraph) -> (Vec<String>, BTreeSet<Vec<Term>>) {
    let mut partial: Vec<BTreeMap<String, Term>> = vec![BTreeMap::new()];
    for e in connected_order(q).into_iter().map(|i| &q.edges()[i]) {
        let mut next = Vec::new();
        for b in &partial {
            for t in g.triples() {
                let mut b2 = b.clone();
                if bind_vertex(q.vertex(e.subject), &t.subject, &mut b2)
                    && bind_label(&e.label, t, &mut b2)
                    && bind_vertex(q.vertex(e.object), &t.object, &mut b2)
                {
                    next.push(b2);
                }
            }
        }
        partial = next;
    }
    let vars: BTreeSet<String> = partial.iter().flat_map(|b| b.keys().cloned()).chain(q.variables()).collect();
    let vars: Vec<String> = vars.into_iter().collect();
    let rows = partial.into_iter().map(|b| vars.iter().map(|v| b[v].clone()).collect()).collect();
    (vars, rows)
}

/// Edge indices arranged so each edge touches an earlier one when possible.
fn connected_order(q: &QueryGraph) -> Vec<usize> {
    let mut order = Vec::new();
    let mut seen = BTreeSet::new();
    let mut left: Vec<usize> = (0..q.edge_count()).collect();
    while !left.is_empty() {
        let pos = left
            .iter()
            .position(|&i| seen.contains(&q.edges()[i].subject) || seen.contains(&q.edges()[i].object))
            .unwrap_or(0);
        let i = left.remove(pos);
        seen.insert(q.edges()[i].subject);
        seen.insert(q.edges()[i].object);
        order.push(i);
    }
    order
}

fn bind_vertex(v: &QVertex, t: &Term, b: &mut BTreeMap<String, Term>) -> bool {
    match v {
        QVertex::Const(c) => c == t,
        QVertex::Var(name) => bind(name, t.clone(), b),
    }
}

fn bind_label(l: &EdgeLabel, t: &Triple, b: &mut BTreeMap<String, Term>) -> bool {
    match l {
        EdgeLabel::Property(p) => **p == *t.property,
        EdgeLabel::Var(name) => bind(name, Term::iri(&t.property), b),
    }
}

fn bind(name: &str, t: Term, b: &mut BTreeMap<String, Term>) -> bool {
    match b.get(name) {
        Some(x) => *x == t,
        None => {
            b.insert(name.to_string(), t);
            true
        }
    }
}

/// Whether some injective assignment of pattern edges to query edges keeps
/// labels and a consistent vertex mapping.
pub fn oracle_contains(q: &QueryGraph, p: &QueryGraph) -> bool {
    fn go(q: &QueryGraph, p: &QueryGraph, k: usize, used: &mut Vec<bool>, map: &mut BTreeMap<usize, usize>) -> bool {
        if k == p.edge_count() {
            return true;
        }
        let pe = &p.edges()[k];
        for (f, qe) in q.edges().iter().enumerate() {
            if used[f] || qe.label != pe.label || matches!(qe.label, EdgeLabel::Var(_)) {
                continue;
            }
            let mut m2 = map.clone();
            let ok = [(pe.subject, qe.subject), (pe.object, qe.object)]
                .into_iter()
                .all(|(a, b)| *m2.entry(a).or_insert(b) == b);
            if ok {
                used[f] = true;
                if go(q, p, k + 1, used, &mut m2) {
                    return true;
                }
                used[f] = false;
            }
        }
        false
    }
    go(q, p, 0, &mut vec![false; q.edge_count()], &mut BTreeMap::new())
}

/// `Σ_Q max_{p} |E(p)| · [p ⊆ Q]`.
pub fn oracle_benefit(patterns: &[&QueryGraph], w: &Workload) -> usize {
    w.queries()
        .iter()
        .map(|q| patterns.iter().filter(|p| oracle_contains(q, p)).map(|p| p.edge_count()).max().unwrap_or(0))
        .sum()
}

/// Edge sets as plain triples.
pub fn triples(g: &RdfGraph) -> BTreeSet<Triple> {
    g.triples().iter().cloned().collect()
}

/// Whether the given edges of `q` form one connected piece.
pub fn oracle_connected(q: &QueryGraph, edges: &[usize]) -> bool {
    let Some(&first) = edges.first() else { return false };
    let mut reached: BTreeSet<usize> = [q.edges()[first].subject, q.edges()[first].object].into();
    let mut left: Vec<usize> = edges[1..].to_vec();
    loop {
        let before = left.len();
        left.retain(|&e| {
            let ed = &q.edges()[e];
            if reached.contains(&ed.subject) || reached.contains(&ed.object) {
                reached.insert(ed.subject);
                reached.insert(ed.object);
                false
            } else {
                true
            }
        });
        if left.is_empty() {
            return true;
        }
        if left.len() == before {
            return false;
        }
    }
}

/// Minimum `Σ_{k≥2} Π_{i≤k} cards[order[i]]` over every permutation; the
/// lone card when there is one.
pub fn oracle_join_cost(cards: &[u128]) -> u128 {
    fn perms(rest: &mut Vec<u128>, prefix: u128, acc: u128, depth: usize, best: &mut u128) {
        if rest.is_empty() {
            *best = (*best).min(acc);
            return;
        }
        for i in 0..rest.len() {
            let c = rest.remove(i);
            let p = prefix.saturating_mul(c);
            let a = if depth == 0 { acc } else { acc.saturating_add(p) };
            perms(rest, p, a, depth + 1, best);
            rest.insert(i, c);
        }
    }
    match cards {
        [] => 0,
        [c] => *c,
        _ => {
            let mut best = u128::MAX;
            perms(&mut cards.to_vec(), 1, 0, 0, &mut best);
            best
        }
    }
}

/// A small random graph and walk workload within the acceptance bounds:
/// at most 200 edges over 8 properties and at most 20 queries of up to 4
/// edges, some with constants and a few with variable properties.
pub fn small_instance(rng: &mut impl Rng) -> (RdfGraph, Workload) {
    let shape = GraphShape {
        edges: rng.gen_range(20..=200),
        vertices: rng.gen_range(8..=60),
        properties: 8,
        literal_ratio: 0.05,
        skew: 0.8,
    };
    let g = random_graph(rng, &shape);
    let walk = WalkShape { max_edges: 4, constant_prob: 0.25, variable_property_prob: 0.04 };
    let n = rng.gen_range(3..=20);
    let w = random_workload(rng, &g, n, &walk);
    (g, w)
}

/// Random walk queries plus a few that the workload never mentions.
pub fn probe_queries(rng: &mut impl Rng, g: &RdfGraph, n: usize, max_edges: usize) -> Vec<QueryGraph> {
    let walk = WalkShape { max_edges, constant_prob: 0.3, variable_property_prob: 0.05 };
    let mut out: Vec<QueryGraph> = random_workload(rng, g, n, &walk).queries().to_vec();
    out.extend(
        rdffrag::query::parse_query("SELECT * WHERE { ?a <http://example.org/none> ?b . ?a <http://example.org/p0> ?c }")
            .unwrap(),
    );
    out
}

/// Data edges touched by some match of `p`, found by brute force.
pub fn oracle_footprint(p: &QueryGraph, g: &RdfGraph) -> BTreeSet<Triple> {
    let (vars, rows) = naive_eval(p, g);
    let col = |name: &str| vars.iter().position(|v| v == name).expect("bound variable");
    let term = |row: &Vec<Term>, v: &QVertex| match v {
        QVertex::Var(name) => row[col(name)].clone(),
        QVertex::Const(c) => c.clone(),
    };
    let mut out = BTreeSet::new();
    for row in &rows {
        for e in p.edges() {
            let prop = e.label.as_property().expect("patterns have fixed labels");
            out.insert(Triple::new(term(row, p.vertex(e.subject)), prop, term(row, p.vertex(e.object))));
        }
    }
    out
}
