//! Homomorphic subgraph matching.
//!
//! [`evaluate`] computes `⟦Q⟧_G` with full homomorphism semantics: vertex
//! maps need not be injective, constants map to themselves and variable
//! properties match any label. [`embeddings`] maps one query graph into another
//! with distinct edge images, which is the containment test behind pattern
//! usage values.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use crate::query::{EdgeLabel, QVertex, QueryGraph};
use crate::rdf::{RdfGraph, Term, Triple};

/// One match, keyed by variable name.
pub type Binding = BTreeMap<String, Term>;

/// A set of matches stored as rows over a sorted variable header.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MatchSet {
    variables: Vec<String>,
    rows: BTreeSet<Vec<Term>>,
}

impl MatchSet {
    /// `variables` must be sorted and every row must have the same width.
    pub fn from_rows(variables: Vec<String>, rows: BTreeSet<Vec<Term>>) -> Self {
        debug_assert!(variables.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(rows.iter().all(|r| r.len() == variables.len()));
        MatchSet { variables, rows }
    }

    pub fn empty(variables: Vec<String>) -> Self {
        MatchSet { variables, rows: BTreeSet::new() }
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn rows(&self) -> &BTreeSet<Vec<Term>> {
        &self.rows
    }

    pub fn into_rows(self) -> BTreeSet<Vec<Term>> {
        self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn bindings(&self) -> impl Iterator<Item = Binding> + '_ {
        self.rows
            .iter()
            .map(|r| self.variables.iter().cloned().zip(r.iter().cloned()).collect())
    }

    pub fn column(&self, var: &str) -> Option<usize> {
        self.variables.binary_search_by(|v| v.as_str().cmp(var)).ok()
    }

    /// Tab-separated table: header of variables, then rows in sorted order.
    pub fn to_table(&self) -> String {
        let mut out = self.variables.join("\t");
        out.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(Term::to_string).collect();
            out.push_str(&cells.join("\t"));
            out.push('\n');
        }
        out
    }
}

/// Data edges that a binding row of `q` maps onto.
pub fn instantiate(q: &QueryGraph, variables: &[String], row: &[Term]) -> Vec<Triple> {
    let lookup = |name: &str| -> &Term {
        let i = variables.binary_search_by(|v| v.as_str().cmp(name)).expect("row covers query variables");
        &row[i]
    };
    let vertex = |v: &QVertex| -> Term {
        match v {
            QVertex::Var(name) => lookup(name).clone(),
            QVertex::Const(t) => t.clone(),
        }
    };
    q.edges()
        .iter()
        .map(|e| {
            let property: Arc<str> = match &e.label {
                EdgeLabel::Property(p) => p.clone(),
                EdgeLabel::Var(name) => Arc::from(lookup(name).lexical()),
            };
            Triple { subject: vertex(q.vertex(e.subject)), property, object: vertex(q.vertex(e.object)) }
        })
        .collect()
}

enum Slot {
    Vertex(usize),
    Label(String),
}

struct Evaluation<'a> {
    q: &'a QueryGraph,
    g: &'a RdfGraph,
    vertex: Vec<Option<Term>>,
    label: HashMap<String, Arc<str>>,
    done: Vec<bool>,
    slots: Vec<Slot>,
    out: BTreeSet<Vec<Term>>,
}

impl<'a> Evaluation<'a> {
    fn bound_parts(&self, e: usize) -> (Option<Term>, Option<Arc<str>>, Option<Term>) {
        let edge = &self.q.edges()[e];
        let p = match &edge.label {
            EdgeLabel::Property(p) => Some(p.clone()),
            EdgeLabel::Var(v) => self.label.get(v).cloned(),
        };
        (self.vertex[edge.subject].clone(), p, self.vertex[edge.object].clone())
    }

    fn search(&mut self, remaining: usize) {
        if remaining == 0 {
            let row = self
                .slots
                .iter()
                .map(|s| match s {
                    Slot::Vertex(i) => self.vertex[*i].clone().expect("all vertices bound"),
                    Slot::Label(v) => Term::Iri(self.label[v].clone()),
                })
                .collect();
            self.out.insert(row);
            return;
        }

        // Most constrained pattern first.
        let mut best: Option<(usize, usize)> = None;
        for e in (0..self.done.len()).filter(|&e| !self.done[e]) {
            let (s, p, o) = self.bound_parts(e);
            let n = self.g.lookup(s.as_ref(), p.as_deref(), o.as_ref()).len();
            if best.is_none_or(|(_, m)| n < m) {
                best = Some((e, n));
            }
            if n == 0 {
                return;
            }
        }
        let (e, _) = best.expect("remaining > 0");
        let (s, p, o) = self.bound_parts(e);
        let edge = self.q.edges()[e].clone();
        let ids: Vec<usize> = self.g.lookup(s.as_ref(), p.as_deref(), o.as_ref()).iter().collect();

        self.done[e] = true;
        for id in ids {
            let t = self.g.edge(id);
            if p.as_ref().is_some_and(|p| *p != t.property)
                || s.as_ref().is_some_and(|s| *s != t.subject)
                || o.as_ref().is_some_and(|o| *o != t.object)
            {
                continue;
            }
            if edge.subject == edge.object && t.subject != t.object {
                continue;
            }
            let set_s = s.is_none();
            let set_o = o.is_none() && edge.subject != edge.object;
            let set_p = p.is_none();
            if set_s {
                self.vertex[edge.subject] = Some(t.subject.clone());
            }
            if set_o {
                self.vertex[edge.object] = Some(t.object.clone());
            }
            if let (true, EdgeLabel::Var(v)) = (set_p, &edge.label) {
                self.label.insert(v.clone(), t.property.clone());
            }
            self.search(remaining - 1);
            if set_s {
                self.vertex[edge.subject] = None;
            }
            if set_o {
                self.vertex[edge.object] = None;
            }
            if let (true, EdgeLabel::Var(v)) = (set_p, &edge.label) {
                self.label.remove(v);
            }
        }
        self.done[e] = false;
    }
}

/// All homomorphic matches of `q` in `g`, projected onto the query's variables.
pub fn evaluate(q: &QueryGraph, g: &RdfGraph) -> MatchSet {
    let variables = q.variables();
    let slots = variables
        .iter()
        .map(|name| match q.vertices().iter().position(|v| v.as_var() == Some(name.as_str())) {
            Some(i) => Slot::Vertex(i),
            None => Slot::Label(name.clone()),
        })
        .collect();
    let mut ev = Evaluation {
        q,
        g,
        vertex: q.vertices().iter().map(|v| v.as_const().cloned()).collect(),
        label: HashMap::new(),
        done: vec![false; q.edge_count()],
        slots,
        out: BTreeSet::new(),
    };
    ev.search(q.edge_count());
    MatchSet { variables, rows: ev.out }
}

/// Edge-injective homomorphisms from `pattern` into `target`, as vertex maps
/// (`map[i]` is the target vertex for pattern vertex `i`).
///
/// Pattern edges must carry fixed properties; target edges with variable
/// properties are never matched. Vertex kinds are ignored on both sides.
pub fn embeddings(pattern: &QueryGraph, target: &QueryGraph) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    embed(pattern, target, &mut |m| {
        out.push(m.to_vec());
        true
    });
    out
}

/// Whether `pattern` is an edge-injective homomorphic subgraph of `q`.
pub fn contains_pattern(q: &QueryGraph, pattern: &QueryGraph) -> bool {
    if pattern.edge_count() > q.edge_count() {
        return false;
    }
    let mut found = false;
    embed(pattern, q, &mut |_| {
        found = true;
        false
    });
    found
}

/// Runs `visit` on each embedding until it returns `false`.
pub(crate) fn embed(pattern: &QueryGraph, target: &QueryGraph, visit: &mut dyn FnMut(&[usize]) -> bool) {
    if pattern.edge_count() == 0 || pattern.edge_count() > target.edge_count() {
        return;
    }
    // Connected edge order so each step extends an already mapped vertex.
    let mut order: Vec<usize> = vec![0];
    let mut seen_v: BTreeSet<usize> = [pattern.edges()[0].subject, pattern.edges()[0].object].into();
    while order.len() < pattern.edge_count() {
        let next = (0..pattern.edge_count())
            .filter(|e| !order.contains(e))
            .find(|&e| {
                let ed = &pattern.edges()[e];
                seen_v.contains(&ed.subject) || seen_v.contains(&ed.object)
            })
            .unwrap_or_else(|| (0..pattern.edge_count()).find(|e| !order.contains(e)).unwrap());
        seen_v.insert(pattern.edges()[next].subject);
        seen_v.insert(pattern.edges()[next].object);
        order.push(next);
    }

    struct St<'a> {
        p: &'a QueryGraph,
        t: &'a QueryGraph,
        order: Vec<usize>,
        map: Vec<Option<usize>>,
        used: Vec<bool>,
    }
    fn go(st: &mut St, k: usize, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if k == st.order.len() {
            let full: Vec<usize> = st.map.iter().map(|m| m.expect("connected pattern")).collect();
            return visit(&full);
        }
        let pe = st.p.edges()[st.order[k]].clone();
        for f in 0..st.t.edge_count() {
            if st.used[f] {
                continue;
            }
            let te = &st.t.edges()[f];
            if !matches!((&pe.label, &te.label), (EdgeLabel::Property(a), EdgeLabel::Property(b)) if a == b) {
                continue;
            }
            if st.map[pe.subject].is_some_and(|m| m != te.subject) || st.map[pe.object].is_some_and(|m| m != te.object) {
                continue;
            }
            if pe.subject == pe.object && te.subject != te.object {
                continue;
            }
            let set_s = st.map[pe.subject].is_none();
            st.map[pe.subject] = Some(te.subject);
            let set_o = st.map[pe.object].is_none();
            st.map[pe.object] = Some(te.object);
            st.used[f] = true;
            let cont = go(st, k + 1, visit);
            st.used[f] = false;
            if set_s {
                st.map[pe.subject] = None;
            }
            if set_o {
                st.map[pe.object] = None;
            }
            if !cont {
                return false;
            }
        }
        true
    }
    let mut st = St {
        p: pattern,
        t: target,
        order,
        map: vec![None; pattern.vertex_count()],
        used: vec![false; target.edge_count()],
    };
    go(&mut st, 0, visit);
}

/// The subgraph of `g` made of every edge that some match of `p` maps onto.
pub fn match_induced_subgraph(p: &QueryGraph, g: &RdfGraph) -> RdfGraph {
    let m = evaluate(p, g);
    RdfGraph::new(m.rows().iter().flat_map(|r| instantiate(p, m.variables(), r)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::query::parse_query;
    use crate::rdf::parse_ntriples;

    const G0: &str = include_str!("../fixtures/g0.nt");

    fn q(text: &str) -> QueryGraph {
        parse_query(text).unwrap().remove(0)
    }

    #[test]
    fn single_edge_scan() {
        let g = parse_ntriples(G0).unwrap();
        let m = evaluate(&q("SELECT * WHERE { ?x <influencedBy> ?y }"), &g);
        assert_eq!(m.variables(), ["?x", "?y"]);
        let rows: Vec<Vec<Term>> = m.rows().iter().cloned().collect();
        assert_eq!(
            rows,
            vec![vec![Term::iri("a1"), Term::iri("a2")], vec![Term::iri("a2"), Term::iri("a3")]]
        );
    }

    #[test]
    fn subject_star() {
        let g = parse_ntriples(G0).unwrap();
        let m = evaluate(&q("SELECT * WHERE { ?x <influencedBy> ?y . ?x <mainInterest> ?z }"), &g);
        let rows: Vec<Vec<Term>> = m.rows().iter().cloned().collect();
        assert_eq!(
            rows,
            vec![
                vec![Term::iri("a1"), Term::iri("a2"), Term::iri("m1")],
                vec![Term::iri("a2"), Term::iri("a3"), Term::iri("m1")],
            ]
        );
    }

    #[test]
    fn constants_and_variable_properties() {
        let g = parse_ntriples(G0).unwrap();
        let m = evaluate(&q("SELECT * WHERE { <a1> ?p ?o }"), &g);
        assert_eq!(m.len(), 3);
        let m = evaluate(&q("SELECT * WHERE { ?x <name> \"Aristotle\" }"), &g);
        assert_eq!(m.bindings().next().unwrap()["?x"], Term::iri("a1"));
        assert!(evaluate(&q("SELECT * WHERE { ?x <name> \"Plato\" }"), &g).is_empty());
    }

    #[test]
    fn self_loop_query_needs_loop_edge() {
        let g = parse_ntriples("<a> <p> <a> .\n<a> <p> <b> .").unwrap();
        assert_eq!(evaluate(&q("SELECT * WHERE { ?x <p> ?x }"), &g).len(), 1);
    }

    #[test]
    fn containment_is_edge_injective() {
        let q1 = q("SELECT * WHERE { ?x <influencedBy> ?y . ?x <mainInterest> ?z }");
        let single = q("SELECT * WHERE { ?a <influencedBy> ?b }");
        let chained = q("SELECT * WHERE { ?a <influencedBy> ?b . ?b <mainInterest> ?c }");
        let doubled = q("SELECT * WHERE { ?a <influencedBy> ?b . ?c <influencedBy> ?b }");
        assert!(contains_pattern(&q1, &single));
        assert!(!contains_pattern(&q1, &chained));
        assert!(!contains_pattern(&q1, &doubled));
        assert!(contains_pattern(&q1, &q1));
        assert_eq!(embeddings(&single, &q1).len(), 1);
    }

    #[test]
    fn induced_subgraphs() {
        let g = parse_ntriples(G0).unwrap();
        let pb = q("SELECT * WHERE { ?x <influencedBy> ?y . ?x <mainInterest> ?z }");
        assert_eq!(match_induced_subgraph(&pb, &g).edge_count(), 4);
        let main = q("SELECT * WHERE { ?x <mainInterest> ?z }");
        assert_eq!(match_induced_subgraph(&main, &g).edge_count(), 3);
        assert!(match_induced_subgraph(&main, &RdfGraph::empty()).is_empty());
    }
}
