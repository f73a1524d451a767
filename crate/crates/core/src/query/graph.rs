use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use super::QueryError;
use crate::rdf::Term;

/// A query vertex: a constant term or a `?`-prefixed variable.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum QVertex {
    Var(String),
    Const(Term),
}

impl QVertex {
    pub fn var(name: &str) -> Self {
        let name = if name.starts_with('?') { name.to_string() } else { format!("?{name}") };
        QVertex::Var(name)
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            QVertex::Var(v) => Some(v),
            QVertex::Const(_) => None,
        }
    }

    pub fn as_const(&self) -> Option<&Term> {
        match self {
            QVertex::Const(t) => Some(t),
            QVertex::Var(_) => None,
        }
    }
}

impl fmt::Display for QVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QVertex::Var(v) => f.write_str(v),
            QVertex::Const(t) => write!(f, "{t}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeLabel {
    Property(Arc<str>),
    Var(String),
}

impl EdgeLabel {
    pub fn property(p: &str) -> Self {
        EdgeLabel::Property(Arc::from(p))
    }

    pub fn as_property(&self) -> Option<&Arc<str>> {
        match self {
            EdgeLabel::Property(p) => Some(p),
            EdgeLabel::Var(_) => None,
        }
    }
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeLabel::Property(p) => write!(f, "<{p}>"),
            EdgeLabel::Var(v) => f.write_str(v),
        }
    }
}

/// A triple pattern before vertices are interned into a [`QueryGraph`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TriplePattern {
    pub subject: QVertex,
    pub label: EdgeLabel,
    pub object: QVertex,
}

impl TriplePattern {
    pub fn new(subject: QVertex, label: EdgeLabel, object: QVertex) -> Self {
        TriplePattern { subject, label, object }
    }
}

/// Directed edge between two vertex positions of a [`QueryGraph`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QEdge {
    pub subject: usize,
    pub label: EdgeLabel,
    pub object: usize,
}

/// A connected basic graph pattern.
///
/// Vertices are distinct and kept in first-appearance order; edges are
/// distinct and index into `vertices`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QueryGraph {
    vertices: Vec<QVertex>,
    edges: Vec<QEdge>,
}

impl QueryGraph {
    /// Builds a single connected query graph. Repeated triple patterns collapse.
    pub fn new(patterns: impl IntoIterator<Item = TriplePattern>) -> Result<Self, QueryError> {
        let mut components = Self::components(patterns)?;
        match components.len() {
            0 => Err(QueryError::Empty),
            1 => Ok(components.pop().unwrap()),
            n => Err(QueryError::Disconnected(n)),
        }
    }

    /// Splits the patterns into one query graph per connected component, in
    /// order of each component's first pattern.
    pub fn components(patterns: impl IntoIterator<Item = TriplePattern>) -> Result<Vec<Self>, QueryError> {
        let mut seen = BTreeSet::new();
        let patterns: Vec<TriplePattern> = patterns.into_iter().filter(|p| seen.insert(p.clone())).collect();
        check_variable_roles(&patterns)?;
        for p in &patterns {
            if p.subject.as_const().is_some_and(Term::is_literal) {
                return Err(QueryError::LiteralSubject(p.subject.to_string()));
            }
            if let EdgeLabel::Property(prop) = &p.label {
                if prop.is_empty() {
                    return Err(QueryError::EmptyProperty);
                }
            }
        }

        let mut index: BTreeMap<&QVertex, usize> = BTreeMap::new();
        let mut order: Vec<&QVertex> = Vec::new();
        for p in &patterns {
            for v in [&p.subject, &p.object] {
                index.entry(v).or_insert_with(|| {
                    order.push(v);
                    order.len() - 1
                });
            }
        }
        let mut parent: Vec<usize> = (0..order.len()).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while parent[r] != r {
                r = parent[r];
            }
            let mut c = x;
            while parent[c] != r {
                let next = parent[c];
                parent[c] = r;
                c = next;
            }
            r
        }
        for p in &patterns {
            let a = find(&mut parent, index[&p.subject]);
            let b = find(&mut parent, index[&p.object]);
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }

        let mut groups: Vec<(usize, Vec<&TriplePattern>)> = Vec::new();
        for p in &patterns {
            let root = find(&mut parent, index[&p.subject]);
            match groups.iter_mut().find(|(r, _)| *r == root) {
                Some((_, g)) => g.push(p),
                None => groups.push((root, vec![p])),
            }
        }
        Ok(groups
            .into_iter()
            .map(|(_, ps)| Self::assemble(ps.into_iter().cloned()))
            .collect())
    }

    /// Builds from explicit parts. Callers guarantee distinct vertices,
    /// valid distinct edges and connectivity.
    pub(crate) fn from_parts(vertices: Vec<QVertex>, edges: Vec<QEdge>) -> Self {
        debug_assert!(edges.iter().all(|e| e.subject < vertices.len() && e.object < vertices.len()));
        QueryGraph { vertices, edges }
    }

    /// Interns vertices without any connectivity check.
    pub(crate) fn assemble(patterns: impl IntoIterator<Item = TriplePattern>) -> Self {
        let mut vertices: Vec<QVertex> = Vec::new();
        let mut edges: Vec<QEdge> = Vec::new();
        let pos = |v: QVertex, vertices: &mut Vec<QVertex>| match vertices.iter().position(|x| *x == v) {
            Some(i) => i,
            None => {
                vertices.push(v);
                vertices.len() - 1
            }
        };
        for p in patterns {
            let s = pos(p.subject, &mut vertices);
            let o = pos(p.object, &mut vertices);
            let e = QEdge { subject: s, label: p.label, object: o };
            if !edges.contains(&e) {
                edges.push(e);
            }
        }
        QueryGraph { vertices, edges }
    }

    pub fn vertices(&self) -> &[QVertex] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &QVertex {
        &self.vertices[i]
    }

    pub fn edges(&self) -> &[QEdge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn triple_pattern(&self, e: usize) -> TriplePattern {
        let edge = &self.edges[e];
        TriplePattern {
            subject: self.vertices[edge.subject].clone(),
            label: edge.label.clone(),
            object: self.vertices[edge.object].clone(),
        }
    }

    pub fn triple_patterns(&self) -> impl Iterator<Item = TriplePattern> + '_ {
        (0..self.edges.len()).map(|e| self.triple_pattern(e))
    }

    /// All variable names (vertex and property positions), sorted.
    pub fn variables(&self) -> Vec<String> {
        let mut vars: BTreeSet<String> = self.vertices.iter().filter_map(|v| v.as_var().map(str::to_string)).collect();
        for e in &self.edges {
            if let EdgeLabel::Var(v) = &e.label {
                vars.insert(v.clone());
            }
        }
        vars.into_iter().collect()
    }

    /// Fixed property labels used by the query.
    pub fn properties(&self) -> BTreeSet<Arc<str>> {
        self.edges.iter().filter_map(|e| e.label.as_property().cloned()).collect()
    }

    pub fn has_variable_property(&self) -> bool {
        self.edges.iter().any(|e| matches!(e.label, EdgeLabel::Var(_)))
    }

    pub fn is_all_variable(&self) -> bool {
        self.vertices.iter().all(|v| matches!(v, QVertex::Var(_)))
    }

    /// The subquery formed by the given edges, or `None` when it is empty or
    /// disconnected.
    pub fn edge_subgraph(&self, edges: &[usize]) -> Option<QueryGraph> {
        Self::new(edges.iter().map(|&e| self.triple_pattern(e))).ok()
    }

    /// Whether the edge positions form a connected subgraph.
    pub fn edges_connected(&self, edges: &[usize]) -> bool {
        if edges.is_empty() {
            return false;
        }
        let mut reached: BTreeSet<usize> = BTreeSet::new();
        let mut done = vec![false; edges.len()];
        done[0] = true;
        reached.insert(self.edges[edges[0]].subject);
        reached.insert(self.edges[edges[0]].object);
        let mut progress = true;
        while progress {
            progress = false;
            for (k, &e) in edges.iter().enumerate() {
                if done[k] {
                    continue;
                }
                let edge = &self.edges[e];
                if reached.contains(&edge.subject) || reached.contains(&edge.object) {
                    reached.insert(edge.subject);
                    reached.insert(edge.object);
                    done[k] = true;
                    progress = true;
                }
            }
        }
        done.iter().all(|&d| d)
    }
}

fn check_variable_roles(patterns: &[TriplePattern]) -> Result<(), QueryError> {
    let vertex_vars: BTreeSet<&str> = patterns
        .iter()
        .flat_map(|p| [p.subject.as_var(), p.object.as_var()])
        .flatten()
        .collect();
    for p in patterns {
        if let EdgeLabel::Var(v) = &p.label {
            if vertex_vars.contains(v.as_str()) {
                return Err(QueryError::VariableRoleConflict(v.clone()));
            }
        }
    }
    Ok(())
}

impl fmt::Display for QueryGraph {
    /// Renders as `SELECT * WHERE { ... }`, re-parseable by [`super::parse_query`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SELECT * WHERE {")?;
        for (i, e) in self.edges.iter().enumerate() {
            if i > 0 {
                f.write_str(" .")?;
            }
            write!(f, " {} {} {}", self.vertices[e.subject], e.label, self.vertices[e.object])?;
        }
        f.write_str(" }")
    }
}

/// An ordered multiset of queries; repeats carry demand.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Workload {
    queries: Vec<QueryGraph>,
}

impl Workload {
    pub fn new(queries: Vec<QueryGraph>) -> Self {
        Workload { queries }
    }

    pub fn queries(&self) -> &[QueryGraph] {
        &self.queries
    }

    pub fn len(&self) -> usize {
        self.queries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queries.is_empty()
    }

    pub fn push(&mut self, q: QueryGraph) {
        self.queries.push(q);
    }
}

impl FromIterator<QueryGraph> for Workload {
    fn from_iter<I: IntoIterator<Item = QueryGraph>>(iter: I) -> Self {
        Workload { queries: iter.into_iter().collect() }
    }
}
