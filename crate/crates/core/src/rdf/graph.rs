use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use super::Term;

/// One `⟨subject, property, object⟩` statement. Subjects are always IRIs.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub subject: Term,
    pub property: Arc<str>,
    pub object: Term,
}

impl Triple {
    /// Panics if the subject is a literal or the property is empty.
    pub fn new(subject: Term, property: &str, object: Term) -> Self {
        assert!(!subject.is_literal(), "literal subjects are not allowed");
        assert!(!property.is_empty(), "property must be non-empty");
        Triple { subject, property: Arc::from(property), object }
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <{}> {} .", self.subject, self.property, self.object)
    }
}

/// Set of edge positions returned by [`RdfGraph::lookup`].
#[derive(Debug, Clone)]
pub enum EdgeIds<'a> {
    Slice(&'a [u32]),
    One(Option<u32>),
    All(u32),
}

impl EdgeIds<'_> {
    pub fn len(&self) -> usize {
        match self {
            EdgeIds::Slice(s) => s.len(),
            EdgeIds::One(o) => o.is_some() as usize,
            EdgeIds::All(n) => *n as usize,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> Box<dyn Iterator<Item = usize> + '_> {
        match self {
            EdgeIds::Slice(s) => Box::new(s.iter().map(|&i| i as usize)),
            EdgeIds::One(o) => Box::new(o.iter().map(|&i| i as usize)),
            EdgeIds::All(n) => Box::new(0..*n as usize),
        }
    }
}

/// Immutable directed edge-labeled graph.
///
/// Edges are kept sorted by `(subject, property, object)` and are
/// duplicate-free. Property-keyed and endpoint-keyed position lists are built
/// once at construction.
#[derive(Clone, Default)]
pub struct RdfGraph {
    edges: Vec<Triple>,
    vertices: BTreeSet<Term>,
    labels: BTreeSet<Arc<str>>,
    by_prop: HashMap<Arc<str>, Vec<u32>>,
    by_prop_subj: HashMap<(Arc<str>, Term), Vec<u32>>,
    by_prop_obj: HashMap<(Arc<str>, Term), Vec<u32>>,
    by_subj: HashMap<Term, Vec<u32>>,
    by_obj: HashMap<Term, Vec<u32>>,
}

impl RdfGraph {
    pub fn new(triples: impl IntoIterator<Item = Triple>) -> Self {
        let set: BTreeSet<Triple> = triples.into_iter().collect();
        let edges: Vec<Triple> = set.into_iter().collect();
        let mut g = RdfGraph { edges, ..Default::default() };
        for (i, t) in g.edges.iter().enumerate() {
            let i = i as u32;
            g.vertices.insert(t.subject.clone());
            g.vertices.insert(t.object.clone());
            g.labels.insert(t.property.clone());
            g.by_prop.entry(t.property.clone()).or_default().push(i);
            g.by_prop_subj.entry((t.property.clone(), t.subject.clone())).or_default().push(i);
            g.by_prop_obj.entry((t.property.clone(), t.object.clone())).or_default().push(i);
            g.by_subj.entry(t.subject.clone()).or_default().push(i);
            g.by_obj.entry(t.object.clone()).or_default().push(i);
        }
        g
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Edges in `(subject, property, object)` order.
    pub fn triples(&self) -> &[Triple] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> &Triple {
        &self.edges[id]
    }

    pub fn vertices(&self) -> &BTreeSet<Term> {
        &self.vertices
    }

    pub fn labels(&self) -> &BTreeSet<Arc<str>> {
        &self.labels
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, t: &Triple) -> bool {
        self.edges.binary_search(t).is_ok()
    }

    /// Number of edges carrying `property`.
    pub fn property_count(&self, property: &str) -> usize {
        self.by_prop.get(property).map_or(0, Vec::len)
    }

    /// Positions of edges compatible with the given bound parts, using the
    /// most selective index available. Callers must still filter on any part
    /// the chosen index does not cover.
    pub fn lookup(&self, s: Option<&Term>, p: Option<&str>, o: Option<&Term>) -> EdgeIds<'_> {
        const NONE: &[u32] = &[];
        match (s, p, o) {
            (Some(s), Some(p), Some(o)) => {
                let probe = Triple { subject: s.clone(), property: Arc::from(p), object: o.clone() };
                EdgeIds::One(self.edges.binary_search(&probe).ok().map(|i| i as u32))
            }
            (Some(s), Some(p), None) => EdgeIds::Slice(
                self.by_prop_subj.get(&(Arc::from(p), s.clone())).map_or(NONE, Vec::as_slice),
            ),
            (None, Some(p), Some(o)) => EdgeIds::Slice(
                self.by_prop_obj.get(&(Arc::from(p), o.clone())).map_or(NONE, Vec::as_slice),
            ),
            (None, Some(p), None) => EdgeIds::Slice(self.by_prop.get(p).map_or(NONE, Vec::as_slice)),
            (Some(s), None, Some(o)) => {
                let a = self.by_subj.get(s).map_or(NONE, Vec::as_slice);
                let b = self.by_obj.get(o).map_or(NONE, Vec::as_slice);
                EdgeIds::Slice(if a.len() <= b.len() { a } else { b })
            }
            (Some(s), None, None) => EdgeIds::Slice(self.by_subj.get(s).map_or(NONE, Vec::as_slice)),
            (None, None, Some(o)) => EdgeIds::Slice(self.by_obj.get(o).map_or(NONE, Vec::as_slice)),
            (None, None, None) => EdgeIds::All(self.edges.len() as u32),
        }
    }

    /// Subgraph keeping the edges accepted by `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&Triple) -> bool) -> RdfGraph {
        RdfGraph::new(self.edges.iter().filter(|t| keep(t)).cloned())
    }

    /// Union of edges; duplicates collapse.
    pub fn union<'a>(graphs: impl IntoIterator<Item = &'a RdfGraph>) -> RdfGraph {
        RdfGraph::new(graphs.into_iter().flat_map(|g| g.edges.iter().cloned()))
    }
}

impl PartialEq for RdfGraph {
    fn eq(&self, other: &Self) -> bool {
        self.edges == other.edges
    }
}

impl Eq for RdfGraph {}

impl fmt::Debug for RdfGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RdfGraph")
            .field("vertices", &self.vertices.len())
            .field("edges", &self.edges)
            .finish()
    }
}

impl FromIterator<Triple> for RdfGraph {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        RdfGraph::new(iter)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str, p: &str, o: &str) -> Triple {
        Triple::new(Term::iri(s), p, Term::iri(o))
    }

    #[test]
    fn duplicates_collapse_and_index_agrees() {
        let g = RdfGraph::new(vec![t("a", "p", "b"), t("a", "p", "b"), t("a", "q", "c"), t("d", "p", "b")]);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.lookup(None, Some("p"), None).len(), 2);
        assert_eq!(g.lookup(Some(&Term::iri("a")), None, None).len(), 2);
        assert_eq!(g.lookup(None, Some("p"), Some(&Term::iri("b"))).len(), 2);
        assert_eq!(g.lookup(Some(&Term::iri("a")), Some("p"), Some(&Term::iri("b"))).len(), 1);
        assert_eq!(g.lookup(Some(&Term::iri("z")), Some("p"), None).len(), 0);
        assert_eq!(g.lookup(None, None, None).len(), 3);
    }

    #[test]
    #[should_panic]
    fn literal_subject_panics() {
        Triple::new(Term::literal("x"), "p", Term::iri("o"));
    }
}
