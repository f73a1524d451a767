//! Minimum DFS codes for all-variable query shapes.
//!
//! A DFS code lists the edges of a connected graph in the order a depth-first
//! traversal visits them. Each entry is `(from, to, direction, label)`, where
//! `from`/`to` are discovery indices and the direction says whether the data
//! edge points from `from` to `to` (`+`) or back (`-`). At every vertex all
//! edges back to already discovered vertices are listed before the traversal
//! moves on. The canonical code is the lexicographically smallest such
//! sequence; it is built greedily because every partial traversal can be
//! completed.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::query::{EdgeLabel, QueryGraph};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalCode(String);

impl CanonicalCode {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Accepts any string that parses as a code.
    pub fn parse(text: &str) -> Result<Self, CodeError> {
        parse_entries(text)?;
        Ok(CanonicalCode(text.to_string()))
    }

    pub fn entries(&self) -> Vec<CodeEntry> {
        parse_entries(&self.0).expect("validated at construction")
    }

    pub fn edge_count(&self) -> usize {
        self.entries().len()
    }
}

impl fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed canonical code at byte {pos}: {message}")]
pub struct CodeError {
    pub pos: usize,
    pub message: String,
}

/// One DFS code entry.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CodeEntry {
    pub from: usize,
    pub to: usize,
    /// `true` when the data edge points from `from` to `to`.
    pub forward: bool,
    pub label: Arc<str>,
}

impl CodeEntry {
    fn key(&self) -> (usize, usize, u8, &str) {
        (self.from, self.to, if self.forward { 0 } else { 1 }, &self.label)
    }

    /// `(subject, object)` discovery indices.
    pub fn endpoints(&self) -> (usize, usize) {
        if self.forward {
            (self.from, self.to)
        } else {
            (self.to, self.from)
        }
    }
}

impl fmt::Display for CodeEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = if self.forward { '+' } else { '-' };
        write!(f, "({},{},{},<{}>)", self.from, self.to, d, self.label)
    }
}

fn parse_entries(text: &str) -> Result<Vec<CodeEntry>, CodeError> {
    let err = |pos: usize, m: &str| CodeError { pos, message: m.to_string() };
    let mut out = Vec::new();
    let mut pos = 0;
    let bytes = text.as_bytes();
    while pos < text.len() {
        if bytes[pos] != b'(' {
            return Err(err(pos, "expected '('"));
        }
        let close = text[pos..].find(">)").ok_or_else(|| err(pos, "unterminated entry"))? + pos;
        let body = &text[pos + 1..close + 1];
        let mut parts = body.splitn(4, ',');
        let mut num = |what: &str| -> Result<usize, CodeError> {
            parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| err(pos, &format!("bad {what} index")))
        };
        let from = num("from")?;
        let to = num("to")?;
        let forward = match parts.next() {
            Some("+") => true,
            Some("-") => false,
            _ => return Err(err(pos, "bad direction")),
        };
        let label = parts
            .next()
            .and_then(|l| l.strip_prefix('<'))
            .and_then(|l| l.strip_suffix('>'))
            .filter(|l| !l.is_empty())
            .ok_or_else(|| err(pos, "bad label"))?;
        out.push(CodeEntry { from, to, forward, label: Arc::from(label) });
        pos = close + 2;
    }
    if out.is_empty() {
        return Err(err(0, "empty code"));
    }
    // Each entry must touch a discovered vertex and grow indices by one.
    let mut seen = 1usize;
    for (i, e) in out.iter().enumerate() {
        if e.from >= seen || e.to > seen {
            return Err(err(0, &format!("entry {i} is not a DFS step")));
        }
        if e.to == seen {
            seen += 1;
        }
    }
    Ok(out)
}

/// Canonical code plus the vertex visited at each discovery index.
#[derive(Clone, Debug)]
pub struct CanonicalForm {
    pub code: CanonicalCode,
    pub entries: Vec<CodeEntry>,
    /// `order[i]` is the graph vertex with discovery index `i`.
    pub order: Vec<usize>,
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct State {
    disc: Vec<Option<usize>>,
    order: Vec<usize>,
    used: Vec<bool>,
    stack: Vec<usize>,
}

struct Shape {
    n: usize,
    edges: Vec<(usize, Arc<str>, usize)>,
    incident: Vec<Vec<usize>>,
}

impl State {
    fn settle(&mut self, shape: &Shape) {
        while let Some(&top) = self.stack.last() {
            if shape.incident[top].iter().any(|&e| !self.used[e]) {
                break;
            }
            self.stack.pop();
        }
    }

    fn moves(&self, shape: &Shape) -> Vec<(CodeEntry, usize)> {
        let Some(&rm) = self.stack.last() else { return Vec::new() };
        let from = self.disc[rm].expect("stack vertices are discovered");
        let mut back = Vec::new();
        let mut fwd = Vec::new();
        for &e in &shape.incident[rm] {
            if self.used[e] {
                continue;
            }
            let (s, ref label, o) = shape.edges[e];
            let other = if s == rm { o } else { s };
            let forward = s == rm;
            match self.disc[other] {
                Some(to) => back.push((CodeEntry { from, to, forward, label: label.clone() }, e)),
                None => fwd.push((CodeEntry { from, to: self.order.len(), forward, label: label.clone() }, e)),
            }
        }
        if back.is_empty() {
            fwd
        } else {
            back
        }
    }

    fn apply(&self, shape: &Shape, e: usize) -> State {
        let mut next = self.clone();
        next.used[e] = true;
        let rm = *self.stack.last().unwrap();
        let (s, _, o) = shape.edges[e];
        let other = if s == rm { o } else { s };
        if next.disc[other].is_none() {
            next.disc[other] = Some(next.order.len());
            next.order.push(other);
            next.stack.push(other);
        }
        next.settle(shape);
        next
    }
}

/// Computes the canonical form of a connected query shape. Vertex kinds are
/// ignored. Returns `None` for empty or disconnected shapes and for shapes
/// with variable-property edges.
pub fn canonical_form(q: &QueryGraph) -> Option<CanonicalForm> {
    if q.edge_count() == 0 {
        return None;
    }
    let mut incident = vec![Vec::new(); q.vertex_count()];
    let mut edges = Vec::with_capacity(q.edge_count());
    for (i, e) in q.edges().iter().enumerate() {
        let EdgeLabel::Property(p) = &e.label else { return None };
        edges.push((e.subject, p.clone(), e.object));
        incident[e.subject].push(i);
        if e.object != e.subject {
            incident[e.object].push(i);
        }
    }
    let shape = Shape { n: q.vertex_count(), edges, incident };

    let mut states: Vec<State> = (0..shape.n)
        .filter(|&v| !shape.incident[v].is_empty())
        .map(|v| {
            let mut disc = vec![None; shape.n];
            disc[v] = Some(0);
            let mut s = State { disc, order: vec![v], used: vec![false; shape.edges.len()], stack: vec![v] };
            s.settle(&shape);
            s
        })
        .collect();

    let mut entries = Vec::with_capacity(shape.edges.len());
    for _ in 0..shape.edges.len() {
        let mut best: Option<CodeEntry> = None;
        let mut next: Vec<State> = Vec::new();
        let mut seen: HashSet<State> = HashSet::new();
        for st in &states {
            for (entry, e) in st.moves(&shape) {
                let ord = best.as_ref().map(|b| entry.key().cmp(&b.key()));
                match ord {
                    Some(std::cmp::Ordering::Greater) => continue,
                    Some(std::cmp::Ordering::Less) | None => {
                        best = Some(entry);
                        next.clear();
                        seen.clear();
                    }
                    Some(std::cmp::Ordering::Equal) => {}
                }
                let s = st.apply(&shape, e);
                if seen.insert(s.clone()) {
                    next.push(s);
                }
            }
        }
        // No move means some edge is unreachable from the start vertex.
        entries.push(best?);
        states = next;
    }
    let st = states.into_iter().next()?;
    if st.order.len() != shape.n {
        return None;
    }
    let code = CanonicalCode(entries.iter().map(CodeEntry::to_string).collect());
    Some(CanonicalForm { code, entries, order: st.order })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::query::parse_query;

    fn code(text: &str) -> CanonicalCode {
        canonical_form(&parse_query(text).unwrap().remove(0)).unwrap().code
    }

    #[test]
    fn renaming_does_not_change_code() {
        let a = code("SELECT * WHERE { ?x <influencedBy> ?y . ?x <mainInterest> ?z }");
        let b = code("SELECT * WHERE { ?q <mainInterest> ?r . ?q <influencedBy> ?s }");
        assert_eq!(a, b);
        assert_eq!(a.as_str(), "(0,1,+,<influencedBy>)(0,2,+,<mainInterest>)");
    }

    #[test]
    fn labels_and_shapes_distinguish() {
        let inf = code("SELECT * WHERE { ?x <influencedBy> ?y }");
        let main = code("SELECT * WHERE { ?x <mainInterest> ?y }");
        assert_ne!(inf, main);
        let star = code("SELECT * WHERE { ?x <p> ?y . ?x <p> ?z }");
        let chain = code("SELECT * WHERE { ?x <p> ?y . ?y <p> ?z }");
        let sink = code("SELECT * WHERE { ?x <p> ?y . ?z <p> ?y }");
        assert_ne!(star, chain);
        assert_ne!(star, sink);
        assert_ne!(chain, sink);
    }

    #[test]
    fn constants_are_ignored() {
        let a = code("SELECT * WHERE { ?x <p> <c> }");
        let b = code("SELECT * WHERE { ?x <p> ?y }");
        assert_eq!(a, b);
    }

    #[test]
    fn loops_and_cycles() {
        let lp = code("SELECT * WHERE { ?x <p> ?x }");
        assert_eq!(lp.as_str(), "(0,0,+,<p>)");
        let c1 = code("SELECT * WHERE { ?a <p> ?b . ?b <p> ?c . ?c <p> ?a }");
        let c2 = code("SELECT * WHERE { ?z <p> ?x . ?x <p> ?y . ?y <p> ?z }");
        assert_eq!(c1, c2);
        let anti = code("SELECT * WHERE { ?a <p> ?b . ?b <p> ?c . ?a <p> ?c }");
        assert_ne!(c1, anti);
    }

    #[test]
    fn parse_roundtrip_and_rejects() {
        let c = code("SELECT * WHERE { ?x <p> ?y . ?z <q> ?y . ?y <r> ?y }");
        assert_eq!(CanonicalCode::parse(c.as_str()).unwrap(), c);
        assert!(CanonicalCode::parse("").is_err());
        assert!(CanonicalCode::parse("(0,2,+,<p>)").is_err());
        assert!(CanonicalCode::parse("(0,1,*,<p>)").is_err());
        assert!(CanonicalCode::parse("(0,1,+,<p>").is_err());
    }

    #[test]
    fn variable_properties_have_no_code() {
        assert!(canonical_form(&parse_query("SELECT * WHERE { ?x ?p ?y }").unwrap().remove(0)).is_none());
    }
}
