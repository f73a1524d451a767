use thiserror::Error;

use super::term::read_term;
use super::{RdfGraph, Term, Triple};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct NTriplesError {
    pub line: usize,
    pub message: String,
}

/// Parses the supported N-Triples subset: `<s> <p> <o> .` or `<s> <p> "lit" .`,
/// one statement per line, `#` comment lines and blank lines ignored.
pub fn parse_ntriples(text: &str) -> Result<RdfGraph, NTriplesError> {
    let mut triples = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| NTriplesError { line: idx + 1, message };
        triples.push(parse_line(line).map_err(err)?);
    }
    Ok(RdfGraph::new(triples))
}

fn parse_line(line: &str) -> Result<Triple, String> {
    let (subject, rest) = read_term(line).map_err(|(_, m)| format!("subject: {m}"))?;
    if subject.is_literal() {
        return Err("literal in subject position".into());
    }
    let (property, rest) = read_term(rest.trim_start()).map_err(|(_, m)| format!("property: {m}"))?;
    let Term::Iri(property) = property else {
        return Err("property must be an IRI".into());
    };
    let (object, rest) = read_term(rest.trim_start()).map_err(|(_, m)| format!("object: {m}"))?;
    if rest.trim() != "." {
        return Err(format!("expected terminal ' .', found {:?}", rest.trim()));
    }
    Ok(Triple { subject, property, object })
}

/// Serializes in `(subject, property, object)` order, one line per edge.
pub fn serialize_ntriples(g: &RdfGraph) -> String {
    let mut out = String::with_capacity(g.edge_count() * 32);
    for t in g.triples() {
        out.push_str(&t.to_string());
        out.push('\n');
    }
    out
}
