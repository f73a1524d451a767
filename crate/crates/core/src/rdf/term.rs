use std::fmt;
use std::sync::Arc;

/// A vertex of an RDF graph: an IRI or a plain literal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Iri(Arc<str>),
    Literal(Arc<str>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TermKind {
    Iri,
    Literal,
}

impl Term {
    /// Panics on an empty lexical form; use [`Term::try_iri`] for untrusted input.
    pub fn iri(lexical: &str) -> Self {
        Self::try_iri(lexical).expect("IRI must be non-empty")
    }

    pub fn literal(lexical: &str) -> Self {
        Term::Literal(Arc::from(lexical))
    }

    pub fn try_iri(lexical: &str) -> Option<Self> {
        if lexical.is_empty() || lexical.chars().any(|c| c.is_whitespace() || matches!(c, '<' | '>' | '"')) {
            return None;
        }
        Some(Term::Iri(Arc::from(lexical)))
    }

    pub fn kind(&self) -> TermKind {
        match self {
            Term::Iri(_) => TermKind::Iri,
            Term::Literal(_) => TermKind::Literal,
        }
    }

    pub fn lexical(&self) -> &str {
        match self {
            Term::Iri(s) | Term::Literal(s) => s,
        }
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Term::Literal(_))
    }
}

impl fmt::Display for Term {
    /// N-Triples surface form.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(s) => write!(f, "<{s}>"),
            Term::Literal(s) => {
                f.write_str("\"")?;
                for c in s.chars() {
                    match c {
                        '"' => f.write_str("\\\"")?,
                        '\\' => f.write_str("\\\\")?,
                        '\n' => f.write_str("\\n")?,
                        '\r' => f.write_str("\\r")?,
                        '\t' => f.write_str("\\t")?,
                        c => write!(f, "{c}")?,
                    }
                }
                f.write_str("\"")
            }
        }
    }
}

/// Reads one `<iri>` or `"literal"` token from the front of `input`.
///
/// Returns the term and the unconsumed remainder. The error carries the byte
/// offset (relative to `input`) and a message.
pub(crate) fn read_term(input: &str) -> Result<(Term, &str), (usize, String)> {
    let mut chars = input.char_indices();
    match chars.next() {
        Some((_, '<')) => {
            let end = input[1..]
                .find('>')
                .ok_or_else(|| (0, "unterminated IRI".to_string()))?
                + 1;
            let body = &input[1..end];
            let term = Term::try_iri(body).ok_or_else(|| (1, format!("invalid IRI <{body}>")))?;
            Ok((term, &input[end + 1..]))
        }
        Some((_, '"')) => {
            let mut out = String::new();
            let mut escaped = false;
            for (i, c) in chars {
                if escaped {
                    out.push(match c {
                        'n' => '\n',
                        'r' => '\r',
                        't' => '\t',
                        '"' => '"',
                        '\\' => '\\',
                        other => return Err((i, format!("unsupported escape \\{other}"))),
                    });
                    escaped = false;
                } else if c == '\\' {
                    escaped = true;
                } else if c == '"' {
                    let rest = &input[i + 1..];
                    if rest.starts_with('@') || rest.starts_with("^^") {
                        return Err((i + 1, "language tags and datatypes are not supported".into()));
                    }
                    return Ok((Term::Literal(Arc::from(out.as_str())), rest));
                } else {
                    out.push(c);
                }
            }
            Err((0, "unterminated literal".into()))
        }
        Some((_, c)) => Err((0, format!("expected '<' or '\"', found '{c}'"))),
        None => Err((0, "expected a term, found end of input".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_escapes_literals() {
        let t = Term::literal("a \"b\"\tc\\");
        assert_eq!(t.to_string(), r#""a \"b\"\tc\\""#);
        let text = t.to_string();
        let (back, rest) = read_term(&text).unwrap();
        assert_eq!(back, t);
        assert!(rest.is_empty());
    }

    #[test]
    fn rejects_bad_iris() {
        assert!(Term::try_iri("").is_none());
        assert!(Term::try_iri("a b").is_none());
        assert!(read_term("<a").is_err());
        assert!(read_term("\"x\"@en").is_err());
    }
}
