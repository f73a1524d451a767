use super::{EdgeLabel, QVertex, QueryError, QueryGraph, TriplePattern, Workload};
use crate::rdf::{read_term, Term};

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Keyword(String),
    Star,
    Open,
    Close,
    Dot,
    Var(String),
    Term(Term),
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, QueryError> {
    let mut tokens = Vec::new();
    let mut pos = 0;
    let syntax = |pos: usize, message: String| QueryError::Syntax { pos, message };
    while pos < text.len() {
        let rest = &text[pos..];
        let c = rest.chars().next().unwrap();
        if c.is_whitespace() {
            pos += c.len_utf8();
            continue;
        }
        if c == '#' {
            pos += rest.find('\n').unwrap_or(rest.len());
            continue;
        }
        let (tok, len) = match c {
            '*' => (Token::Star, 1),
            '{' => (Token::Open, 1),
            '}' => (Token::Close, 1),
            '.' => (Token::Dot, 1),
            '?' | '$' => {
                let len = 1 + rest[1..]
                    .find(|ch: char| !(ch.is_alphanumeric() || ch == '_'))
                    .unwrap_or(rest.len() - 1);
                if len == 1 {
                    return Err(syntax(pos, "empty variable name".into()));
                }
                (Token::Var(format!("?{}", &rest[1..len])), len)
            }
            '<' | '"' => {
                let (term, remainder) = read_term(rest).map_err(|(off, m)| syntax(pos + off, m))?;
                (Token::Term(term), rest.len() - remainder.len())
            }
            c if c.is_alphabetic() => {
                let len = rest.find(|ch: char| !ch.is_alphanumeric()).unwrap_or(rest.len());
                let word = rest[..len].to_ascii_uppercase();
                if word == "FILTER" {
                    return Err(QueryError::Filter { pos });
                }
                (Token::Keyword(word), len)
            }
            other => return Err(syntax(pos, format!("unexpected character '{other}'"))),
        };
        tokens.push((pos, tok));
        pos += len;
    }
    Ok(tokens)
}

/// Parses `SELECT * WHERE { tp1 . tp2 . ... }` into one query graph per
/// connected component.
pub fn parse_query(text: &str) -> Result<Vec<QueryGraph>, QueryError> {
    let tokens = tokenize(text)?;
    let mut it = tokens.into_iter().peekable();
    let end = text.len();
    let syntax = |pos: usize, message: &str| QueryError::Syntax { pos, message: message.to_string() };

    let mut expect = |want: &Token, what: &str| match it.next() {
        Some((_, t)) if t == *want => Ok(()),
        Some((p, _)) => Err(syntax(p, what)),
        None => Err(syntax(end, what)),
    };
    expect(&Token::Keyword("SELECT".into()), "expected SELECT")?;
    expect(&Token::Star, "only SELECT * is supported")?;
    expect(&Token::Keyword("WHERE".into()), "expected WHERE")?;
    expect(&Token::Open, "expected '{'")?;

    let mut patterns = Vec::new();
    loop {
        match it.peek() {
            Some((_, Token::Close)) => {
                it.next();
                break;
            }
            Some(_) => {}
            None => return Err(syntax(end, "expected '}'")),
        }
        let mut slot = |role: &str| -> Result<(usize, Token), QueryError> {
            match it.next() {
                Some((p, t @ (Token::Var(_) | Token::Term(_)))) => Ok((p, t)),
                Some((p, _)) => Err(syntax(p, &format!("expected {role}"))),
                None => Err(syntax(end, &format!("expected {role}"))),
            }
        };
        let (sp, s) = slot("subject")?;
        let (pp, p) = slot("property")?;
        let (_, o) = slot("object")?;
        let subject = vertex(s);
        if subject.as_const().is_some_and(Term::is_literal) {
            return Err(syntax(sp, "literal in subject position"));
        }
        let label = match p {
            Token::Var(v) => EdgeLabel::Var(v),
            Token::Term(Term::Iri(iri)) => EdgeLabel::Property(iri),
            _ => return Err(syntax(pp, "property must be an IRI or variable")),
        };
        patterns.push(TriplePattern::new(subject, label, vertex(o)));
        match it.peek() {
            Some((_, Token::Dot)) => {
                it.next();
            }
            Some((_, Token::Close)) => {}
            Some((p, _)) => return Err(syntax(*p, "expected '.' or '}'")),
            None => return Err(syntax(end, "expected '}'")),
        }
    }
    if let Some((p, _)) = it.next() {
        return Err(syntax(p, "trailing input after '}'"));
    }
    if patterns.is_empty() {
        return Err(QueryError::Empty);
    }
    QueryGraph::components(patterns)
}

fn vertex(t: Token) -> QVertex {
    match t {
        Token::Var(v) => QVertex::Var(v),
        Token::Term(t) => QVertex::Const(t),
        _ => unreachable!("slot() only yields variables and terms"),
    }
}

/// Parses a workload file: query blocks separated by blank lines, `#` comment
/// lines ignored. A block may contribute several components.
pub fn parse_workload(text: &str) -> Result<Workload, QueryError> {
    let mut workload = Workload::default();
    let mut block = String::new();
    let mut block_line = 0;
    let flush = |block: &mut String, line: usize, workload: &mut Workload| -> Result<(), QueryError> {
        if block.trim().is_empty() {
            block.clear();
            return Ok(());
        }
        let graphs = parse_query(block).map_err(|e| QueryError::InBlock { line, source: Box::new(e) })?;
        graphs.into_iter().for_each(|g| workload.push(g));
        block.clear();
        Ok(())
    };
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.starts_with('#') {
            continue;
        }
        if trimmed.is_empty() {
            flush(&mut block, block_line, &mut workload)?;
            continue;
        }
        if block.is_empty() {
            block_line = i + 1;
        }
        block.push_str(line);
        block.push('\n');
    }
    flush(&mut block, block_line, &mut workload)?;
    Ok(workload)
}

/// Renders a workload in the block format read by [`parse_workload`].
pub fn serialize_workload(w: &Workload) -> String {
    let mut out = String::new();
    for q in w.queries() {
        out.push_str(&q.to_string());
        out.push_str("\n\n");
    }
    out
}
