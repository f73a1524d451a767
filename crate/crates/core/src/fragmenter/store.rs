//! On-disk fragment directories: one N-Triples file per fragment and a
//! tab-separated `manifest`.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use thiserror::Error;

use super::minterm::RESIDUAL;
use super::{Fragment, FragmentId, FragmentSource, Fragmentation, MintermPredicate, PredicateOp, SimplePredicate, Strategy};
use crate::dictionary::CanonicalCode;
use crate::miner::Pattern;
use crate::rdf::{parse_ntriples, read_term, serialize_ntriples, NTriplesError};

pub const MANIFEST: &str = "manifest";

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    NTriples { path: PathBuf, source: NTriplesError },
    #[error("manifest line {line}: {message}")]
    Manifest { line: usize, message: String },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> StoreError + '_ {
    move |source| StoreError::Io { path: path.to_path_buf(), source }
}

/// Writes `<dir>/<id>.nt` for every fragment and `<dir>/manifest`.
pub fn write_fragmentation(f: &Fragmentation, dir: &Path) -> Result<(), StoreError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut manifest = format!("# strategy={}\n", f.strategy);
    for frag in &f.fragments {
        let path = dir.join(format!("{}.nt", frag.id));
        fs::write(&path, serialize_ntriples(&frag.graph)).map_err(io_err(&path))?;
        manifest.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            frag.id,
            frag.source.descriptor(),
            frag.match_count,
            frag.edge_count()
        ));
    }
    let path = dir.join(MANIFEST);
    fs::write(&path, manifest).map_err(io_err(&path))
}

/// Reads a directory written by [`write_fragmentation`]. Access frequencies
/// of minterms are not stored and come back as 0.
pub fn read_fragmentation(dir: &Path) -> Result<Fragmentation, StoreError> {
    let path = dir.join(MANIFEST);
    let text = fs::read_to_string(&path).map_err(io_err(&path))?;
    let mut strategy = None;
    let mut fragments = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let bad = |message: String| StoreError::Manifest { line: i + 1, message };
        if let Some(rest) = line.strip_prefix("# strategy=") {
            strategy = Some(rest.trim().parse::<Strategy>().map_err(bad)?);
            continue;
        }
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        let [id, desc, matches, edges] = cols[..] else {
            return Err(bad(format!("expected 4 columns, found {}", cols.len())));
        };
        let id: FragmentId = id.parse().map_err(bad)?;
        let match_count: usize = matches.parse().map_err(|_| bad(format!("bad match count `{matches}`")))?;
        let edge_count: usize = edges.parse().map_err(|_| bad(format!("bad edge count `{edges}`")))?;
        let strategy = strategy.ok_or_else(|| bad("missing strategy header".into()))?;
        let source = parse_descriptor(desc, strategy).map_err(bad)?;
        let nt = dir.join(format!("{id}.nt"));
        let body = fs::read_to_string(&nt).map_err(io_err(&nt))?;
        let graph = parse_ntriples(&body).map_err(|source| StoreError::NTriples { path: nt.clone(), source })?;
        if graph.edge_count() != edge_count {
            return Err(bad(format!("{id} has {} edges, manifest says {edge_count}", graph.edge_count())));
        }
        fragments.push(Fragment { id, source, graph: Arc::new(graph), match_count });
    }
    let strategy = strategy.ok_or(StoreError::Manifest { line: 0, message: "missing strategy header".into() })?;
    fragments.sort_by_key(|f| f.id);
    Ok(Fragmentation { strategy, fragments })
}

/// Splits `code|rest` where the code is a run of `(…>)` entries.
pub(crate) fn split_descriptor(desc: &str) -> Result<(CanonicalCode, &str), String> {
    let mut end = 0;
    while desc[end..].starts_with('(') {
        end += desc[end..].find(">)").ok_or("unterminated code entry")? + 2;
    }
    let code = CanonicalCode::parse(&desc[..end]).map_err(|e| e.to_string())?;
    let rest = &desc[end..];
    if rest.is_empty() {
        return Ok((code, rest));
    }
    let rest = rest.strip_prefix('|').ok_or_else(|| format!("unexpected `{rest}` after code"))?;
    Ok((code, rest))
}

/// Parses `?vN=term|?vM!=term…` into conjuncts.
pub(crate) fn parse_conjuncts(pattern: &Pattern, mut text: &str) -> Result<Vec<SimplePredicate>, String> {
    let mut out = Vec::new();
    while !text.is_empty() {
        let var_end = text.find(['=', '!']).ok_or_else(|| format!("bad conjunct `{text}`"))?;
        let variable = &text[..var_end];
        if !variable.starts_with("?v") || variable[2..].parse::<usize>().is_err() {
            return Err(format!("bad pattern variable `{variable}`"));
        }
        let (op, after) = match text[var_end..].strip_prefix("!=") {
            Some(a) => (PredicateOp::Ne, a),
            None => (PredicateOp::Eq, &text[var_end + 1..]),
        };
        let (value, rest) = read_term(after).map_err(|(_, m)| m)?;
        out.push(SimplePredicate { pattern: pattern.clone(), variable: variable.to_string(), op, value });
        text = match rest.strip_prefix('|') {
            Some(r) if !r.is_empty() => r,
            None if rest.is_empty() => rest,
            _ => return Err(format!("bad separator before `{rest}`")),
        };
    }
    Ok(out)
}

fn parse_descriptor(desc: &str, strategy: Strategy) -> Result<FragmentSource, String> {
    if desc == "cold" {
        return Ok(FragmentSource::Cold);
    }
    let (code, rest) = split_descriptor(desc)?;
    let pattern = Pattern::from_code(&code);
    match strategy {
        Strategy::Vertical if rest.is_empty() => Ok(FragmentSource::Vertical(pattern)),
        Strategy::Vertical => Err("vertical fragment with minterm conjuncts".into()),
        Strategy::Horizontal => {
            let residual = rest == RESIDUAL;
            let conjuncts = if residual { Vec::new() } else { parse_conjuncts(&pattern, rest)? };
            Ok(FragmentSource::Horizontal(MintermPredicate { pattern, conjuncts, acc: 0, residual }))
        }
    }
}
