use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use super::{canonical_form, CanonicalCode};
use crate::allocator::Allocation;
use crate::fragmenter::{parse_conjuncts, CellTable, FragmentId, FragmentSource, Fragmentation, MintermPredicate, Strategy};
use crate::miner::Pattern;
use crate::query::{EdgeLabel, QueryGraph};
use crate::rdf::Term;

/// One horizontal fragment of a pattern.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MintermEntry {
    pub fragment: FragmentId,
    pub match_count: usize,
    pub minterm: MintermPredicate,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DictEntry {
    pub pattern: Pattern,
    pub fragment_ids: Vec<FragmentId>,
    /// `|⟦p⟧|` over the hot graph.
    pub match_count: usize,
    /// Edges stored across the pattern's fragments.
    pub edge_count: usize,
    pub site_ids: Vec<usize>,
    /// Kept minterms in fragment order, residual last. Empty for vertical.
    pub minterms: Vec<MintermEntry>,
    cells: CellTable,
}

impl DictEntry {
    fn new(pattern: Pattern, minterms: Vec<MintermEntry>, fragment_ids: Vec<FragmentId>, match_count: usize, edge_count: usize, site_ids: Vec<usize>) -> Self {
        let ms: Vec<MintermPredicate> = minterms.iter().map(|m| m.minterm.clone()).collect();
        let cells = CellTable::from_minterms(&ms);
        DictEntry { pattern, fragment_ids, match_count, edge_count, site_ids, minterms, cells }
    }
}

/// Result of probing the dictionary with a subquery.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lookup<'a> {
    pub entry: &'a DictEntry,
    /// Fragments that may hold matches of the subquery.
    pub fragments: Vec<FragmentId>,
    /// Matches stored in those fragments.
    pub card: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dictionary {
    pub strategy: Strategy,
    pub sites: usize,
    pub entries: BTreeMap<CanonicalCode, DictEntry>,
    /// Edge count per property of the cold fragment.
    pub cold_stats: BTreeMap<Arc<str>, usize>,
    hot_properties: BTreeSet<Arc<str>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("dictionary line {line}: {message}")]
pub struct DictionaryError {
    pub line: usize,
    pub message: String,
}

impl Dictionary {
    fn assemble(strategy: Strategy, sites: usize, entries: BTreeMap<CanonicalCode, DictEntry>, cold_stats: BTreeMap<Arc<str>, usize>) -> Self {
        let hot_properties = entries.values().filter_map(|e| e.pattern.single_property().cloned()).collect();
        Dictionary { strategy, sites, entries, cold_stats, hot_properties }
    }

    /// Collects per-pattern fragment ids, counts and sites.
    pub fn build(frags: &Fragmentation, alloc: &Allocation) -> Self {
        // pattern, minterms, fragment ids, matches, edges
        type Group = (Pattern, Vec<MintermEntry>, Vec<FragmentId>, usize, usize);
        let mut grouped: BTreeMap<CanonicalCode, Group> = BTreeMap::new();
        let mut cold_stats = BTreeMap::new();
        for f in &frags.fragments {
            let Some(p) = f.source.pattern() else {
                for t in f.graph.triples() {
                    *cold_stats.entry(t.property.clone()).or_insert(0) += 1;
                }
                continue;
            };
            let slot = grouped.entry(p.code().clone()).or_insert_with(|| (p.clone(), Vec::new(), Vec::new(), 0, 0));
            slot.2.push(f.id);
            slot.3 += f.match_count;
            slot.4 += f.edge_count();
            if let FragmentSource::Horizontal(m) = &f.source {
                slot.1.push(MintermEntry { fragment: f.id, match_count: f.match_count, minterm: m.clone() });
            }
        }
        let entries = grouped
            .into_iter()
            .map(|(code, (pattern, minterms, ids, matches, edges))| {
                let sites: BTreeSet<usize> = ids.iter().filter_map(|id| alloc.site_of.get(id).copied()).collect();
                (code, DictEntry::new(pattern, minterms, ids, matches, edges, sites.into_iter().collect()))
            })
            .collect();
        Self::assemble(frags.strategy, alloc.sites(), entries, cold_stats)
    }

    pub fn is_hot(&self, property: &str) -> bool {
        self.hot_properties.contains(property)
    }

    pub fn hot_properties(&self) -> &BTreeSet<Arc<str>> {
        &self.hot_properties
    }

    /// Largest pattern stored, in edges.
    pub fn max_pattern_edges(&self) -> usize {
        self.entries.values().map(|e| e.pattern.edge_count()).max().unwrap_or(0)
    }

    /// Total edges stored, counting each pattern's fragments once and the
    /// cold fragment once.
    pub fn total_edges(&self) -> usize {
        self.entries.values().map(|e| e.edge_count).sum::<usize>() + self.cold_stats.values().sum::<usize>()
    }

    /// Finds the pattern a subquery is an instance of, narrowing horizontal
    /// fragments by the subquery's constants. Single edges always resolve to
    /// their property's pattern, loops included.
    pub fn lookup(&self, q: &QueryGraph) -> Option<Lookup<'_>> {
        if q.has_variable_property() {
            return None;
        }
        let (code, order) = match q.edges() {
            [e] => {
                let prop = e.label.as_property()?;
                (Pattern::single_edge(prop).code().clone(), vec![e.subject, e.object])
            }
            _ => {
                let form = canonical_form(q)?;
                (form.code, form.order)
            }
        };
        let entry = self.entries.get(&code)?;
        if entry.minterms.is_empty() {
            return Some(Lookup { entry, fragments: entry.fragment_ids.clone(), card: entry.match_count });
        }
        let constants: BTreeMap<String, Term> = order
            .iter()
            .enumerate()
            .filter_map(|(i, &v)| q.vertex(v).as_const().map(|c| (Pattern::variable(i), c.clone())))
            .collect();
        let (kept, residual) = entry.cells.consistent(&constants);
        let mut chosen: Vec<&MintermEntry> = kept
            .iter()
            .map(|&i| entry.minterms.iter().filter(|m| !m.minterm.residual).nth(i).expect("kept cell index"))
            .collect();
        if residual {
            chosen.extend(entry.minterms.iter().filter(|m| m.minterm.residual));
        }
        let mut fragments: Vec<FragmentId> = chosen.iter().map(|m| m.fragment).collect();
        fragments.sort();
        let card = chosen.iter().map(|m| m.match_count).sum();
        Some(Lookup { entry, fragments, card })
    }

    /// Worst-case cardinality of a subquery: the stored match count for
    /// patterns, the product of property counts for cold subqueries, and the
    /// total edge count for a single variable-property edge.
    pub fn estimate_card(&self, q: &QueryGraph) -> u128 {
        if let Some(l) = self.lookup(q) {
            return l.card as u128;
        }
        if let [e] = q.edges() {
            if matches!(e.label, EdgeLabel::Var(_)) {
                return self.total_edges() as u128;
            }
        }
        q.edges().iter().fold(1u128, |acc, e| {
            let n = match &e.label {
                EdgeLabel::Property(p) if !self.is_hot(p) => self.cold_stats.get(p).copied().unwrap_or(0),
                EdgeLabel::Property(_) => 0,
                EdgeLabel::Var(_) => self.total_edges(),
            };
            acc.saturating_mul(n as u128)
        })
    }

    pub fn to_text(&self) -> String {
        let tag = match self.strategy {
            Strategy::Vertical => "v",
            Strategy::Horizontal => "h",
        };
        let mut out = format!("strategy={tag} sites={}\n", self.sites);
        let join = |xs: Vec<String>| xs.join(",");
        for (code, e) in &self.entries {
            let _ = write!(
                out,
                "{code}\t{}\t{}\t{}\t{}",
                e.match_count,
                e.edge_count,
                join(e.fragment_ids.iter().map(|f| f.to_string()).collect()),
                join(e.site_ids.iter().map(|s| s.to_string()).collect()),
            );
            for m in &e.minterms {
                let _ = write!(out, "\t{}:{}:{}:{}", m.fragment, m.match_count, m.minterm.acc, m.minterm.descriptor());
            }
            out.push('\n');
        }
        for (p, n) in &self.cold_stats {
            let _ = writeln!(out, "cold:{p}\t{n}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, DictionaryError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let err = |line: usize, message: String| DictionaryError { line: line + 1, message };
        let (i, header) = lines.next().ok_or_else(|| err(0, "empty dictionary".into()))?;
        let mut strategy = None;
        let mut sites = None;
        for kv in header.split_whitespace() {
            match kv.split_once('=') {
                Some(("strategy", v)) => strategy = Some(v.parse::<Strategy>().map_err(|m| err(i, m))?),
                Some(("sites", v)) => sites = Some(v.parse::<usize>().map_err(|_| err(i, format!("bad site count `{v}`")))?),
                _ => return Err(err(i, format!("unexpected header field `{kv}`"))),
            }
        }
        let strategy = strategy.ok_or_else(|| err(i, "missing strategy".into()))?;
        let sites = sites.ok_or_else(|| err(i, "missing sites".into()))?;

        let mut entries = BTreeMap::new();
        let mut cold_stats = BTreeMap::new();
        for (i, line) in lines {
            let cols: Vec<&str> = line.split('\t').collect();
            if let Some(prop) = cols[0].strip_prefix("cold:") {
                let [_, n] = cols[..] else { return Err(err(i, "cold line needs 2 columns".into())) };
                let n = n.parse().map_err(|_| err(i, format!("bad count `{n}`")))?;
                cold_stats.insert(Arc::from(prop), n);
                continue;
            }
            if cols.len() < 5 {
                return Err(err(i, format!("expected at least 5 columns, found {}", cols.len())));
            }
            let code = CanonicalCode::parse(cols[0]).map_err(|e| err(i, e.to_string()))?;
            let pattern = Pattern::from_code(&code);
            let num = |s: &str| s.parse::<usize>().map_err(|_| err(i, format!("bad count `{s}`")));
            let fragment_ids = cols[3]
                .split(',')
                .filter(|x| !x.is_empty())
                .map(|f| f.parse::<FragmentId>().map_err(|m| err(i, m)))
                .collect::<Result<Vec<_>, _>>()?;
            let site_ids = cols[4].split(',').filter(|x| !x.is_empty()).map(num).collect::<Result<Vec<_>, _>>()?;
            let mut minterms = Vec::new();
            for col in &cols[5..] {
                let mut parts = col.splitn(4, ':');
                let (Some(f), Some(n), Some(acc), Some(desc)) = (parts.next(), parts.next(), parts.next(), parts.next()) else {
                    return Err(err(i, format!("bad minterm `{col}`")));
                };
                let fragment = f.parse::<FragmentId>().map_err(|m| err(i, m))?;
                let residual = desc == "residual";
                let conjuncts = if residual { Vec::new() } else { parse_conjuncts(&pattern, desc).map_err(|m| err(i, m))? };
                minterms.push(MintermEntry {
                    fragment,
                    match_count: num(n)?,
                    minterm: MintermPredicate { pattern: pattern.clone(), conjuncts, acc: num(acc)?, residual },
                });
            }
            let entry = DictEntry::new(pattern, minterms, fragment_ids, num(cols[1])?, num(cols[2])?, site_ids);
            entries.insert(code, entry);
        }
        Ok(Self::assemble(strategy, sites, entries, cold_stats))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::allocator::allocate_fragmentation;
    use crate::fragmenter::{horizontal_fragmentation, vertical_fragmentation};
    use crate::miner::{access_frequency, FrequentPattern, PatternStats};
    use crate::query::{parse_query, parse_workload, Workload};
    use crate::rdf::{parse_ntriples, split_hot_cold};

    fn q(text: &str) -> QueryGraph {
        parse_query(text).unwrap().remove(0)
    }

    fn dict(strategy: Strategy, w: &Workload) -> Dictionary {
        let g = parse_ntriples(include_str!("../../fixtures/g0.nt")).unwrap();
        let split = split_hot_cold(&g, w, 2);
        let pb = Pattern::from_shape(&q("SELECT * WHERE { ?x <influencedBy> ?y . ?x <mainInterest> ?z }")).unwrap();
        let stats: Vec<PatternStats> = [Pattern::single_edge("influencedBy"), Pattern::single_edge("mainInterest"), pb]
            .into_iter()
            .map(|p| {
                let acc = access_frequency(w, &p);
                PatternStats::measure(FrequentPattern { pattern: p, acc }, &split.hot)
            })
            .collect();
        let frags = match strategy {
            Strategy::Vertical => vertical_fragmentation(&stats, &split.hot),
            Strategy::Horizontal => horizontal_fragmentation(&stats, &split.hot, w, 1),
        }
        .with_cold(split.cold);
        let (_, alloc) = allocate_fragmentation(&frags, w, 2);
        Dictionary::build(&frags, &alloc)
    }

    fn w0() -> Workload {
        parse_workload(include_str!("../../fixtures/w0.rq")).unwrap()
    }

    #[test]
    fn vertical_lookups() {
        let d = dict(Strategy::Vertical, &w0());
        let l = d.lookup(&q("SELECT * WHERE { ?a <influencedBy> ?b . ?a <mainInterest> ?c }")).unwrap();
        assert_eq!(l.fragments, vec![FragmentId(3)]);
        assert_eq!(l.card, 2);
        assert!(d.lookup(&q("SELECT * WHERE { ?a <influencedBy> ?b . ?b <influencedBy> ?c }")).is_none());
        assert!(d.lookup(&q("SELECT * WHERE { ?a ?p ?b }")).is_none());
        let lp = d.lookup(&q("SELECT * WHERE { ?a <influencedBy> ?a }")).unwrap();
        assert_eq!(lp.entry.pattern, Pattern::single_edge("influencedBy"));
    }

    #[test]
    fn estimates() {
        let d = dict(Strategy::Vertical, &w0());
        assert_eq!(d.estimate_card(&q("SELECT * WHERE { ?x <influencedBy> ?y }")), 2);
        assert_eq!(d.estimate_card(&q("SELECT * WHERE { ?b <author> ?x }")), 2);
        assert_eq!(d.estimate_card(&q("SELECT * WHERE { ?b <author> ?x . ?x <name> ?n }")), 2);
        assert_eq!(d.estimate_card(&q("SELECT * WHERE { ?b <nowhere> ?x }")), 0);
        assert_eq!(d.estimate_card(&q("SELECT * WHERE { ?b ?p ?x }")), 13);
    }

    #[test]
    fn horizontal_narrowing() {
        let w = parse_workload(include_str!("../../fixtures/w1.rq")).unwrap();
        let d = dict(Strategy::Horizontal, &w);
        let entry_frags = |text: &str| d.lookup(&q(text)).unwrap();
        let all = entry_frags("SELECT * WHERE { ?a <influencedBy> ?b . ?a <mainInterest> ?c }");
        assert_eq!(all.fragments.len(), 2);
        let m1 = entry_frags("SELECT * WHERE { ?a <influencedBy> ?b . ?a <mainInterest> <m1> }");
        assert_eq!(m1.fragments.len(), 1);
        assert_eq!(m1.card, 2);
        let m1_desc = &m1.entry.minterms.iter().find(|m| m.fragment == m1.fragments[0]).unwrap().minterm;
        assert_eq!(m1_desc.descriptor(), "?v2=<m1>");
        let m2 = entry_frags("SELECT * WHERE { ?a <influencedBy> ?b . ?a <mainInterest> <m2> }");
        assert_eq!(m2.card, 0);
        assert_ne!(m2.fragments, m1.fragments);
    }

    #[test]
    fn text_roundtrip() {
        let w = parse_workload(include_str!("../../fixtures/w1.rq")).unwrap();
        for s in [Strategy::Vertical, Strategy::Horizontal] {
            let d = dict(s, &w);
            let text = d.to_text();
            assert_eq!(Dictionary::from_text(&text).unwrap(), d);
        }
        let text = dict(Strategy::Vertical, &w0()).to_text();
        assert!(text.starts_with("strategy=v sites=2\n"));
        assert!(text.contains("cold:author\t2\n"));
        assert!(Dictionary::from_text("strategy=q sites=1").is_err());
    }
}
