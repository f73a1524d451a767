//! Vertical and horizontal fragmentation of the hot graph.
//!
//! A vertical fragment holds every hot edge that takes part in a match of one
//! selected pattern. Horizontal fragmentation further splits those matches by
//! the structural minterms harvested from the workload. Cold edges always form
//! one extra fragment.

mod minterm;
mod store;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use log::debug;

use crate::matcher::{evaluate, instantiate, match_induced_subgraph};
use crate::miner::{Pattern, PatternStats};
use crate::query::Workload;
use crate::rdf::{RdfGraph, Triple};

pub use minterm::{
    enumerate_minterms, harvest_simple_predicates, minterm_usage, CellKey, CellTable, MintermPredicate, MintermSet,
    PredicateOp, SimplePredicate,
};
pub use store::{read_fragmentation, write_fragmentation, StoreError, MANIFEST};
pub(crate) use store::parse_conjuncts;

/// Fragment identifier; `0` is reserved for the cold fragment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FragmentId(pub u32);

impl FragmentId {
    pub const COLD: FragmentId = FragmentId(0);

    pub fn is_cold(self) -> bool {
        self == Self::COLD
    }
}

impl fmt::Display for FragmentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_cold() {
            f.write_str("cold")
        } else {
            write!(f, "F{}", self.0)
        }
    }
}

impl FromStr for FragmentId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "cold" {
            return Ok(Self::COLD);
        }
        s.strip_prefix('F')
            .and_then(|n| n.parse().ok())
            .filter(|&n| n > 0)
            .map(FragmentId)
            .ok_or_else(|| format!("bad fragment id `{s}`"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    Vertical,
    Horizontal,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Vertical => "vertical",
            Strategy::Horizontal => "horizontal",
        })
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "v" | "vertical" => Ok(Strategy::Vertical),
            "h" | "horizontal" => Ok(Strategy::Horizontal),
            _ => Err(format!("unknown strategy `{s}` (expected v or h)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FragmentSource {
    Vertical(Pattern),
    Horizontal(MintermPredicate),
    Cold,
}

impl FragmentSource {
    pub fn pattern(&self) -> Option<&Pattern> {
        match self {
            FragmentSource::Vertical(p) => Some(p),
            FragmentSource::Horizontal(m) => Some(&m.pattern),
            FragmentSource::Cold => None,
        }
    }

    /// `code`, `code|conjuncts…`, `code|residual` or `cold`.
    pub fn descriptor(&self) -> String {
        match self {
            FragmentSource::Vertical(p) => p.code().to_string(),
            FragmentSource::Horizontal(m) => {
                let d = m.descriptor();
                if d.is_empty() {
                    m.pattern.code().to_string()
                } else {
                    format!("{}|{}", m.pattern.code(), d)
                }
            }
            FragmentSource::Cold => "cold".to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fragment {
    pub id: FragmentId,
    pub source: FragmentSource,
    pub graph: Arc<RdfGraph>,
    /// Pattern matches assigned to this fragment; edge count for the cold one.
    pub match_count: usize,
}

impl Fragment {
    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fragmentation {
    pub strategy: Strategy,
    /// Sorted by id.
    pub fragments: Vec<Fragment>,
}

impl Fragmentation {
    /// Adds (or replaces) the cold fragment.
    pub fn with_cold(mut self, cold: RdfGraph) -> Self {
        self.fragments.retain(|f| !f.id.is_cold());
        let match_count = cold.edge_count();
        self.fragments.insert(
            0,
            Fragment { id: FragmentId::COLD, source: FragmentSource::Cold, graph: Arc::new(cold), match_count },
        );
        self
    }

    pub fn get(&self, id: FragmentId) -> Option<&Fragment> {
        self.fragments.binary_search_by_key(&id, |f| f.id).ok().map(|i| &self.fragments[i])
    }

    pub fn cold(&self) -> Option<&Fragment> {
        self.get(FragmentId::COLD)
    }

    /// Fragments derived from patterns, excluding the cold one.
    pub fn hot_fragments(&self) -> impl Iterator<Item = &Fragment> {
        self.fragments.iter().filter(|f| !f.id.is_cold())
    }

    pub fn ids(&self) -> Vec<FragmentId> {
        self.fragments.iter().map(|f| f.id).collect()
    }

    /// Sum of fragment sizes, counting replicated edges once per fragment.
    pub fn total_edges(&self) -> usize {
        self.fragments.iter().map(Fragment::edge_count).sum()
    }

    /// Union of all fragments.
    pub fn union(&self) -> RdfGraph {
        RdfGraph::union(self.fragments.iter().map(|f| &*f.graph))
    }

    /// `total_edges / |E|`, or 0 for an empty base graph.
    pub fn redundancy(&self, base_edges: usize) -> f64 {
        if base_edges == 0 {
            0.0
        } else {
            self.total_edges() as f64 / base_edges as f64
        }
    }
}

/// One fragment per selected pattern, numbered from 1 in `(edge count, code)`
/// order.
pub fn vertical_fragmentation(selected: &[PatternStats], hot: &RdfGraph) -> Fragmentation {
    let mut patterns: Vec<&Pattern> = selected.iter().map(|s| &s.pattern).collect();
    patterns.sort();
    patterns.dedup();
    let fragments = patterns
        .into_iter()
        .zip(1u32..)
        .map(|(p, id)| {
            let m = evaluate(p.graph(), hot);
            let graph = match_induced_subgraph(p.graph(), hot);
            debug!("vertical {} <- {} ({} edges)", FragmentId(id), p.code(), graph.edge_count());
            Fragment { id: FragmentId(id), source: FragmentSource::Vertical(p.clone()), graph: Arc::new(graph), match_count: m.len() }
        })
        .collect();
    Fragmentation { strategy: Strategy::Vertical, fragments }
}

/// One fragment per kept minterm of each selected pattern, plus a residual
/// fragment when cells were pruned. Ids run sequentially over patterns in
/// `(edge count, code)` order.
pub fn horizontal_fragmentation(
    selected: &[PatternStats],
    hot: &RdfGraph,
    workload: &Workload,
    min_acc: usize,
) -> Fragmentation {
    let mut patterns: Vec<&Pattern> = selected.iter().map(|s| &s.pattern).collect();
    patterns.sort();
    patterns.dedup();
    let mut fragments = Vec::new();
    let mut next = 1u32;
    for p in patterns {
        let sps = harvest_simple_predicates(p, workload);
        let set = enumerate_minterms(p, &sps, workload, min_acc);
        let matches = evaluate(p.graph(), hot);
        let columns: Vec<(String, usize)> =
            matches.variables().iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();
        let mut buckets: Vec<(Vec<Triple>, usize)> = vec![(Vec::new(), 0); set.minterms.len()];
        for row in matches.rows() {
            let col = |var: &str| &row[columns.iter().find(|(v, _)| v == var).expect("pattern variable").1];
            let bucket = &mut buckets[set.classify(col)];
            bucket.0.extend(instantiate(p.graph(), matches.variables(), row));
            bucket.1 += 1;
        }
        for (m, (triples, count)) in set.minterms.into_iter().zip(buckets) {
            let id = FragmentId(next);
            next += 1;
            let graph = RdfGraph::new(triples);
            debug!("horizontal {id} <- {} [{}] ({} edges)", p.code(), m.descriptor(), graph.edge_count());
            fragments.push(Fragment { id, source: FragmentSource::Horizontal(m), graph: Arc::new(graph), match_count: count });
        }
    }
    Fragmentation { strategy: Strategy::Horizontal, fragments }
}
