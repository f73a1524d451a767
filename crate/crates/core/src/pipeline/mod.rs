//! The offline pipeline (split, mine, select, fragment, allocate), its
//! on-disk artifacts, and workload replay for benchmarking.

mod bench;
mod config;

use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use log::info;
use thiserror::Error;

use crate::allocator::{allocate_fragmentation, Allocation, AllocationGraph};
use crate::dictionary::{Dictionary, DictionaryError};
use crate::engine::{QueryEngine, SimulatedCluster};
use crate::fragmenter::{
    horizontal_fragmentation, read_fragmentation, vertical_fragmentation, write_fragmentation, FragmentId,
    Fragmentation, StoreError, Strategy,
};
use crate::miner::{mine_frequent_patterns, FrequentPattern, MinerConfig, PatternStats};
use crate::query::{parse_workload, QueryGraph, Workload};
use crate::rdf::{parse_ntriples, split_hot_cold, GraphSplit, RdfGraph};
use crate::selector::{select_patterns, SelectionConfig, SelectionError, SelectionResult};

pub use bench::{bench_table, run_bench, BenchRow, BENCH_HEADER};
pub use config::{Config, Count, Params};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot open {path}: {source}")]
    MissingInput { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error(transparent)]
    Selection(#[from] SelectionError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Dictionary(#[from] DictionaryError),
}

impl PipelineError {
    /// 2 for usage and configuration problems, 1 for runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Usage(_) | PipelineError::MissingInput { .. } | PipelineError::Selection(_) => 2,
            _ => 1,
        }
    }
}

fn read_input(path: &Path) -> Result<String, PipelineError> {
    fs::read_to_string(path).map_err(|source| PipelineError::MissingInput { path: path.to_path_buf(), source })
}

pub fn load_graph(path: &Path) -> Result<RdfGraph, PipelineError> {
    parse_ntriples(&read_input(path)?).map_err(|e| PipelineError::Parse { path: path.to_path_buf(), message: e.to_string() })
}

pub fn load_workload(path: &Path) -> Result<Workload, PipelineError> {
    parse_workload(&read_input(path)?).map_err(|e| PipelineError::Parse { path: path.to_path_buf(), message: e.to_string() })
}

/// Splits the graph and mines frequent patterns over its hot properties.
pub fn mine_stage(g: &RdfGraph, w: &Workload, params: &Params) -> (GraphSplit, Vec<FrequentPattern>) {
    let split = split_hot_cold(g, w, params.theta);
    let cfg = MinerConfig { min_sup: params.min_sup, max_pattern_edges: params.max_pattern_edges };
    let mined = mine_frequent_patterns(w, &split.frequent_properties, cfg);
    (split, mined)
}

/// Everything the offline pipeline produces.
#[derive(Clone, Debug)]
pub struct Offline {
    pub params: Params,
    pub base_edges: usize,
    pub split: GraphSplit,
    pub mined: Vec<FrequentPattern>,
    pub candidates: Vec<PatternStats>,
    pub selection: SelectionResult,
    pub fragmentation: Fragmentation,
    pub allocation_graph: AllocationGraph,
    pub allocation: Allocation,
    pub dictionary: Dictionary,
}

/// Runs split, mining, selection, fragmentation and allocation in memory.
pub fn run_offline(g: &RdfGraph, w: &Workload, params: &Params) -> Result<Offline, PipelineError> {
    let (split, mined) = mine_stage(g, w, params);
    info!("hot {} edges, cold {} edges, {} patterns mined", split.hot.edge_count(), split.cold.edge_count(), mined.len());
    let candidates: Vec<PatternStats> = mined.iter().cloned().map(|fp| PatternStats::measure(fp, &split.hot)).collect();
    let sc = params.sc.unwrap_or(2 * split.hot.edge_count());
    let selection = select_patterns(
        &candidates,
        w,
        &SelectionConfig { storage_capacity: sc, min_sup: params.min_sup, theta: params.theta },
    )?;
    info!("selected {} patterns, benefit {}", selection.selected.len(), selection.benefit);
    let fragmentation = match params.strategy {
        Strategy::Vertical => vertical_fragmentation(&selection.selected, &split.hot),
        Strategy::Horizontal => horizontal_fragmentation(&selection.selected, &split.hot, w, params.min_acc),
    }
    .with_cold(split.cold.clone());
    let (allocation_graph, allocation) = allocate_fragmentation(&fragmentation, w, params.sites);
    let dictionary = Dictionary::build(&fragmentation, &allocation);
    Ok(Offline {
        params: *params,
        base_edges: g.edge_count(),
        split,
        mined,
        candidates,
        selection,
        fragmentation,
        allocation_graph,
        allocation,
        dictionary,
    })
}

/// Headline numbers of an offline run.
#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    pub strategy: Strategy,
    pub patterns: usize,
    pub benefit: usize,
    pub hot_edges: usize,
    pub cold_edges: usize,
    pub fragments: usize,
    /// Stored edges over original edges, cold fragment included.
    pub redundancy: f64,
    pub site_edges: Vec<usize>,
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "strategy={} patterns={} benefit={}", self.strategy, self.patterns, self.benefit)?;
        writeln!(f, "hot_edges={} cold_edges={} fragments={}", self.hot_edges, self.cold_edges, self.fragments)?;
        writeln!(f, "redundancy={:.4}", self.redundancy)?;
        for (i, n) in self.site_edges.iter().enumerate() {
            writeln!(f, "site {i}: {n} edges")?;
        }
        Ok(())
    }
}

impl Offline {
    pub fn summary(&self) -> Summary {
        Summary {
            strategy: self.params.strategy,
            patterns: self.selection.selected.len(),
            benefit: self.selection.benefit,
            hot_edges: self.split.hot.edge_count(),
            cold_edges: self.split.cold.edge_count(),
            fragments: self.fragmentation.fragments.len(),
            redundancy: self.fragmentation.redundancy(self.base_edges),
            site_edges: self.allocation.site_edge_counts(&self.fragmentation),
        }
    }

    pub fn engine(&self) -> QueryEngine {
        QueryEngine::new(self.dictionary.clone(), SimulatedCluster::new(&self.fragmentation, &self.allocation))
    }

    /// Writes `fragments/`, `dictionary` and `allocation` under `dir`.
    pub fn persist(&self, dir: &Path) -> Result<(), PipelineError> {
        write_artifacts(dir, &self.fragmentation, &self.allocation, &self.dictionary)
    }
}

pub const FRAGMENTS_DIR: &str = "fragments";
pub const DICTIONARY_FILE: &str = "dictionary";
pub const ALLOCATION_FILE: &str = "allocation";

fn write_file(path: PathBuf, text: String) -> Result<(), PipelineError> {
    fs::write(&path, text).map_err(|source| PipelineError::Io { path, source })
}

pub fn write_artifacts(dir: &Path, frags: &Fragmentation, alloc: &Allocation, dict: &Dictionary) -> Result<(), PipelineError> {
    fs::create_dir_all(dir).map_err(|source| PipelineError::Io { path: dir.to_path_buf(), source })?;
    write_fragmentation(frags, &dir.join(FRAGMENTS_DIR))?;
    write_file(dir.join(DICTIONARY_FILE), dict.to_text())?;
    write_file(dir.join(ALLOCATION_FILE), allocation_text(alloc))
}

/// `site <j>: <id>, <id>, ...` per site.
pub fn allocation_text(alloc: &Allocation) -> String {
    alloc
        .clusters
        .iter()
        .enumerate()
        .map(|(j, c)| {
            let ids: Vec<String> = c.iter().map(FragmentId::to_string).collect();
            format!("site {j}: {}\n", ids.join(", "))
        })
        .collect()
}

pub fn parse_allocation(text: &str) -> Result<Allocation, String> {
    let mut clusters = Vec::new();
    for (i, line) in text.lines().filter(|l| !l.trim().is_empty()).enumerate() {
        let rest = line
            .strip_prefix(&format!("site {i}:"))
            .ok_or_else(|| format!("allocation line {}: expected `site {i}:`", i + 1))?;
        let ids = rest
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<FragmentId>())
            .collect::<Result<Vec<_>, _>>()?;
        clusters.push(ids);
    }
    Ok(Allocation::from_clusters(clusters))
}

/// Persisted fragments, allocation and dictionary.
#[derive(Clone, Debug)]
pub struct Artifacts {
    pub fragmentation: Fragmentation,
    pub allocation: Allocation,
    pub dictionary: Dictionary,
}

impl Artifacts {
    pub fn load(dir: &Path) -> Result<Self, PipelineError> {
        let fragmentation = read_fragmentation(&dir.join(FRAGMENTS_DIR))?;
        let dict_path = dir.join(DICTIONARY_FILE);
        let dictionary = Dictionary::from_text(&read_input(&dict_path)?)?;
        let alloc_path = dir.join(ALLOCATION_FILE);
        let allocation = parse_allocation(&read_input(&alloc_path)?)
            .map_err(|message| PipelineError::Parse { path: alloc_path, message })?;
        Ok(Artifacts { fragmentation, allocation, dictionary })
    }

    pub fn engine(&self) -> QueryEngine {
        QueryEngine::new(self.dictionary.clone(), SimulatedCluster::new(&self.fragmentation, &self.allocation))
    }
}

/// Reads a query file into its connected components.
pub fn load_query(path: &Path) -> Result<Vec<QueryGraph>, PipelineError> {
    let text = read_input(path)?;
    let body: String = text.lines().filter(|l| !l.trim_start().starts_with('#')).collect::<Vec<_>>().join("\n");
    crate::query::parse_query(&body).map_err(|e| PipelineError::Parse { path: path.to_path_buf(), message: e.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g0() -> RdfGraph {
        parse_ntriples(include_str!("../../fixtures/g0.nt")).unwrap()
    }

    fn w0() -> Workload {
        parse_workload(include_str!("../../fixtures/w0.rq")).unwrap()
    }

    fn params(sc: usize) -> Params {
        Params { theta: 2, min_sup: 2, sc: Some(sc), sites: 2, ..Params::default() }
    }

    #[test]
    fn fixture_summary() {
        let s = run_offline(&g0(), &w0(), &params(9)).unwrap().summary();
        assert_eq!((s.patterns, s.benefit, s.hot_edges, s.cold_edges), (3, 8, 5, 4));
        assert!((s.redundancy - 13.0 / 9.0).abs() < 1e-9);
        let s = run_offline(&g0(), &w0(), &params(8)).unwrap().summary();
        assert_eq!((s.patterns, s.benefit), (2, 5));
    }

    #[test]
    fn budget_error_is_config() {
        let e = run_offline(&g0(), &w0(), &params(4)).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn artifacts_roundtrip() {
        for strategy in [Strategy::Vertical, Strategy::Horizontal] {
            let dir = tempfile::tempdir().unwrap();
            let off = run_offline(&g0(), &w0(), &Params { strategy, ..params(9) }).unwrap();
            off.persist(dir.path()).unwrap();
            let a = Artifacts::load(dir.path()).unwrap();
            assert_eq!(a.dictionary, off.dictionary);
            assert_eq!(a.allocation, off.allocation);
            assert_eq!(a.fragmentation.union(), off.fragmentation.union());
        }
    }

    #[test]
    fn allocation_text_roundtrip() {
        let a = Allocation::from_clusters(vec![vec![FragmentId::COLD, FragmentId(1)], vec![], vec![FragmentId(2)]]);
        let text = allocation_text(&a);
        assert_eq!(text, "site 0: cold, F1\nsite 1: \nsite 2: F2\n");
        assert_eq!(parse_allocation(&text).unwrap(), a);
        assert!(parse_allocation("site 1: F1").is_err());
    }

    #[test]
    fn missing_input_is_usage_error() {
        let e = load_graph(Path::new("/nonexistent/graph.nt")).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        let dir = tempfile::tempdir().unwrap();
        let bad = dir.path().join("bad.nt");
        fs::write(&bad, "<a> <b>\n").unwrap();
        assert_eq!(load_graph(&bad).unwrap_err().exit_code(), 1);
    }
}
