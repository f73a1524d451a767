//! Clustering fragments onto sites by co-access density.
//!
//! Two fragments are affine when workload queries use both of them. The
//! allocation graph carries those affinities as edge weights, and a
//! pairwise-nearest-neighbour merge repeatedly joins the two clusters whose
//! union would be densest until `m` clusters remain.

use std::collections::{BTreeMap, BTreeSet};

use log::warn;
use num_rational::Ratio;

use crate::fragmenter::{minterm_usage, CellTable, Fragment, FragmentId, FragmentSource, Fragmentation};
use crate::miner::usage;
use crate::query::{QueryGraph, Workload};

/// Undirected weighted graph over non-cold fragments.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AllocationGraph {
    /// Sorted.
    pub nodes: Vec<FragmentId>,
    /// Keyed by `(smaller id, larger id)`; every weight is positive.
    pub edges: BTreeMap<(FragmentId, FragmentId), u64>,
}

impl AllocationGraph {
    pub fn new(nodes: impl IntoIterator<Item = FragmentId>, edges: impl IntoIterator<Item = (FragmentId, FragmentId, u64)>) -> Self {
        let nodes: BTreeSet<FragmentId> = nodes.into_iter().collect();
        let edges = edges
            .into_iter()
            .filter(|&(a, b, w)| w > 0 && a != b)
            .map(|(a, b, w)| ((a.min(b), a.max(b)), w))
            .collect();
        AllocationGraph { nodes: nodes.into_iter().collect(), edges }
    }

    pub fn weight(&self, a: FragmentId, b: FragmentId) -> u64 {
        self.edges.get(&(a.min(b), a.max(b))).copied().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Allocation {
    /// One entry per site; each sorted.
    pub clusters: Vec<Vec<FragmentId>>,
    pub site_of: BTreeMap<FragmentId, usize>,
}

impl Allocation {
    pub fn from_clusters(clusters: Vec<Vec<FragmentId>>) -> Self {
        let site_of = clusters
            .iter()
            .enumerate()
            .flat_map(|(s, c)| c.iter().map(move |&f| (f, s)))
            .collect();
        Allocation { clusters, site_of }
    }

    pub fn sites(&self) -> usize {
        self.clusters.len()
    }

    /// Puts the cold fragment on site 0.
    pub fn pin_cold(mut self) -> Self {
        if self.clusters.is_empty() {
            self.clusters.push(Vec::new());
        }
        if !self.site_of.contains_key(&FragmentId::COLD) {
            self.clusters[0].insert(0, FragmentId::COLD);
            self.site_of.insert(FragmentId::COLD, 0);
        }
        self
    }

    /// Edges stored at each site.
    pub fn site_edge_counts(&self, frags: &Fragmentation) -> Vec<usize> {
        self.clusters
            .iter()
            .map(|c| c.iter().filter_map(|&id| frags.get(id)).map(Fragment::edge_count).sum())
            .collect()
    }

    /// `max / min` site edge count; infinite when some site is empty but
    /// another is not, 1 when all are empty.
    pub fn skew(&self, frags: &Fragmentation) -> f64 {
        let counts = self.site_edge_counts(frags);
        let max = counts.iter().copied().max().unwrap_or(0);
        let min = counts.iter().copied().min().unwrap_or(0);
        match (max, min) {
            (0, _) => 1.0,
            (_, 0) => f64::INFINITY,
            (a, b) => a as f64 / b as f64,
        }
    }
}

/// Per-query usage of a fragment's source; all zero for the cold fragment.
fn usage_vector(frag: &Fragment, queries: &[QueryGraph], cells: &BTreeMap<String, CellTable>) -> Vec<u64> {
    queries
        .iter()
        .map(|q| match &frag.source {
            FragmentSource::Cold => 0,
            FragmentSource::Vertical(p) => usage(q, p) as u64,
            FragmentSource::Horizontal(m) => minterm_usage(q, m, &cells[m.pattern.code().as_str()]) as u64,
        })
        .collect()
}

fn cell_tables(frags: &Fragmentation) -> BTreeMap<String, CellTable> {
    let mut grouped: BTreeMap<String, Vec<_>> = BTreeMap::new();
    for f in &frags.fragments {
        if let FragmentSource::Horizontal(m) = &f.source {
            grouped.entry(m.pattern.code().to_string()).or_default().push(m.clone());
        }
    }
    grouped.into_iter().map(|(k, ms)| (k, CellTable::from_minterms(&ms))).collect()
}

/// `Σ_Q use(Q, src1) × use(Q, src2)` for two fragments of one fragmentation.
pub fn affinity(frags: &Fragmentation, a: FragmentId, b: FragmentId, workload: &Workload) -> u64 {
    let cells = cell_tables(frags);
    let (Some(fa), Some(fb)) = (frags.get(a), frags.get(b)) else { return 0 };
    let ua = usage_vector(fa, workload.queries(), &cells);
    let ub = usage_vector(fb, workload.queries(), &cells);
    ua.iter().zip(&ub).map(|(x, y)| x * y).sum()
}

pub fn build_allocation_graph(frags: &Fragmentation, workload: &Workload) -> AllocationGraph {
    let cells = cell_tables(frags);
    let hot: Vec<&Fragment> = frags.hot_fragments().collect();
    let uses: Vec<Vec<u64>> = hot.iter().map(|f| usage_vector(f, workload.queries(), &cells)).collect();
    let mut edges = Vec::new();
    for i in 0..hot.len() {
        for j in i + 1..hot.len() {
            let w: u64 = uses[i].iter().zip(&uses[j]).map(|(x, y)| x * y).sum();
            edges.push((hot[i].id, hot[j].id, w));
        }
    }
    AllocationGraph::new(hot.iter().map(|f| f.id), edges)
}

fn pairs(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

fn internal_weight(cluster: &[FragmentId], ag: &AllocationGraph) -> u64 {
    let mut sum = 0;
    for (i, &a) in cluster.iter().enumerate() {
        for &b in &cluster[i + 1..] {
            sum += ag.weight(a, b);
        }
    }
    sum
}

/// Intra-cluster weight over the number of possible pairs; 0 for clusters
/// with fewer than two fragments.
pub fn density(cluster: &[FragmentId], ag: &AllocationGraph) -> Ratio<u64> {
    let n = cluster.len() as u64;
    if n < 2 {
        return Ratio::from_integer(0);
    }
    Ratio::new(internal_weight(cluster, ag), pairs(n))
}

/// Greedy pairwise merging down to `m` clusters. Each candidate merge is
/// scored by the cross weight between the two clusters over the pair count
/// of their union; ties go to the pair with the smallest member ids. When no
/// connected pair is left, the remaining clusters beyond the `m` largest are
/// handed one at a time to whichever cluster currently holds the fewest
/// fragments. Sites are numbered by their smallest fragment id.
///
/// Panics if `m` is 0.
pub fn allocate(ag: &AllocationGraph, m: usize) -> Allocation {
    assert!(m >= 1, "at least one site is required");
    let clusters: Vec<Vec<FragmentId>> = ag.nodes.iter().map(|&f| vec![f]).collect();
    if m > clusters.len() {
        let mut clusters = clusters;
        warn!("{} sites requested for {} fragments; {} sites stay empty", m, clusters.len(), m - clusters.len());
        clusters.resize(m, Vec::new());
        return Allocation::from_clusters(clusters);
    }

    // Cross weights between current clusters, kept in step with merges.
    // Cluster order always follows smallest member, so `(i, j)` with `i < j`
    // is also the tie-break order.
    let n = clusters.len();
    let mut cross: Vec<Vec<u64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 0 } else { ag.weight(ag.nodes[i], ag.nodes[j]) }).collect())
        .collect();
    let mut alive: Vec<usize> = (0..n).collect();
    let mut members = clusters;
    while alive.len() > m {
        // (cross, pair count, i, j)
        let mut best: Option<(u64, u64, usize, usize)> = None;
        for (a, &i) in alive.iter().enumerate() {
            for &j in &alive[a + 1..] {
                let w = cross[i][j];
                if w == 0 {
                    continue;
                }
                let d = pairs((members[i].len() + members[j].len()) as u64);
                let better = match best {
                    None => true,
                    Some((bw, bd, _, _)) => (w as u128) * (bd as u128) > (bw as u128) * (d as u128),
                };
                if better {
                    best = Some((w, d, i, j));
                }
            }
        }
        let Some((_, _, i, j)) = best else { break };
        let moved = std::mem::take(&mut members[j]);
        members[i].extend(moved);
        members[i].sort();
        alive.retain(|&k| k != j);
        for &k in &alive {
            if k != i {
                let w = cross[i][k] + cross[j][k];
                cross[i][k] = w;
                cross[k][i] = w;
            }
        }
    }
    let mut clusters: Vec<Vec<FragmentId>> = alive.into_iter().map(|k| std::mem::take(&mut members[k])).collect();

    if clusters.len() > m {
        clusters.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
        let leftovers = clusters.split_off(m);
        for c in leftovers {
            let target = (0..clusters.len()).min_by_key(|&k| (clusters[k].len(), clusters[k][0])).expect("m >= 1");
            clusters[target].extend(c);
            clusters[target].sort();
        }
    }
    clusters.sort_by_key(|c| c[0]);
    Allocation::from_clusters(clusters)
}

/// Builds the allocation graph, clusters onto `m` sites and pins the cold
/// fragment (if any) to site 0.
pub fn allocate_fragmentation(frags: &Fragmentation, workload: &Workload, m: usize) -> (AllocationGraph, Allocation) {
    let ag = build_allocation_graph(frags, workload);
    let mut alloc = allocate(&ag, m);
    if frags.cold().is_some() {
        alloc = alloc.pin_cold();
    }
    (ag, alloc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fragmenter::vertical_fragmentation;
    use crate::miner::{access_frequency, FrequentPattern, Pattern, PatternStats};
    use crate::query::{parse_query, parse_workload};
    use crate::rdf::{parse_ntriples, RdfGraph};

    fn f(n: u32) -> FragmentId {
        FragmentId(n)
    }

    fn w0_fragments() -> (Fragmentation, Workload) {
        let w = parse_workload(include_str!("../fixtures/w0.rq")).unwrap();
        let g = parse_ntriples(include_str!("../fixtures/g0.nt")).unwrap();
        let hot = g.filter(|t| matches!(&*t.property, "influencedBy" | "mainInterest"));
        let pb = Pattern::from_shape(
            &parse_query("SELECT * WHERE { ?x <influencedBy> ?y . ?x <mainInterest> ?z }").unwrap()[0],
        )
        .unwrap();
        let stats: Vec<PatternStats> = [Pattern::single_edge("influencedBy"), Pattern::single_edge("mainInterest"), pb]
            .into_iter()
            .map(|p| {
                let acc = access_frequency(&w, &p);
                PatternStats::measure(FrequentPattern { pattern: p, acc }, &hot)
            })
            .collect();
        let cold = g.filter(|t| !matches!(&*t.property, "influencedBy" | "mainInterest"));
        (vertical_fragmentation(&stats, &hot).with_cold(cold), w)
    }

    #[test]
    fn w0_affinities() {
        let (frags, w) = w0_fragments();
        assert_eq!(affinity(&frags, f(1), f(2), &w), 3);
        assert_eq!(affinity(&frags, f(1), f(3), &w), 3);
        assert_eq!(affinity(&frags, FragmentId::COLD, f(1), &w), 0);
        let ag = build_allocation_graph(&frags, &w);
        assert_eq!(ag.nodes, vec![f(1), f(2), f(3)]);
        assert_eq!(ag.edges.values().copied().collect::<Vec<_>>(), vec![3, 3, 3]);
    }

    #[test]
    fn densities() {
        let ag = AllocationGraph::new([f(1), f(2), f(3)], [(f(1), f(2), 3), (f(1), f(3), 3), (f(2), f(3), 3)]);
        assert_eq!(density(&[f(1), f(2)], &ag), Ratio::from_integer(3));
        assert_eq!(density(&[f(1), f(2), f(3)], &ag), Ratio::from_integer(3));
        assert_eq!(density(&[f(1)], &ag), Ratio::from_integer(0));
        let sparse = AllocationGraph::new([f(1), f(2)], []);
        assert_eq!(density(&[f(1), f(2)], &sparse), Ratio::from_integer(0));
    }

    #[test]
    fn triangle_into_two_sites() {
        let (frags, w) = w0_fragments();
        let (_, alloc) = allocate_fragmentation(&frags, &w, 2);
        assert_eq!(alloc.clusters, vec![vec![FragmentId::COLD, f(1), f(2)], vec![f(3)]]);
        assert_eq!(alloc.site_of[&f(3)], 1);
        assert_eq!(alloc.site_edge_counts(&frags), vec![4 + 2 + 3, 4]);
    }

    #[test]
    fn extremes() {
        let ag = AllocationGraph::new([f(1), f(2), f(3)], [(f(1), f(2), 1)]);
        assert_eq!(allocate(&ag, 3).clusters, vec![vec![f(1)], vec![f(2)], vec![f(3)]]);
        assert_eq!(allocate(&ag, 1).clusters, vec![vec![f(1), f(2), f(3)]]);
        let many = allocate(&ag, 5);
        assert_eq!(many.sites(), 5);
        assert!(many.clusters[3].is_empty() && many.clusters[4].is_empty());
    }

    #[test]
    fn disconnected_leftovers_fill_smallest() {
        let ag = AllocationGraph::new([f(1), f(2), f(3), f(4)], [(f(1), f(2), 5)]);
        let alloc = allocate(&ag, 2);
        assert_eq!(alloc.clusters, vec![vec![f(1), f(2)], vec![f(3), f(4)]]);
    }

    #[test]
    fn skew_of_sites() {
        let (frags, w) = w0_fragments();
        let (_, alloc) = allocate_fragmentation(&frags, &w, 2);
        assert!((alloc.skew(&frags) - 9.0 / 4.0).abs() < 1e-12);
        let empty = Fragmentation { strategy: frags.strategy, fragments: vec![] }.with_cold(RdfGraph::empty());
        assert_eq!(allocate(&AllocationGraph::default(), 1).pin_cold().skew(&empty), 1.0);
    }
}
