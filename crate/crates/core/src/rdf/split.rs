use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::RdfGraph;
use crate::query::Workload;

/// Hot/cold partition of a data graph.
#[derive(Debug, Clone)]
pub struct GraphSplit {
    pub hot: RdfGraph,
    pub cold: RdfGraph,
    pub frequent_properties: BTreeSet<Arc<str>>,
    pub theta: usize,
}

/// Number of distinct workload queries mentioning each fixed property.
pub fn property_frequencies(workload: &Workload) -> BTreeMap<Arc<str>, usize> {
    let mut freq = BTreeMap::new();
    for q in workload.queries() {
        for p in q.properties() {
            *freq.entry(p).or_insert(0) += 1;
        }
    }
    freq
}

/// Routes every edge by whether its property appears in at least `theta`
/// workload queries.
pub fn split_hot_cold(g: &RdfGraph, workload: &Workload, theta: usize) -> GraphSplit {
    assert!(theta >= 1, "theta must be at least 1");
    let frequent_properties: BTreeSet<Arc<str>> = property_frequencies(workload)
        .into_iter()
        .filter(|&(_, n)| n >= theta)
        .map(|(p, _)| p)
        .collect();
    let hot = g.filter(|t| frequent_properties.contains(&t.property));
    let cold = g.filter(|t| !frequent_properties.contains(&t.property));
    GraphSplit { hot, cold, frequent_properties, theta }
}
