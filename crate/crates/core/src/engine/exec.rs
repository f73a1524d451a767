use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::mpsc;
use std::sync::Arc;
use std::thread;
use std::time::{Duration, Instant};

use log::trace;

use super::{decompose, optimize, Decomposition, JoinPlan, SubqueryKind};
use crate::allocator::Allocation;
use crate::dictionary::Dictionary;
use crate::fragmenter::{FragmentId, Fragmentation};
use crate::matcher::{evaluate, MatchSet};
use crate::query::QueryGraph;
use crate::rdf::{RdfGraph, Term};

/// In-process stand-in for a cluster: each site owns the fragments allocated
/// to it and evaluates subqueries on its own thread.
#[derive(Clone, Debug)]
pub struct SimulatedCluster {
    sites: Vec<BTreeMap<FragmentId, Arc<RdfGraph>>>,
    site_of: BTreeMap<FragmentId, usize>,
}

impl SimulatedCluster {
    pub fn new(frags: &Fragmentation, alloc: &Allocation) -> Self {
        let mut sites = vec![BTreeMap::new(); alloc.sites().max(1)];
        let mut site_of = BTreeMap::new();
        for f in &frags.fragments {
            let s = alloc.site_of.get(&f.id).copied().unwrap_or(0);
            sites[s].insert(f.id, f.graph.clone());
            site_of.insert(f.id, s);
        }
        SimulatedCluster { sites, site_of }
    }

    pub fn sites(&self) -> usize {
        self.sites.len()
    }

    pub fn site_of(&self, id: FragmentId) -> Option<usize> {
        self.site_of.get(&id).copied()
    }

    pub fn fragment_ids(&self) -> impl Iterator<Item = FragmentId> + '_ {
        self.site_of.keys().copied()
    }

    /// Edges stored per site.
    pub fn site_edges(&self) -> Vec<usize> {
        self.sites.iter().map(|s| s.values().map(|g| g.edge_count()).sum()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExecutionReport {
    pub bindings: MatchSet,
    pub sites_touched: BTreeSet<usize>,
    /// Binding rows sent from sites to the coordinator.
    pub shipped_bindings: usize,
    /// Rows times row width.
    pub shipped_cells: usize,
    /// Subquery indices in the order the coordinator joined them.
    pub join_order: Vec<usize>,
    pub elapsed: Duration,
}

struct Shipment {
    subquery: usize,
    rows: MatchSet,
}

/// Fragments that must be consulted for each subquery.
fn route(d: &Decomposition, dict: &Dictionary, cluster: &SimulatedCluster) -> Vec<Vec<FragmentId>> {
    d.subqueries
        .iter()
        .map(|s| match &s.kind {
            SubqueryKind::Pattern(_) => dict.lookup(&s.graph).map(|l| l.fragments).unwrap_or_default(),
            SubqueryKind::Cold => vec![FragmentId::COLD],
            SubqueryKind::Wildcard => cluster.fragment_ids().collect(),
        })
        .collect()
}

/// Runs the subqueries at their sites in parallel, ships the bindings to the
/// coordinator and joins them in plan order.
pub fn execute(
    q: &QueryGraph,
    plan: &JoinPlan,
    d: &Decomposition,
    cluster: &SimulatedCluster,
    dict: &Dictionary,
) -> ExecutionReport {
    let start = Instant::now();
    let routes = route(d, dict, cluster);
    let mut tasks: BTreeMap<usize, Vec<(usize, FragmentId)>> = BTreeMap::new();
    for (i, frags) in routes.iter().enumerate() {
        for &f in frags {
            if let Some(site) = cluster.site_of(f) {
                tasks.entry(site).or_default().push((i, f));
            }
        }
    }
    let sites_touched: BTreeSet<usize> = tasks.keys().copied().collect();

    let (tx, rx) = mpsc::channel::<Shipment>();
    thread::scope(|scope| {
        for (&site, work) in &tasks {
            let tx = tx.clone();
            let store = &cluster.sites[site];
            scope.spawn(move || {
                for &(i, f) in work {
                    let rows = evaluate(&d.subqueries[i].graph, &store[&f]);
                    trace!("site {site}: subquery {i} on {f} -> {} rows", rows.len());
                    if tx.send(Shipment { subquery: i, rows }).is_err() {
                        return;
                    }
                }
            });
        }
    });
    drop(tx);

    let mut gathered: Vec<Option<MatchSet>> = vec![None; d.len()];
    let mut shipped_bindings = 0;
    let mut shipped_cells = 0;
    for msg in rx {
        shipped_bindings += msg.rows.len();
        shipped_cells += msg.rows.len() * msg.rows.variables().len();
        let slot = &mut gathered[msg.subquery];
        *slot = Some(match slot.take() {
            None => msg.rows,
            Some(prev) => {
                let vars = prev.variables().to_vec();
                let mut rows = prev.into_rows();
                rows.extend(msg.rows.into_rows());
                MatchSet::from_rows(vars, rows)
            }
        });
    }

    let parts: Vec<MatchSet> = gathered
        .into_iter()
        .enumerate()
        .map(|(i, m)| m.unwrap_or_else(|| MatchSet::empty(d.subqueries[i].graph.variables())))
        .collect();
    let join_order = adaptive_order(plan, &parts);
    let mut result: Option<MatchSet> = None;
    for &i in &join_order {
        let joined = match result {
            None => parts[i].clone(),
            Some(acc) => natural_join(&acc, &parts[i]),
        };
        let empty = joined.is_empty();
        result = Some(joined);
        if empty {
            break;
        }
    }
    let bindings = match result {
        Some(r) if !r.is_empty() => r,
        _ => MatchSet::empty(q.variables()),
    };
    ExecutionReport { bindings, sites_touched, shipped_bindings, shipped_cells, join_order, elapsed: start.elapsed() }
}

/// Join order over the shipped parts: start from the smallest, then keep
/// taking the smallest part that shares a variable with what is joined so
/// far. Ties follow the plan order.
fn adaptive_order(plan: &JoinPlan, parts: &[MatchSet]) -> Vec<usize> {
    let rank: Vec<usize> = {
        let mut r = vec![0; parts.len()];
        for (pos, &i) in plan.order.iter().enumerate() {
            r[i] = pos;
        }
        r
    };
    let mut left: Vec<usize> = plan.order.clone();
    let mut bound: BTreeSet<&str> = BTreeSet::new();
    let mut order = Vec::with_capacity(left.len());
    while !left.is_empty() {
        let connected = |i: &usize| parts[*i].variables().iter().any(|v| bound.contains(v.as_str()));
        let pick = left
            .iter()
            .copied()
            .min_by_key(|i| (!order.is_empty() && !connected(i), parts[*i].len(), rank[*i]))
            .expect("non-empty");
        left.retain(|&i| i != pick);
        bound.extend(parts[pick].variables().iter().map(String::as_str));
        order.push(pick);
    }
    order
}

/// Joins two binding sets on their shared variables; a Cartesian product
/// when none are shared.
pub fn natural_join(a: &MatchSet, b: &MatchSet) -> MatchSet {
    let out_vars: Vec<String> =
        a.variables().iter().chain(b.variables()).cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let shared: Vec<(usize, usize)> = a
        .variables()
        .iter()
        .enumerate()
        .filter_map(|(i, v)| b.column(v).map(|j| (i, j)))
        .collect();
    let source: Vec<(bool, usize)> = out_vars
        .iter()
        .map(|v| match a.column(v) {
            Some(i) => (true, i),
            None => (false, b.column(v).expect("variable from one side")),
        })
        .collect();
    let mut index: HashMap<Vec<&Term>, Vec<&Vec<Term>>> = HashMap::new();
    for row in b.rows() {
        index.entry(shared.iter().map(|&(_, j)| &row[j]).collect()).or_default().push(row);
    }
    let mut rows = BTreeSet::new();
    for left in a.rows() {
        let key: Vec<&Term> = shared.iter().map(|&(i, _)| &left[i]).collect();
        for right in index.get(&key).into_iter().flatten() {
            rows.insert(source.iter().map(|&(from_a, k)| if from_a { left[k].clone() } else { right[k].clone() }).collect());
        }
    }
    MatchSet::from_rows(out_vars, rows)
}

/// Everything the online path produced for one query.
#[derive(Clone, Debug)]
pub struct QueryOutcome {
    pub decomposition: Decomposition,
    pub plan: JoinPlan,
    pub report: ExecutionReport,
}

/// Dictionary plus loaded cluster: decompose, plan and execute in one call.
#[derive(Clone, Debug)]
pub struct QueryEngine {
    pub dictionary: Arc<Dictionary>,
    pub cluster: Arc<SimulatedCluster>,
}

impl QueryEngine {
    pub fn new(dictionary: Dictionary, cluster: SimulatedCluster) -> Self {
        QueryEngine { dictionary: Arc::new(dictionary), cluster: Arc::new(cluster) }
    }

    pub fn from_parts(frags: &Fragmentation, alloc: &Allocation) -> Self {
        Self::new(Dictionary::build(frags, alloc), SimulatedCluster::new(frags, alloc))
    }

    pub fn run(&self, q: &QueryGraph) -> QueryOutcome {
        let decomposition = decompose(q, &self.dictionary);
        let plan = optimize(&decomposition);
        let report = execute(q, &plan, &decomposition, &self.cluster, &self.dictionary);
        QueryOutcome { decomposition, plan, report }
    }

    /// Runs each connected component and combines their answers with a
    /// Cartesian product.
    pub fn run_components(&self, components: &[QueryGraph]) -> Vec<QueryOutcome> {
        components.iter().map(|q| self.run(q)).collect()
    }
}

/// Cartesian combination of per-component answers.
pub fn combine_components(outcomes: &[QueryOutcome]) -> MatchSet {
    let mut iter = outcomes.iter().map(|o| &o.report.bindings);
    let Some(first) = iter.next() else { return MatchSet::default() };
    iter.fold(first.clone(), |acc, m| natural_join(&acc, m))
}
