//! Structural simple and minterm predicates.
//!
//! A simple predicate pins one pattern variable to (or away from) a constant
//! harvested from the workload. A minterm fixes a polarity for every harvested
//! `(variable, value)` pair. Consistent minterms correspond to *cells*: for
//! each constrained variable, either one of its values or "none of them".
//! Cells partition the pattern's matches. Cells accessed fewer than `minAcc`
//! times fold into one residual minterm, which keeps the partition intact.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::matcher::embed;
use crate::miner::Pattern;
use crate::query::{QueryGraph, Workload};
use crate::rdf::Term;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PredicateOp {
    Eq,
    Ne,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SimplePredicate {
    pub pattern: Pattern,
    pub variable: String,
    pub op: PredicateOp,
    pub value: Term,
}

impl SimplePredicate {
    fn key(&self) -> (&str, &Term, PredicateOp) {
        (&self.variable, &self.value, self.op)
    }
}

impl fmt::Display for SimplePredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.op {
            PredicateOp::Eq => "=",
            PredicateOp::Ne => "!=",
        };
        write!(f, "{}{}{}", self.variable, op, self.value)
    }
}

/// Per constrained variable: `Some(value)` for an equality, `None` for
/// "differs from every harvested value".
pub type CellKey = BTreeMap<String, Option<Term>>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MintermPredicate {
    pub pattern: Pattern,
    /// One conjunct per harvested `(variable, value)` pair, sorted. Empty for
    /// the unconstrained minterm and for the residual.
    pub conjuncts: Vec<SimplePredicate>,
    pub acc: usize,
    /// Set on the residual minterm that absorbs every pruned cell.
    pub residual: bool,
}

impl MintermPredicate {
    /// Conjuncts joined by `|`, `residual` for the residual minterm, empty
    /// when unconstrained.
    pub fn descriptor(&self) -> String {
        if self.residual {
            return RESIDUAL.to_string();
        }
        self.conjuncts.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("|")
    }

    pub fn cell(&self) -> CellKey {
        let mut key = CellKey::new();
        for c in &self.conjuncts {
            let slot = key.entry(c.variable.clone()).or_insert(None);
            if c.op == PredicateOp::Eq {
                *slot = Some(c.value.clone());
            }
        }
        key
    }
}

pub(crate) const RESIDUAL: &str = "residual";

/// Cell bookkeeping shared by fragment construction and dictionary lookup.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CellTable {
    pub domains: BTreeMap<String, BTreeSet<Term>>,
    pub kept: Vec<CellKey>,
    pub has_residual: bool,
    index: HashMap<CellKey, usize>,
}

impl CellTable {
    pub fn new(domains: BTreeMap<String, BTreeSet<Term>>, kept: Vec<CellKey>, has_residual: bool) -> Self {
        let index = kept.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        CellTable { domains, kept, has_residual, index }
    }

    /// Rebuilds domains from the full conjunct lists of the kept minterms.
    pub fn from_minterms(minterms: &[MintermPredicate]) -> Self {
        let mut domains: BTreeMap<String, BTreeSet<Term>> = BTreeMap::new();
        let mut kept = Vec::new();
        let mut has_residual = false;
        for m in minterms {
            if m.residual {
                has_residual = true;
                continue;
            }
            for c in &m.conjuncts {
                domains.entry(c.variable.clone()).or_default().insert(c.value.clone());
            }
            kept.push(m.cell());
        }
        CellTable::new(domains, kept, has_residual)
    }

    /// Cell of a match, given its value for each variable.
    pub fn cell_of<'a>(&self, value: impl Fn(&str) -> &'a Term) -> CellKey {
        self.domains
            .iter()
            .map(|(var, dom)| {
                let v = value(var);
                (var.clone(), dom.contains(v).then(|| v.clone()))
            })
            .collect()
    }

    /// Index of the kept cell holding the match, or `None` for the residual.
    pub fn classify<'a>(&self, value: impl Fn(&str) -> &'a Term) -> Option<usize> {
        self.index.get(&self.cell_of(value)).copied()
    }

    /// Kept cells that may hold matches of a subquery whose pattern variables
    /// are bound to the given constants, and whether the residual may.
    pub fn consistent(&self, constants: &BTreeMap<String, Term>) -> (Vec<usize>, bool) {
        let allowed = |var: &str, slot: &Option<Term>| match constants.get(var) {
            None => true,
            Some(c) => match slot {
                Some(v) => v == c,
                None => !self.domains[var].contains(c),
            },
        };
        let kept: Vec<usize> = (0..self.kept.len())
            .filter(|&i| self.kept[i].iter().all(|(var, slot)| allowed(var, slot)))
            .collect();
        let total = self.domains.iter().fold(1u128, |acc, (var, dom)| {
            let options = if constants.contains_key(var) { 1 } else { dom.len() as u128 + 1 };
            acc.saturating_mul(options)
        });
        let residual = self.has_residual && total > kept.len() as u128;
        (kept, residual)
    }
}

/// Minterms of one pattern, kept cells first (sorted by descriptor), then the
/// residual when any cell was pruned.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MintermSet {
    pub pattern: Pattern,
    pub minterms: Vec<MintermPredicate>,
    pub cells: CellTable,
}

impl MintermSet {
    /// Index into `minterms` for a match of the pattern.
    pub fn classify<'a>(&self, value: impl Fn(&str) -> &'a Term) -> usize {
        match self.cells.classify(value) {
            Some(i) => i,
            None => {
                debug_assert!(self.cells.has_residual);
                self.minterms.len() - 1
            }
        }
    }
}

/// Distinct workload queries with their multiplicities.
fn folded(workload: &Workload) -> Vec<(&QueryGraph, usize)> {
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    let mut out: Vec<(&QueryGraph, usize)> = Vec::new();
    for q in workload.queries() {
        let key = q.to_string();
        match index.get(&key) {
            Some(&i) => out[i].1 += 1,
            None => {
                index.insert(key, out.len());
                out.push((q, 1));
            }
        }
    }
    out
}

/// Constants sitting at the image of each pattern variable, one map per
/// containment mapping of `p` into `q`.
fn profiles(p: &Pattern, q: &QueryGraph) -> Vec<BTreeMap<String, Term>> {
    let mut out = Vec::new();
    embed(p.graph(), q, &mut |map| {
        let prof = map
            .iter()
            .enumerate()
            .filter_map(|(i, &qv)| q.vertex(qv).as_const().map(|c| (Pattern::variable(i), c.clone())))
            .collect();
        out.push(prof);
        true
    });
    out
}

/// Harvests `p(var) = c` / `p(var) ≠ c` for every constant `c` found at the
/// image of a pattern variable in a workload query containing `p`.
pub fn harvest_simple_predicates(p: &Pattern, workload: &Workload) -> Vec<SimplePredicate> {
    let mut pairs: BTreeSet<(String, Term)> = BTreeSet::new();
    for (q, _) in folded(workload) {
        for prof in profiles(p, q) {
            pairs.extend(prof);
        }
    }
    let mut out: Vec<SimplePredicate> = pairs
        .into_iter()
        .flat_map(|(variable, value)| {
            [PredicateOp::Eq, PredicateOp::Ne].map(|op| SimplePredicate {
                pattern: p.clone(),
                variable: variable.clone(),
                op,
                value: value.clone(),
            })
        })
        .collect();
    out.sort_by(|a, b| a.key().cmp(&b.key()));
    out
}

/// Builds the minterms of `p` from its simple predicates.
///
/// `acc(mp)` counts queries with a containment mapping that puts the required
/// constant at every positively constrained variable. Cells with
/// `acc < min_acc` merge into the residual. Only cells reachable from some
/// query profile can have positive `acc`, so those are the only ones scored;
/// `min_acc` must be at least 1.
pub fn enumerate_minterms(p: &Pattern, sps: &[SimplePredicate], workload: &Workload, min_acc: usize) -> MintermSet {
    assert!(min_acc >= 1, "minAcc must be at least 1");
    let mut domains: BTreeMap<String, BTreeSet<Term>> = BTreeMap::new();
    for sp in sps {
        domains.entry(sp.variable.clone()).or_default().insert(sp.value.clone());
    }
    let queries = folded(workload);
    let query_profiles: Vec<(Vec<BTreeMap<String, Term>>, usize)> =
        queries.iter().map(|(q, w)| (profiles(p, q), *w)).collect();

    if domains.is_empty() {
        let acc = query_profiles.iter().filter(|(ps, _)| !ps.is_empty()).map(|(_, w)| w).sum();
        let only = MintermPredicate { pattern: p.clone(), conjuncts: Vec::new(), acc, residual: false };
        return MintermSet {
            pattern: p.clone(),
            minterms: vec![only],
            cells: CellTable::new(BTreeMap::new(), vec![CellKey::new()], false),
        };
    }

    let touched: Vec<(BTreeSet<CellKey>, usize)> =
        query_profiles.iter().map(|(profs, w)| (touched_cells(profs, &domains), *w)).collect();
    let mut acc: BTreeMap<CellKey, usize> = BTreeMap::new();
    for (cells, w) in &touched {
        for c in cells {
            *acc.entry(c.clone()).or_insert(0) += w;
        }
    }

    let kept_cells: BTreeSet<&CellKey> = acc.iter().filter(|(_, &a)| a >= min_acc).map(|(c, _)| c).collect();
    let total_cells = domains.values().fold(1u128, |t, d| t.saturating_mul(d.len() as u128 + 1));
    let has_residual = total_cells > kept_cells.len() as u128;

    let mut minterms: Vec<MintermPredicate> = kept_cells
        .iter()
        .map(|&cell| MintermPredicate {
            pattern: p.clone(),
            conjuncts: conjuncts_for(p, &domains, cell),
            acc: acc[cell],
            residual: false,
        })
        .collect();
    minterms.sort_by_key(MintermPredicate::descriptor);
    let kept: Vec<CellKey> = minterms.iter().map(MintermPredicate::cell).collect();
    if has_residual {
        let residual_acc = touched
            .iter()
            .filter(|(cells, _)| cells.iter().any(|c| !kept_cells.contains(c)))
            .map(|(_, w)| w)
            .sum();
        minterms.push(MintermPredicate { pattern: p.clone(), conjuncts: Vec::new(), acc: residual_acc, residual: true });
    }
    MintermSet { pattern: p.clone(), minterms, cells: CellTable::new(domains, kept, has_residual) }
}

/// Cells a query touches: for each containment mapping, every subset of the
/// constrained variables holding a harvested constant taken positively, the
/// rest "other".
fn touched_cells(profs: &[BTreeMap<String, Term>], domains: &BTreeMap<String, BTreeSet<Term>>) -> BTreeSet<CellKey> {
    let mut cells = BTreeSet::new();
    for prof in profs {
        let pinned: Vec<(&String, &Term)> = domains
            .iter()
            .filter_map(|(v, dom)| prof.get(v).filter(|t| dom.contains(*t)).map(|t| (v, t)))
            .collect();
        for mask in 0u32..(1 << pinned.len()) {
            let mut key: CellKey = domains.keys().map(|v| (v.clone(), None)).collect();
            for (bit, (v, t)) in pinned.iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    key.insert((*v).clone(), Some((*t).clone()));
                }
            }
            cells.insert(key);
        }
    }
    cells
}

/// `use(Q, mp)`: 1 when `q` contains the pattern with constants agreeing on
/// every positive conjunct. For the residual, 1 when `q` touches a pruned cell.
pub fn minterm_usage(q: &QueryGraph, m: &MintermPredicate, cells: &CellTable) -> usize {
    let touched = touched_cells(&profiles(&m.pattern, q), &cells.domains);
    let hit = if m.residual {
        touched.iter().any(|c| !cells.index.contains_key(c))
    } else {
        touched.contains(&m.cell())
    };
    usize::from(hit)
}

fn conjuncts_for(p: &Pattern, domains: &BTreeMap<String, BTreeSet<Term>>, cell: &CellKey) -> Vec<SimplePredicate> {
    let mut out: Vec<SimplePredicate> = domains
        .iter()
        .flat_map(|(var, dom)| {
            dom.iter().map(move |value| SimplePredicate {
                pattern: p.clone(),
                variable: var.clone(),
                op: if cell[var].as_ref() == Some(value) { PredicateOp::Eq } else { PredicateOp::Ne },
                value: value.clone(),
            })
        })
        .collect();
    out.sort_by(|a, b| a.key().cmp(&b.key()));
    out
}
