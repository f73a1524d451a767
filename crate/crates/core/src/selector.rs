//! Pattern selection under an edge-storage budget.
//!
//! The benefit of a pattern set is, summed over workload queries, the size of
//! the largest selected pattern each query contains. The greedy seeds every
//! single-edge pattern so that all hot edges land in some fragment, then
//! compares the best single multi-edge addition against an iterative
//! marginal-gain-per-cost greedy and keeps whichever scores higher.

use std::cmp::Ordering;

use thiserror::Error;

use crate::miner::{usage, Pattern, PatternStats, WeightedShapes};
use crate::query::{QueryGraph, Workload};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SelectionConfig {
    /// Edge-storage budget `SC`.
    pub storage_capacity: usize,
    pub min_sup: usize,
    pub theta: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelectionResult {
    /// Sorted by `(edge count, code)`.
    pub selected: Vec<PatternStats>,
    pub total_edge_cost: usize,
    pub benefit: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SelectionError {
    #[error("storage capacity {capacity} is below the {seed_cost} edges needed by single-edge patterns")]
    BudgetBelowSeed { capacity: usize, seed_cost: usize },
}

/// `|E(p)| × use(Q, p)`.
pub fn benefit_single(p: &Pattern, q: &QueryGraph) -> usize {
    p.edge_count() * usage(q, p)
}

/// `Σ_Q max_{p∈P} benefit_single(p, Q)`; zero for an empty set.
pub fn benefit_set<'a>(patterns: impl IntoIterator<Item = &'a Pattern>, workload: &Workload) -> usize {
    let patterns: Vec<&Pattern> = patterns.into_iter().collect();
    workload
        .queries()
        .iter()
        .map(|q| patterns.iter().map(|p| benefit_single(p, q)).max().unwrap_or(0))
        .sum()
}

/// Precomputed usage of each candidate over the folded workload.
struct BenefitTable {
    weights: Vec<usize>,
    // For each candidate, per-shape benefit (size or 0).
    gains: Vec<Vec<usize>>,
}

impl BenefitTable {
    fn new(candidates: &[PatternStats], workload: &Workload) -> Self {
        let shapes = WeightedShapes::new(workload);
        let all: Vec<usize> = (0..shapes.shapes.len()).collect();
        let weights = shapes.shapes.iter().map(|(_, w)| *w).collect();
        let gains = candidates
            .iter()
            .map(|c| {
                let mut g = vec![0; all.len()];
                for i in shapes.support(&c.pattern, all.iter().copied()) {
                    g[i] = c.pattern.edge_count();
                }
                g
            })
            .collect();
        BenefitTable { weights, gains }
    }

    fn best_of(&self, set: &[usize]) -> Vec<usize> {
        let mut best = vec![0; self.weights.len()];
        for &c in set {
            for (b, &g) in best.iter_mut().zip(&self.gains[c]) {
                *b = (*b).max(g);
            }
        }
        best
    }

    fn total(&self, best: &[usize]) -> usize {
        best.iter().zip(&self.weights).map(|(b, w)| b * w).sum()
    }

    fn marginal(&self, best: &[usize], c: usize) -> usize {
        self.gains[c]
            .iter()
            .zip(best)
            .zip(&self.weights)
            .map(|((&g, &b), &w)| g.saturating_sub(b) * w)
            .sum()
    }
}

/// Benefit per unit of storage; zero-cost items with positive gain rank above
/// every finite ratio.
#[derive(Clone, Copy, Debug)]
struct Ratio {
    gain: usize,
    cost: usize,
}

impl Ratio {
    fn cmp(&self, other: &Ratio) -> Ordering {
        match (self.cost, other.cost) {
            (0, 0) => self.gain.cmp(&other.gain),
            (0, _) if self.gain > 0 => Ordering::Greater,
            (_, 0) if other.gain > 0 => Ordering::Less,
            (0, _) => Ordering::Less,
            (_, 0) => Ordering::Greater,
            (a, b) => (self.gain as u128 * b as u128).cmp(&(other.gain as u128 * a as u128)),
        }
    }
}

/// Picks the best candidate by ratio; ties go to the smaller canonical code.
fn argmax(
    candidates: &[PatternStats],
    pool: impl IntoIterator<Item = (usize, Ratio)>,
) -> Option<(usize, Ratio)> {
    pool.into_iter().fold(None, |acc, (i, r)| match acc {
        None => Some((i, r)),
        Some((j, s)) => match r.cmp(&s) {
            Ordering::Greater => Some((i, r)),
            Ordering::Equal if candidates[i].pattern.code() < candidates[j].pattern.code() => Some((i, r)),
            _ => Some((j, s)),
        },
    })
}

/// Runs the two-phase greedy. Every single-edge candidate is selected
/// unconditionally; the budget must cover them.
pub fn select_patterns(
    candidates: &[PatternStats],
    workload: &Workload,
    cfg: &SelectionConfig,
) -> Result<SelectionResult, SelectionError> {
    let table = BenefitTable::new(candidates, workload);
    let capacity = cfg.storage_capacity;

    let seeds: Vec<usize> = (0..candidates.len()).filter(|&i| candidates[i].pattern.edge_count() == 1).collect();
    let seed_cost: usize = seeds.iter().map(|&i| candidates[i].match_edge_count).sum();
    if seed_cost > capacity {
        return Err(SelectionError::BudgetBelowSeed { capacity, seed_cost });
    }
    let residual = capacity - seed_cost;
    let multi: Vec<usize> = (0..candidates.len()).filter(|&i| candidates[i].pattern.edge_count() > 1).collect();

    // Best single multi-edge pattern by standalone benefit per cost.
    let empty = vec![0; table.weights.len()];
    let p1 = argmax(
        candidates,
        multi.iter().filter(|&&i| candidates[i].match_edge_count <= residual).map(|&i| {
            (i, Ratio { gain: table.marginal(&empty, i), cost: candidates[i].match_edge_count })
        }),
    )
    .filter(|(_, r)| r.gain > 0)
    .map(|(i, _)| i);

    // Iterative marginal-gain greedy on top of the seeds.
    let mut p2: Vec<usize> = Vec::new();
    let mut spent = 0usize;
    let mut current = seeds.clone();
    let mut best = table.best_of(&current);
    loop {
        let pick = argmax(
            candidates,
            multi
                .iter()
                .filter(|i| !p2.contains(i))
                .filter(|&&i| spent + candidates[i].match_edge_count <= residual)
                .map(|&i| (i, Ratio { gain: table.marginal(&best, i), cost: candidates[i].match_edge_count })),
        );
        match pick {
            Some((i, r)) if r.gain > 0 => {
                p2.push(i);
                spent += candidates[i].match_edge_count;
                current.push(i);
                best = table.best_of(&current);
            }
            _ => break,
        }
    }

    let with_p1: Vec<usize> = seeds.iter().copied().chain(p1).collect();
    let with_p2: Vec<usize> = seeds.iter().copied().chain(p2).collect();
    let b1 = table.total(&table.best_of(&with_p1));
    let b2 = table.total(&table.best_of(&with_p2));
    let (chosen, benefit) = if b1 >= b2 { (with_p1, b1) } else { (with_p2, b2) };

    let mut selected: Vec<PatternStats> = chosen.iter().map(|&i| candidates[i].clone()).collect();
    selected.sort_by(|a, b| a.pattern.cmp(&b.pattern));
    let total_edge_cost = selected.iter().map(|s| s.match_edge_count).sum();
    Ok(SelectionResult { selected, total_edge_cost, benefit })
}
