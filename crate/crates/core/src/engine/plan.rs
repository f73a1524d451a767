use std::collections::BTreeSet;

use super::Decomposition;

/// Left-deep join order over the subqueries of a decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JoinPlan {
    /// Subquery indices in join order.
    pub order: Vec<usize>,
    /// Sum of the estimated sizes of every intermediate result; the card
    /// itself for a single subquery.
    pub est_cost: u128,
}

/// Orders the decomposition's subqueries by dynamic programming over subsets.
pub fn optimize(d: &Decomposition) -> JoinPlan {
    let cards: Vec<u128> = d.subqueries.iter().map(|s| s.card).collect();
    let vars: Vec<BTreeSet<String>> = d.subqueries.iter().map(|s| s.graph.variables().into_iter().collect()).collect();
    optimize_cards(&cards, &vars)
}

#[derive(Clone, Debug)]
struct Entry {
    cost: u128,
    cartesian: usize,
    order: Vec<usize>,
}

impl Entry {
    fn key(&self) -> (u128, usize, &[usize]) {
        (self.cost, self.cartesian, &self.order)
    }
}

/// Dynamic program over subquery subsets. Each join step costs the product
/// of the cards joined so far. Among equal costs the plan with fewer
/// Cartesian steps wins, then the lexicographically smallest order.
///
/// `vars[i]` holds the variables of subquery `i`. Panics if there are more
/// than 20 subqueries or the inputs differ in length.
pub fn optimize_cards(cards: &[u128], vars: &[BTreeSet<String>]) -> JoinPlan {
    let t = cards.len();
    assert_eq!(t, vars.len());
    assert!(t <= 20, "too many subqueries for exhaustive ordering");
    if t == 0 {
        return JoinPlan { order: Vec::new(), est_cost: 0 };
    }
    if t == 1 {
        return JoinPlan { order: vec![0], est_cost: cards[0] };
    }
    let full = (1usize << t) - 1;
    let product = |set: usize| (0..t).filter(|i| set & (1 << i) != 0).fold(1u128, |p, i| p.saturating_mul(cards[i]));
    let union_vars = |set: usize| -> BTreeSet<&String> {
        (0..t).filter(|i| set & (1 << i) != 0).flat_map(|i| vars[i].iter()).collect()
    };

    let mut table: Vec<Option<Entry>> = vec![None; full + 1];
    for i in 0..t {
        table[1 << i] = Some(Entry { cost: 0, cartesian: 0, order: vec![i] });
    }
    let mut sets: Vec<usize> = (1..=full).collect();
    sets.sort_by_key(|s| s.count_ones());
    for set in sets {
        let Some(cur) = table[set].clone() else { continue };
        let bound = union_vars(set);
        for (j, vj) in vars.iter().enumerate() {
            if set & (1 << j) != 0 {
                continue;
            }
            let next = set | (1 << j);
            let shares = vj.iter().any(|v| bound.contains(v));
            let mut order = cur.order.clone();
            order.push(j);
            let cand = Entry {
                cost: cur.cost.saturating_add(product(next)),
                cartesian: cur.cartesian + usize::from(!shares),
                order,
            };
            let better = match &table[next] {
                None => true,
                Some(e) => cand.key() < e.key(),
            };
            if better {
                table[next] = Some(cand);
            }
        }
    }
    let best = table[full].take().expect("full set reached");
    JoinPlan { order: best.order, est_cost: best.cost }
}
