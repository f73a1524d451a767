//! Online query processing: split a query into fragment-aligned
//! subqueries, order their joins and run them over simulated sites.

mod decompose;
mod exec;
mod plan;

pub use decompose::{decompose, Decomposition, Subquery, SubqueryKind, MAX_QUERY_EDGES};
pub use exec::{combine_components, execute, natural_join, ExecutionReport, QueryEngine, QueryOutcome, SimulatedCluster};
pub use plan::{optimize, optimize_cards, JoinPlan};
