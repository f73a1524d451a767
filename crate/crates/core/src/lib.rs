//! Workload-driven fragmentation and allocation of RDF graphs, plus a
//! simulated distributed SPARQL basic-graph-pattern engine.
//!
//! The offline path splits a data graph into hot and cold parts, mines
//! frequent access patterns from a query workload, selects patterns under a
//! storage budget, builds vertical or horizontal fragments and clusters them
//! onto sites. The online path decomposes a query into fragment-aligned
//! subqueries, orders their joins and executes them over in-process sites.

pub mod allocator;
pub mod dictionary;
pub mod engine;
pub mod fragmenter;
pub mod matcher;
pub mod miner;
pub mod pipeline;
pub mod query;
pub mod rdf;
pub mod selector;
pub mod synth;
