//! In-memory RDF graphs, the supported N-Triples subset, and the hot/cold
//! split by workload property frequency.

mod graph;
mod ntriples;
mod split;
mod term;

pub use graph::{EdgeIds, RdfGraph, Triple};
pub use ntriples::{parse_ntriples, serialize_ntriples, NTriplesError};
pub use split::{property_frequencies, split_hot_cold, GraphSplit};
pub use term::{Term, TermKind};

pub(crate) use term::read_term;
