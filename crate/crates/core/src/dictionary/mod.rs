//! Global metadata: canonical pattern codes, pattern-to-fragment lookup and
//! the statistics the cost model reads.

mod catalog;
mod code;

pub use catalog::{DictEntry, Dictionary, DictionaryError, Lookup, MintermEntry};
pub use code::{canonical_form, CanonicalCode, CanonicalForm, CodeEntry, CodeError};
