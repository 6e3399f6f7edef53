//! Exact-substring deduplication over a suffix array of the concatenated,
//! normalized corpus.

mod ranges;
mod strategy;
mod suffix_array;
mod tokenize;

pub use ranges::{find_duplicate_ranges, find_duplicate_ranges_in, map_ranges_to_chars, DuplicateRange};
pub use strategy::{apply_strategy, SpanError, Strategy, StrategyConfig, StrategyOutcome, UnknownStrategy};
pub use suffix_array::{build_suffix_array, lcp_array};
pub use tokenize::{tokenize_reversible, TokenOrigin, TokenizedCorpus, SEPARATOR};
