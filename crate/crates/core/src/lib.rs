//! Allocation-only building blocks for refining web-crawl text corpora.
//!
//! Everything in this crate is pure computation over in-memory values: URL
//! gating, text formatting, language scoring, document quality heuristics,
//! MinHash-LSH fuzzy deduplication and suffix-array exact-substring
//! deduplication. It builds under `#![no_std]` with `alloc`; reading archives,
//! writing records and orchestrating stages lives in the `webrefine` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod document;
pub mod exact;
pub mod fuzzy;
pub mod lang;
pub mod quality;
pub mod shard;
pub mod stats;
pub mod text;
pub mod url;

mod rng;

pub use document::{Document, FilterVerdict, RejectReason, Verdict};
pub use stats::{kept_rates, KeptRate, Ratio, StageStats, StatsError};
