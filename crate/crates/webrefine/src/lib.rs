//! Web-crawl refinement: WARC ingest, HTML extraction, filtering,
//! deduplication and stage reports. Algorithms live in `webrefine-core`;
//! this crate adds file formats, external adapters and orchestration.

pub mod candidates;
pub mod config;
pub mod extract;
pub mod language;
pub mod pipeline;
pub mod records;
pub mod registry;
pub mod report;
pub mod signatures;
pub mod warc;

pub use webrefine_core as core;
