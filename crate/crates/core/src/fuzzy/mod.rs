//! MinHash-LSH near-duplicate detection.
//!
//! Text is normalized and cut into word shingles, each document is signed
//! with `hashes_per_bucket * buckets` minimum hashes, and documents sharing
//! any full bucket are joined into clusters of which one member survives.

mod lsh;
mod minhash;
mod normalize;
mod union_find;

pub use lsh::{bucket_keys, LshError, LshIndex};
pub use minhash::{
    estimate_jaccard, match_probability, shingle_hashes, shingle_set, MinHashError, MinHashParams, MinHashSignature,
    MinHasher,
};
pub use normalize::{normalize_for_dedup, normalize_tokens_with_offsets, DedupNormalizedText, NormalizedToken};
pub use union_find::{cluster_duplicates, select_survivors, DupClusters, SurvivorPolicy, UnionFind};
