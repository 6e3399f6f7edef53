use alloc::vec::Vec;
use core::fmt;

use hashbrown::{HashMap, HashSet};
use xxhash_rust::xxh3::xxh3_128;

use super::minhash::{MinHashParams, MinHashSignature};

/// One 128-bit key per bucket, hashing that bucket's slice of signature
/// values as little-endian bytes.
pub fn bucket_keys(sig: &MinHashSignature) -> Vec<u128> {
    let per = sig.params().hashes_per_bucket;
    let mut bytes = Vec::with_capacity(per * 8);
    sig.values()
        .chunks(per)
        .map(|chunk| {
            bytes.clear();
            for v in chunk {
                bytes.extend_from_slice(&v.to_le_bytes());
            }
            xxh3_128(&bytes)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LshError {
    DuplicateId(u64),
    ParamMismatch,
    /// The key list does not hold one key per bucket.
    WrongKeyCount { expected: usize, found: usize },
}

impl fmt::Display for LshError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LshError::DuplicateId(id) => write!(f, "document {id} is already indexed"),
            LshError::ParamMismatch => f.write_str("index and signature parameters differ"),
            LshError::WrongKeyCount { expected, found } => write!(f, "expected {expected} bucket keys, got {found}"),
        }
    }
}

impl core::error::Error for LshError {}

/// Bucket tables keyed by [`bucket_keys`].
///
/// Each table remembers the first document seen under a key; any later
/// document landing on that key is recorded as a match with it. Since
/// clustering only needs connectivity, this holds the same information as
/// full per-key member lists.
#[derive(Debug, Clone)]
pub struct LshIndex {
    params: MinHashParams,
    tables: Vec<HashMap<u128, u64>>,
    ids: HashSet<u64>,
    matches: Vec<(u64, u64)>,
}

impl LshIndex {
    pub fn new(params: MinHashParams) -> Self {
        Self {
            params,
            tables: (0..params.buckets).map(|_| HashMap::new()).collect(),
            ids: HashSet::new(),
            matches: Vec::new(),
        }
    }

    pub fn params(&self) -> &MinHashParams {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn insert(&mut self, id: u64, sig: &MinHashSignature) -> Result<(), LshError> {
        if *sig.params() != self.params {
            return Err(LshError::ParamMismatch);
        }
        self.insert_keys(id, &bucket_keys(sig))
    }

    pub fn insert_keys(&mut self, id: u64, keys: &[u128]) -> Result<(), LshError> {
        if keys.len() != self.tables.len() {
            return Err(LshError::WrongKeyCount { expected: self.tables.len(), found: keys.len() });
        }
        if !self.ids.insert(id) {
            return Err(LshError::DuplicateId(id));
        }
        for (table, &key) in self.tables.iter_mut().zip(keys) {
            let first = *table.entry(key).or_insert(id);
            if first != id {
                self.matches.push((first, id));
            }
        }
        Ok(())
    }

    /// Folds in an index built elsewhere, e.g. by another worker.
    pub fn merge(&mut self, other: LshIndex) -> Result<(), LshError> {
        if other.params != self.params {
            return Err(LshError::ParamMismatch);
        }
        if let Some(&dup) = other.ids.iter().find(|id| self.ids.contains(*id)) {
            return Err(LshError::DuplicateId(dup));
        }
        self.ids.extend(other.ids);
        self.matches.extend(other.matches);
        for (mine, theirs) in self.tables.iter_mut().zip(other.tables) {
            for (key, id) in theirs {
                let first = *mine.entry(key).or_insert(id);
                if first != id {
                    self.matches.push((first, id));
                }
            }
        }
        Ok(())
    }

    pub fn ids(&self) -> impl Iterator<Item = u64> + '_ {
        self.ids.iter().copied()
    }

    /// Pairs of documents that share at least one bucket, each pair linking
    /// a later document to the first one seen on a shared key.
    pub fn matches(&self) -> &[(u64, u64)] {
        &self.matches
    }
}
