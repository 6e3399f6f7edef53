//! Splitting dumps into parts so that every part holds a slice of every
//! dump.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::num::NonZeroUsize;

pub const DEFAULT_PARTS: usize = 100;

/// Round-robin assignment of each dump's records to parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShardPlan {
    parts: NonZeroUsize,
    dump_sizes: BTreeMap<String, u64>,
}

impl ShardPlan {
    pub fn new(parts: NonZeroUsize) -> Self {
        Self { parts, dump_sizes: BTreeMap::new() }
    }

    pub fn parts(&self) -> usize {
        self.parts.get()
    }

    /// Part of the record at `ordinal` within its dump.
    pub fn part_of(&self, ordinal: u64) -> usize {
        (ordinal % self.parts.get() as u64) as usize
    }

    /// Number of records of `dump` assigned to `part`.
    pub fn records_in(&self, dump: &str, part: usize) -> u64 {
        let size = self.dump_sizes.get(dump).copied().unwrap_or(0);
        let parts = self.parts.get() as u64;
        let part = part as u64;
        if part >= parts {
            return 0;
        }
        size / parts + u64::from(part < size % parts)
    }

    /// Ordinals of `dump` assigned to `part`, ascending.
    pub fn ordinals(&self, dump: &str, part: usize) -> impl Iterator<Item = u64> {
        let size = self.dump_sizes.get(dump).copied().unwrap_or(0);
        let step = self.parts.get() as u64;
        let first = if part < self.parts.get() { part as u64 } else { size };
        (first..size).step_by(step as usize)
    }

    pub fn dumps(&self) -> impl Iterator<Item = (&str, u64)> {
        self.dump_sizes.iter().map(|(d, n)| (d.as_str(), *n))
    }
}

pub fn plan_shards<'a>(dump_sizes: impl IntoIterator<Item = (&'a str, u64)>, parts: NonZeroUsize) -> ShardPlan {
    let mut plan = ShardPlan::new(parts);
    for (dump, size) in dump_sizes {
        *plan.dump_sizes.entry(String::from(dump)).or_insert(0) += size;
    }
    plan
}

/// Per-part record counts of one dump.
pub fn part_sizes(plan: &ShardPlan, dump: &str) -> Vec<u64> {
    (0..plan.parts()).map(|p| plan.records_in(dump, p)).collect()
}
