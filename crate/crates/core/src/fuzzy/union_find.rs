use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use super::lsh::LshIndex;
use crate::rng::mix64;

/// Disjoint sets over `0..n` with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self { parent: (0..n).collect(), size: alloc::vec![1; n] }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Joins the sets of `a` and `b`; returns whether they were separate.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            core::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}

/// Connected components of the match graph. Each cluster is sorted, and
/// clusters are ordered by their smallest member.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DupClusters {
    clusters: Vec<Vec<u64>>,
}

impl DupClusters {
    /// Components over `ids` plus any id mentioned in `pairs`.
    pub fn from_pairs(ids: impl IntoIterator<Item = u64>, pairs: impl IntoIterator<Item = (u64, u64)>) -> Self {
        let pairs: Vec<(u64, u64)> = pairs.into_iter().collect();
        let mut all: BTreeSet<u64> = ids.into_iter().collect();
        all.extend(pairs.iter().flat_map(|&(a, b)| [a, b]));
        let ids: Vec<u64> = all.into_iter().collect();
        let index = |id: u64| ids.binary_search(&id).expect("id collected above");
        let mut uf = UnionFind::new(ids.len());
        for (a, b) in pairs {
            uf.union(index(a), index(b));
        }
        let mut groups: BTreeMap<usize, Vec<u64>> = BTreeMap::new();
        for (i, &id) in ids.iter().enumerate() {
            groups.entry(uf.find(i)).or_default().push(id);
        }
        let mut clusters: Vec<Vec<u64>> = groups.into_values().collect();
        clusters.sort_unstable_by_key(|c| c[0]);
        Self { clusters }
    }

    pub fn clusters(&self) -> &[Vec<u64>] {
        &self.clusters
    }

    /// Documents that are not the only member of their cluster, minus one
    /// per cluster.
    pub fn removable(&self) -> usize {
        self.clusters.iter().map(|c| c.len() - 1).sum()
    }
}

pub fn cluster_duplicates(index: &LshIndex) -> DupClusters {
    DupClusters::from_pairs(index.ids(), index.matches().iter().copied())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SurvivorPolicy {
    #[default]
    SmallestId,
    /// One member per cluster chosen by a hash of the seed and the
    /// cluster's smallest id.
    SeededRandom(u64),
}

/// Exactly one id per cluster.
pub fn select_survivors(clusters: &DupClusters, policy: SurvivorPolicy) -> BTreeSet<u64> {
    clusters
        .clusters()
        .iter()
        .map(|c| match policy {
            SurvivorPolicy::SmallestId => c[0],
            SurvivorPolicy::SeededRandom(seed) => c[(mix64(seed ^ mix64(c[0])) % c.len() as u64) as usize],
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn chain_becomes_one_cluster() {
        let c = DupClusters::from_pairs([1, 2, 3, 4], [(1, 2), (2, 3)]);
        assert_eq!(c.clusters(), [vec![1, 2, 3], vec![4]]);
        assert_eq!(c.removable(), 2);
        let none = DupClusters::from_pairs([3, 1, 2], []);
        assert_eq!(none.clusters(), [vec![1], vec![2], vec![3]]);
    }

    #[test]
    fn survivors() {
        let c = DupClusters::from_pairs([5, 2, 9, 11], [(5, 2), (9, 2)]);
        assert_eq!(select_survivors(&c, SurvivorPolicy::SmallestId), BTreeSet::from([2, 11]));
        let a = select_survivors(&c, SurvivorPolicy::SeededRandom(3));
        assert_eq!(a, select_survivors(&c, SurvivorPolicy::SeededRandom(3)));
        assert_eq!(a.len(), 2);
        assert!(a.contains(&11));
    }

    proptest! {
        #[test]
        fn order_independent(pairs in prop::collection::vec((0u64..30, 0u64..30), 0..40), seed in any::<u64>()) {
            let ids: Vec<u64> = (0..30).collect();
            let base = DupClusters::from_pairs(ids.clone(), pairs.clone());
            let mut shuffled = pairs.clone();
            let n = shuffled.len();
            for i in 0..n {
                shuffled.swap(i, (mix64(seed ^ i as u64) % n as u64) as usize);
            }
            let flipped: Vec<(u64, u64)> = shuffled.iter().map(|&(a, b)| (b, a)).collect();
            prop_assert_eq!(&DupClusters::from_pairs(ids.iter().rev().copied(), flipped), &base);
            let members: usize = base.clusters().iter().map(Vec::len).sum();
            prop_assert_eq!(members, 30);
            prop_assert_eq!(select_survivors(&base, SurvivorPolicy::SeededRandom(seed)).len(), base.clusters().len());
        }
    }
}
