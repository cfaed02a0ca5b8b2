//! Bundles, multi-allocations and their characteristic vectors.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::shares::MmsProfile;
use crate::EPS;

/// A set of item indices, kept sorted and duplicate-free.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Bundle(Vec<usize>);

impl Bundle {
    /// Sorts `items`; rejects repeats and indices `>= m`.
    pub fn new(mut items: Vec<usize>, m: usize) -> Result<Self> {
        items.sort_unstable();
        for w in items.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateItem(w[0]));
            }
        }
        if let Some(&g) = items.last() {
            if g >= m {
                return Err(Error::ItemOutOfRange { item: g, m });
            }
        }
        Ok(Self(items))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    /// All items `0..m`.
    pub fn full(m: usize) -> Self {
        Self((0..m).collect())
    }

    pub(crate) fn from_sorted_unchecked(items: Vec<usize>) -> Self {
        debug_assert!(items.windows(2).all(|w| w[0] < w[1]));
        Self(items)
    }

    pub fn items(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, item: usize) -> bool {
        self.0.binary_search(&item).is_ok()
    }

    pub(crate) fn insert(&mut self, item: usize) -> bool {
        match self.0.binary_search(&item) {
            Ok(_) => false,
            Err(pos) => {
                self.0.insert(pos, item);
                true
            }
        }
    }

    pub(crate) fn remove(&mut self, item: usize) -> bool {
        match self.0.binary_search(&item) {
            Ok(pos) => {
                self.0.remove(pos);
                true
            }
            Err(_) => false,
        }
    }

    /// Items shared with `other`.
    pub fn intersection(&self, other: &Bundle) -> Bundle {
        Bundle(self.0.iter().copied().filter(|&g| other.contains(g)).collect())
    }

    pub fn is_disjoint(&self, other: &Bundle) -> bool {
        self.0.iter().all(|&g| !other.contains(g))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiAllocation {
    pub bundles: Vec<Bundle>,
}

impl MultiAllocation {
    pub fn new(bundles: Vec<Bundle>) -> Self {
        Self { bundles }
    }

    pub fn n(&self) -> usize {
        self.bundles.len()
    }

    pub fn char_vector(&self, m: usize) -> Result<CharVector> {
        char_vector(self, m)
    }

    /// Keeps each item only in the lowest-index bundle that holds it.
    pub fn dedup_lowest_holder(&self) -> MultiAllocation {
        let mut taken = std::collections::HashSet::new();
        let bundles = self
            .bundles
            .iter()
            .map(|b| Bundle(b.0.iter().copied().filter(|&g| taken.insert(g)).collect()))
            .collect();
        MultiAllocation { bundles }
    }
}

/// Per-item multiplicities of a multi-allocation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharVector {
    pub counts: Vec<usize>,
    pub l1: usize,
    pub linf: usize,
    pub l0: usize,
}

impl CharVector {
    pub fn from_counts(counts: Vec<usize>) -> Self {
        let l1 = counts.iter().sum();
        let linf = counts.iter().copied().max().unwrap_or(0);
        let l0 = counts.iter().filter(|&&c| c == 0).count();
        Self { counts, l1, linf, l0 }
    }

    /// Items with count zero, in index order.
    pub fn unassigned(&self) -> Vec<usize> {
        (0..self.counts.len()).filter(|&g| self.counts[g] == 0).collect()
    }
}

pub fn char_vector(alloc: &MultiAllocation, m: usize) -> Result<CharVector> {
    let mut counts = vec![0usize; m];
    for bundle in &alloc.bundles {
        for &g in bundle.items() {
            *counts.get_mut(g).ok_or(Error::ItemOutOfRange { item: g, m })? += 1;
        }
    }
    Ok(CharVector::from_counts(counts))
}

/// Goods: every agent values its bundle at least its share. Chores: every
/// agent's cost is at most its share. Both up to an absolute `1e-9`.
pub fn verify_mms(instance: &Instance, profile: &MmsProfile, alloc: &MultiAllocation) -> Result<bool> {
    let n = instance.n();
    if profile.mu.len() != n || alloc.n() != n {
        return Err(Error::ProfileMismatch(format!(
            "instance has {n} agents, profile {}, allocation {}",
            profile.mu.len(),
            alloc.n()
        )));
    }
    if let Some(p) = profile.inducing.iter().flatten().flat_map(|b| b.items()).find(|&&g| g >= instance.m()) {
        return Err(Error::ProfileMismatch(format!("profile references item {p} but m = {}", instance.m())));
    }
    let goods = instance.kind().is_goods();
    for (i, bundle) in alloc.bundles.iter().enumerate() {
        let v = instance.eval(i, bundle)?;
        let ok = if goods { v + EPS >= profile.mu[i] } else { v <= profile.mu[i] + EPS };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}
