//! Exact maximin shares by exhaustive enumeration.
//!
//! Partitions are enumerated as assignment vectors (item -> block). Only
//! restricted-growth vectors are visited: relabeling blocks by first use maps
//! any optimum to a restricted-growth optimum that is lexicographically no
//! larger, so the first strictly-best vector found in lexicographic order is
//! the lexicographically smallest optimal assignment overall.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alloc::Bundle;
use crate::error::{Error, Result};
use crate::instance::{EntitlementVector, Instance, ItemKind, ValuationSpec};
use crate::EPS;

/// Per-agent share values with one inducing partition each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MmsProfile {
    pub mu: Vec<f64>,
    pub inducing: Vec<Vec<Bundle>>,
}

impl MmsProfile {
    pub fn n(&self) -> usize {
        self.mu.len()
    }
}

/// Share value and inducing partition of a single agent.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentShare {
    pub mu: f64,
    pub partition: Vec<Bundle>,
}

pub(crate) fn check_budget(base: usize, exponent: usize, budget: u64) -> Result<()> {
    let states = (base as f64).powi(exponent as i32);
    if states > budget as f64 {
        return Err(Error::BudgetExceeded { states, budget });
    }
    Ok(())
}

struct Search<'a> {
    spec: &'a ValuationSpec,
    m: usize,
    k: usize,
    goods: bool,
    masks: Vec<u64>,
    assign: Vec<usize>,
    best: f64,
    best_assign: Option<Vec<usize>>,
}

impl Search<'_> {
    fn better(&self, val: f64) -> bool {
        if self.goods {
            val > self.best + EPS
        } else {
            val < self.best - EPS
        }
    }

    fn run(&mut self, g: usize, used: usize) {
        if g == self.m {
            let vals = self.masks.iter().map(|&b| self.spec.eval_mask(b));
            let val = if self.goods {
                vals.fold(f64::INFINITY, f64::min)
            } else {
                vals.fold(0.0, f64::max)
            };
            if self.best_assign.is_none() || self.better(val) {
                self.best = val;
                self.best_assign = Some(self.assign.clone());
            }
            return;
        }
        if self.best_assign.is_some() {
            // bound: goods can at best gain every remaining item in each block,
            // chores can only get costlier
            let bound = if self.goods {
                let rest = if self.m == 64 { !0u64 << g } else { ((1u64 << self.m) - 1) & (!0u64 << g) };
                self.masks.iter().map(|&b| self.spec.eval_mask(b | rest)).fold(f64::INFINITY, f64::min)
            } else {
                self.masks.iter().map(|&b| self.spec.eval_mask(b)).fold(0.0, f64::max)
            };
            if !self.better(bound) {
                return;
            }
        }
        let limit = (used + 1).min(self.k);
        for j in 0..limit {
            self.masks[j] |= 1 << g;
            self.assign[g] = j;
            self.run(g + 1, used.max(j + 1));
            self.masks[j] &= !(1 << g);
        }
    }
}

fn blocks_from_assignment(assign: &[usize], k: usize) -> Vec<Bundle> {
    let mut blocks = vec![Vec::new(); k];
    for (g, &j) in assign.iter().enumerate() {
        blocks[j].push(g);
    }
    blocks.into_iter().map(Bundle::from_sorted_unchecked).collect()
}

/// Exact max-min (goods) or min-max (chores) share of `spec` over `k`-partitions of `0..m`.
pub fn share_over_partitions(
    spec: &ValuationSpec,
    m: usize,
    k: usize,
    kind: ItemKind,
    budget: u64,
) -> Result<AgentShare> {
    if k == 0 {
        return Err(Error::InvalidInstance("partition needs at least one block".into()));
    }
    if k == 1 {
        let full = Bundle::full(m);
        return Ok(AgentShare { mu: spec.eval_items(full.items(), m)?, partition: vec![full] });
    }
    // blocks beyond the m-th stay empty in every restricted-growth vector
    check_budget(k.min(m), m, budget)?;
    let mut search = Search {
        spec,
        m,
        k,
        goods: kind.is_goods(),
        masks: vec![0; k],
        assign: vec![0; m],
        best: 0.0,
        best_assign: None,
    };
    search.run(0, 0);
    let assign = search.best_assign.expect("at least one assignment exists");
    Ok(AgentShare { mu: search.best, partition: blocks_from_assignment(&assign, k) })
}

/// `mu_i` with an inducing `n`-partition for one agent.
pub fn compute_mms(instance: &Instance, agent: usize, budget: u64) -> Result<AgentShare> {
    let spec = instance.spec(agent)?;
    share_over_partitions(spec, instance.m(), instance.n(), instance.kind(), budget)
}

/// Shares of every agent.
pub fn compute_profile(instance: &Instance, budget: u64) -> Result<MmsProfile> {
    let shares: Vec<AgentShare> = (0..instance.n())
        .into_par_iter()
        .map(|i| compute_mms(instance, i, budget))
        .collect::<Result<_>>()?;
    Ok(collect_profile(shares))
}

fn collect_profile(shares: Vec<AgentShare>) -> MmsProfile {
    let (mu, inducing) = shares.into_iter().map(|s| (s.mu, s.partition)).unzip();
    MmsProfile { mu, inducing }
}

/// Entitlement-adapted share over `floor(1/b_i)`-partitions.
pub fn compute_mms_hat(
    instance: &Instance,
    ent: &EntitlementVector,
    agent: usize,
    budget: u64,
) -> Result<AgentShare> {
    if !instance.kind().is_goods() {
        return Err(Error::Unsupported("a goods instance for entitlement-adapted shares".into()));
    }
    if ent.len() != instance.n() {
        return Err(Error::InvalidEntitlements(format!("{} entitlements for {} agents", ent.len(), instance.n())));
    }
    let spec = instance.spec(agent)?;
    share_over_partitions(spec, instance.m(), ent.blocks_for(agent), ItemKind::Goods, budget)
}

pub fn compute_hat_profile(instance: &Instance, ent: &EntitlementVector, budget: u64) -> Result<MmsProfile> {
    let shares: Vec<AgentShare> = (0..instance.n())
        .into_par_iter()
        .map(|i| compute_mms_hat(instance, ent, i, budget))
        .collect::<Result<_>>()?;
    Ok(collect_profile(shares))
}

/// Index of copy `copy` (0 or 1) of good `good` in the doubled ground set.
pub fn copy_index(good: usize, copy: usize) -> usize {
    2 * good + copy
}

/// Good and copy number behind a doubled-ground-set index.
pub fn copy_of(index: usize) -> (usize, usize) {
    (index / 2, index % 2)
}

fn additive_weights(instance: &Instance) -> Result<Vec<&[f64]>> {
    if !instance.kind().is_goods() {
        return Err(Error::Unsupported("a goods instance".into()));
    }
    instance
        .agents()
        .iter()
        .map(|s| match s {
            ValuationSpec::Additive { weights } => Ok(weights.as_slice()),
            _ => Err(Error::Unsupported("additive valuations".into())),
        })
        .collect()
}

fn suffix_sums(w: &[f64]) -> Vec<f64> {
    let mut s = vec![0.0; w.len() + 1];
    for g in (0..w.len()).rev() {
        s[g] = s[g + 1] + w[g];
    }
    s
}

/// Both copies of every good go to distinct blocks; visited in lexicographic
/// order of the copy vector `(g0,1),(g0,2),(g1,1),...`.
struct ConstrainedSearch<'a> {
    weights: &'a [f64],
    suffix: Vec<f64>,
    k: usize,
    sums: Vec<f64>,
    owners: Vec<usize>,
    best: f64,
    best_owners: Option<Vec<usize>>,
}

impl ConstrainedSearch<'_> {
    fn run(&mut self, g: usize) {
        let m = self.weights.len();
        if g == m {
            let val = self.sums.iter().cloned().fold(f64::INFINITY, f64::min);
            if self.best_owners.is_none() || val > self.best + EPS {
                self.best = val;
                self.best_owners = Some(self.owners.clone());
            }
            return;
        }
        // every block can still gain at most one copy of each remaining good
        if self.best_owners.is_some()
            && self.sums.iter().map(|s| s + self.suffix[g]).fold(f64::INFINITY, f64::min) <= self.best + EPS
        {
            return;
        }
        let w = self.weights[g];
        for a in 0..self.k {
            for b in (0..self.k).filter(|&b| b != a) {
                self.sums[a] += w;
                self.sums[b] += w;
                self.owners[2 * g] = a;
                self.owners[2 * g + 1] = b;
                self.run(g + 1);
                self.sums[a] -= w;
                self.sums[b] -= w;
            }
        }
    }
}

/// Share over `n`-partitions of the doubled ground set where no block holds
/// both copies of a good. Blocks use copy indices (see [`copy_index`]).
pub fn compute_constrained_mms(instance: &Instance, agent: usize, budget: u64) -> Result<AgentShare> {
    let weights = additive_weights(instance)?;
    let w = *weights.get(agent).ok_or(Error::AgentOutOfRange { agent, n: instance.n() })?;
    let (n, m) = (instance.n(), instance.m());
    if n < 2 {
        return Err(Error::Unsupported("at least two agents: one feasible block cannot hold both copies".into()));
    }
    check_budget(n * (n - 1), m, budget)?;
    let mut search = ConstrainedSearch {
        weights: w,
        suffix: suffix_sums(w),
        k: n,
        sums: vec![0.0; n],
        owners: vec![0; 2 * m],
        best: f64::NEG_INFINITY,
        best_owners: None,
    };
    search.run(0);
    let owners = search.best_owners.expect("n >= 2 admits a feasible partition");
    Ok(AgentShare { mu: search.best, partition: blocks_from_assignment(&owners, n) })
}

pub fn compute_constrained_profile(instance: &Instance, budget: u64) -> Result<MmsProfile> {
    let shares: Vec<AgentShare> = (0..instance.n())
        .into_par_iter()
        .map(|i| compute_constrained_mms(instance, i, budget))
        .collect::<Result<_>>()?;
    Ok(collect_profile(shares))
}

struct FeasibleSearch<'a> {
    weights: &'a [&'a [f64]],
    suffix: Vec<Vec<f64>>,
    targets: &'a [f64],
    sums: Vec<f64>,
    owners: Vec<usize>,
}

impl FeasibleSearch<'_> {
    fn run(&mut self, g: usize) -> bool {
        let n = self.sums.len();
        if (0..n).any(|j| self.sums[j] + self.suffix[j][g] + EPS < self.targets[j]) {
            return false;
        }
        if g == self.suffix[0].len() - 1 {
            return true;
        }
        for a in 0..n {
            for b in (0..n).filter(|&b| b != a) {
                self.sums[a] += self.weights[a][g];
                self.sums[b] += self.weights[b][g];
                self.owners[2 * g] = a;
                self.owners[2 * g + 1] = b;
                if self.run(g + 1) {
                    return true;
                }
                self.sums[a] -= self.weights[a][g];
                self.sums[b] -= self.weights[b][g];
            }
        }
        false
    }
}

/// First (lexicographic) exact allocation of the doubled ground set in which
/// every bundle is feasible and agent `i` gets at least `targets[i]`.
/// Returns per-agent bundles of copy indices.
pub(crate) fn find_feasible_copy_allocation(
    instance: &Instance,
    targets: &[f64],
    budget: u64,
) -> Result<Option<Vec<Bundle>>> {
    let weights = additive_weights(instance)?;
    let (n, m) = (instance.n(), instance.m());
    check_budget(n * (n - 1), m, budget)?;
    let mut search = FeasibleSearch {
        suffix: weights.iter().map(|w| suffix_sums(w)).collect(),
        weights: &weights,
        targets,
        sums: vec![0.0; n],
        owners: vec![0; 2 * m],
    };
    Ok(search.run(0).then(|| blocks_from_assignment(&search.owners, n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::DEFAULT_BUDGET;

    /// Plain odometer over all k^m assignments; independent of the pruned search.
    fn naive_share(spec: &ValuationSpec, m: usize, k: usize, goods: bool) -> (f64, Vec<usize>) {
        let mut assign = vec![0usize; m];
        let mut best: Option<(f64, Vec<usize>)> = None;
        loop {
            let mut masks = vec![0u64; k];
            for (g, &j) in assign.iter().enumerate() {
                masks[j] |= 1 << g;
            }
            let vals: Vec<f64> = masks.iter().map(|&b| spec.eval_mask(b)).collect();
            let val = if goods {
                vals.iter().cloned().fold(f64::INFINITY, f64::min)
            } else {
                vals.iter().cloned().fold(0.0, f64::max)
            };
            let improves = match &best {
                None => true,
                Some((b, _)) => if goods { val > b + EPS } else { val < b - EPS },
            };
            if improves {
                best = Some((val, assign.clone()));
            }
            let mut g = m;
            loop {
                if g == 0 {
                    return best.unwrap();
                }
                g -= 1;
                assign[g] += 1;
                if assign[g] < k {
                    break;
                }
                assign[g] = 0;
            }
        }
    }

    #[test]
    fn goods_example() {
        let inst = Instance::additive_goods(vec![vec![4.0, 3.0, 2.0, 1.0]; 2]).unwrap();
        let s = compute_mms(&inst, 0, DEFAULT_BUDGET).unwrap();
        assert_eq!(s.mu, 5.0);
        assert_eq!(s.partition[0].items(), &[0, 3]);
        assert_eq!(s.partition[1].items(), &[1, 2]);
    }

    #[test]
    fn chores_example() {
        let inst = Instance::additive_chores(vec![vec![3.0, 2.0, 2.0, 1.0]; 2]).unwrap();
        let s = compute_mms(&inst, 0, DEFAULT_BUDGET).unwrap();
        assert_eq!(s.mu, 4.0);
        assert_eq!(s.partition[0].items(), &[0, 3]);
        assert_eq!(s.partition[1].items(), &[1, 2]);
    }

    #[test]
    fn single_agent_takes_everything() {
        let inst = Instance::additive_goods(vec![vec![2.0, 5.0, 1.0]]).unwrap();
        let s = compute_mms(&inst, 0, DEFAULT_BUDGET).unwrap();
        assert_eq!(s.mu, 8.0);
        assert_eq!(s.partition, vec![Bundle::full(3)]);
    }

    #[test]
    fn fewer_items_than_agents() {
        let inst = Instance::additive_goods(vec![vec![2.0, 5.0]; 3]).unwrap();
        let s = compute_mms(&inst, 0, DEFAULT_BUDGET).unwrap();
        assert_eq!(s.mu, 0.0);
        assert_eq!(s.partition.len(), 3);
        assert!(s.partition.iter().any(Bundle::is_empty));
    }

    #[test]
    fn budget_guard() {
        let inst = Instance::additive_goods(vec![vec![1.0; 12]; 4]).unwrap();
        assert!(matches!(compute_mms(&inst, 0, 1000), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn pruned_search_matches_odometer() {
        let specs = [
            ValuationSpec::Additive { weights: vec![5.0, 1.0, 3.0, 3.0, 2.0] },
            ValuationSpec::Ordered { weights: vec![4.0, 3.0, 3.0, 1.0, 0.5], transform: crate::instance::Transform::Sqrt },
            ValuationSpec::Ordered { weights: vec![1.0, 0.8, 0.5, 0.5, 0.1], transform: crate::instance::Transform::Exp },
            ValuationSpec::XosPartition { blocks: vec![vec![0, 4], vec![1, 2], vec![3]] },
            ValuationSpec::PartitionThreshold { blocks: vec![vec![0, 4], vec![1, 2], vec![3]] },
            ValuationSpec::PartitionSubset { blocks: vec![vec![0, 4], vec![1, 2], vec![3]] },
        ];
        for spec in &specs {
            for k in 2..=3 {
                for kind in [ItemKind::Goods, ItemKind::Chores] {
                    let got = share_over_partitions(spec, 5, k, kind, DEFAULT_BUDGET).unwrap();
                    let (mu, assign) = naive_share(spec, 5, k, kind.is_goods());
                    assert!((got.mu - mu).abs() < 1e-9, "{spec:?} k={k} {kind:?}");
                    assert_eq!(got.partition, blocks_from_assignment(&assign, k), "{spec:?} k={k} {kind:?}");
                }
            }
        }
    }

    #[test]
    fn hat_examples() {
        let inst = Instance::additive_goods(vec![vec![3.0, 1.0]; 2]).unwrap();
        let ent = EntitlementVector::new(vec![0.6, 0.4]).unwrap();
        assert_eq!(compute_mms_hat(&inst, &ent, 0, DEFAULT_BUDGET).unwrap().mu, 4.0);
        assert_eq!(compute_mms_hat(&inst, &ent, 1, DEFAULT_BUDGET).unwrap().mu, 1.0);

        let inst = Instance::additive_goods(vec![vec![4.0, 3.0, 2.0, 1.0]; 2]).unwrap();
        let uniform = EntitlementVector::uniform(2);
        let hat = compute_hat_profile(&inst, &uniform, DEFAULT_BUDGET).unwrap();
        assert_eq!(hat, compute_profile(&inst, DEFAULT_BUDGET).unwrap());

        let one = Instance::additive_goods(vec![vec![4.0, 3.0]]).unwrap();
        let ent = EntitlementVector::new(vec![1.0]).unwrap();
        assert_eq!(compute_mms_hat(&one, &ent, 0, DEFAULT_BUDGET).unwrap().mu, 7.0);
    }

    #[test]
    fn constrained_example() {
        let inst = Instance::additive_goods(vec![vec![1.0, 1.0]; 2]).unwrap();
        let s = compute_constrained_mms(&inst, 0, DEFAULT_BUDGET).unwrap();
        assert_eq!(s.mu, 2.0);
        assert_eq!(s.partition[0].items(), &[copy_index(0, 0), copy_index(1, 0)]);
        assert_eq!(s.partition[1].items(), &[copy_index(0, 1), copy_index(1, 1)]);
    }

    #[test]
    fn constrained_rejects_single_agent_and_nonadditive() {
        let one = Instance::additive_goods(vec![vec![1.0, 2.0]]).unwrap();
        assert!(matches!(compute_constrained_mms(&one, 0, DEFAULT_BUDGET), Err(Error::Unsupported(_))));
        let xos = Instance::new(
            ItemKind::Goods,
            2,
            vec![ValuationSpec::XosPartition { blocks: vec![vec![0], vec![1]] }; 2],
            None,
        )
        .unwrap();
        assert!(matches!(compute_constrained_mms(&xos, 0, DEFAULT_BUDGET), Err(Error::Unsupported(_))));
    }

    #[test]
    fn constrained_blocks_are_feasible_and_cover() {
        let inst = Instance::additive_goods(vec![vec![3.0, 1.0, 1.0, 2.0], vec![1.0, 1.0, 1.0, 1.0], vec![0.0, 2.0, 1.0, 1.0]]).unwrap();
        for i in 0..3 {
            let s = compute_constrained_mms(&inst, i, DEFAULT_BUDGET).unwrap();
            let mut seen = vec![0; 8];
            for block in &s.partition {
                let goods: Vec<usize> = block.items().iter().map(|&c| copy_of(c).0).collect();
                let mut dedup = goods.clone();
                dedup.dedup();
                assert_eq!(goods, dedup, "block holds both copies of a good");
                for &c in block.items() {
                    seen[c] += 1;
                }
            }
            assert_eq!(seen, vec![1; 8]);
        }
    }
}
