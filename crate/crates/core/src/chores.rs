//! Multi-allocations of chores with bounded disposal.
//!
//! Chore outputs never duplicate a chore: whenever sampled bundles overlap,
//! the lowest-index holder keeps the copy, which cannot raise any cost.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::alloc::{verify_mms, Bundle, MultiAllocation};
use crate::error::{Error, Result};
use crate::goods::{draw_blocks, log2};
use crate::instance::{check_identically_ordered, Instance, ValuationSpec};
use crate::rng::first_accepted;
use crate::shares::{check_budget, MmsProfile};
use crate::EPS;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChoreConfig {
    pub seed: u64,
    /// Defaults to `64 (m + 1)`.
    pub max_retries: Option<usize>,
    /// Defaults to [`default_alpha`].
    pub alpha: Option<f64>,
}

impl ChoreConfig {
    pub fn new(seed: u64) -> Self {
        Self { seed, max_retries: None, alpha: None }
    }

    fn retries_for(&self, m: usize) -> usize {
        self.max_retries.unwrap_or_else(|| crate::goods::default_max_retries(m)).max(1)
    }
}

/// `floor(m (1 - 1/n)^n)`.
pub fn monotone_l0_limit(n: usize, m: usize) -> usize {
    (m as f64 * (1.0 - 1.0 / n as f64).powi(n as i32) + EPS).floor() as usize
}

/// `n^(1/4) log2 m`, with the log factor floored at 1 so that `m = 1` stays positive.
pub fn default_alpha(n: usize, m: usize) -> f64 {
    (n as f64).powf(0.25) * log2(m).max(1.0)
}

/// `3 m (log2 m)^(3/2) / n^(1/4)`.
pub fn delta_star(n: usize, m: usize) -> f64 {
    3.0 * m as f64 * log2(m).powf(1.5) / (n as f64).powf(0.25)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChoreOutcome {
    pub alloc: MultiAllocation,
    pub retries: usize,
    pub unassigned: Vec<usize>,
    /// Set only by the ordered pipeline.
    pub delta_star: Option<f64>,
    pub preassigned_agents: Vec<usize>,
}

fn check_profile(instance: &Instance, profile: &MmsProfile) -> Result<()> {
    if instance.kind().is_goods() {
        return Err(Error::Unsupported("a chores instance".into()));
    }
    let n = instance.n();
    if profile.n() != n || profile.inducing.len() != n || profile.inducing.iter().any(|p| p.len() != n) {
        return Err(Error::ProfileMismatch(format!("profile does not hold {n} partitions of {n} blocks")));
    }
    Ok(())
}

fn finish(instance: &Instance, profile: &MmsProfile, alloc: MultiAllocation) -> Result<(MultiAllocation, Vec<usize>)> {
    let alloc = alloc.dedup_lowest_holder();
    if !verify_mms(instance, profile, &alloc)? {
        return Err(Error::PreconditionViolated("an agent's cost exceeds its share; profile does not belong to this instance".into()));
    }
    let unassigned = alloc.char_vector(instance.m())?.unassigned();
    Ok((alloc, unassigned))
}

/// Uniform block draws, accepted once at most `floor(m (1 - 1/n)^n)` chores are left over.
pub fn sample_monotone_chores(instance: &Instance, profile: &MmsProfile, cfg: &ChoreConfig) -> Result<ChoreOutcome> {
    check_profile(instance, profile)?;
    let (n, m) = (instance.n(), instance.m());
    let limit = monotone_l0_limit(n, m);
    let (alloc, retries) = first_accepted(cfg.seed, cfg.retries_for(m), |rng| {
        let alloc = draw_blocks(&profile.inducing, rng);
        (alloc.char_vector(m).ok()?.l0 <= limit).then_some(alloc)
    })?;
    let (alloc, unassigned) = finish(instance, profile, alloc)?;
    Ok(ChoreOutcome { alloc, retries, unassigned, delta_star: None, preassigned_agents: Vec::new() })
}

/// What is left after large share blocks have been handed out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubInstance {
    pub remaining_agents: Vec<usize>,
    pub remaining_chores: Vec<usize>,
    /// `Some(bundle)` for every agent removed during pre-processing.
    pub pre_bundles: Vec<Option<Bundle>>,
}

impl SubInstance {
    /// Agents removed during pre-processing, by index.
    pub fn preassigned_agents(&self) -> Vec<usize> {
        (0..self.pre_bundles.len()).filter(|&i| self.pre_bundles[i].is_some()).collect()
    }
}

/// Repeatedly gives agent `i` the block `M_ij ∩ U` while `|M_ij ∩ U| >= alpha |U| / |N|`
/// for some remaining agent, lowest `(i, j)` first. Stops once no chore or no agent remains.
pub fn preprocess_chores(instance: &Instance, profile: &MmsProfile, alpha: f64) -> Result<SubInstance> {
    check_profile(instance, profile)?;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::PreconditionViolated(format!("alpha must be positive, got {alpha}")));
    }
    let (n, m) = (instance.n(), instance.m());
    let mut in_u = vec![true; m];
    let mut u_len = m;
    let mut agents: Vec<usize> = (0..n).collect();
    let mut pre_bundles = vec![None; n];
    while u_len > 0 && !agents.is_empty() {
        let threshold = alpha * u_len as f64 / agents.len() as f64;
        let hit = agents.iter().enumerate().find_map(|(pos, &i)| {
            profile.inducing[i].iter().find_map(|block| {
                let inter: Vec<usize> = block.items().iter().copied().filter(|&g| in_u[g]).collect();
                (inter.len() as f64 + EPS >= threshold).then_some((pos, inter))
            })
        });
        let Some((pos, inter)) = hit else { break };
        for &g in &inter {
            in_u[g] = false;
        }
        u_len -= inter.len();
        let i = agents.remove(pos);
        pre_bundles[i] = Some(Bundle::new(inter, m)?);
    }
    let sub = SubInstance {
        remaining_agents: agents,
        remaining_chores: (0..m).filter(|&g| in_u[g]).collect(),
        pre_bundles,
    };
    if alpha >= log2(m) && !sub.remaining_chores.is_empty() {
        let floor = n as f64 * (1.0 - log2(m) / alpha);
        assert!(
            sub.remaining_agents.len() as f64 + EPS >= floor,
            "pre-processing removed too many agents: {} left, bound {floor}",
            sub.remaining_agents.len()
        );
    }
    Ok(sub)
}

/// Largest uncovered amount `|S| - sum of chi over S` over contiguous windows `S`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub delta_max: usize,
    /// Positions (into the scanned slice) of the first maximizing window; `None` when `delta_max = 0`.
    pub witness: Option<Range<usize>>,
}

/// Maximum-sum window of `1 - chi` by a single running-sum scan.
pub fn coverage_deficit(chi: &[usize]) -> CoverageReport {
    let mut best = 0i64;
    let mut witness = None;
    let mut run = 0i64;
    let mut start = 0;
    for (pos, &c) in chi.iter().enumerate() {
        if run <= 0 {
            run = 0;
            start = pos;
        }
        run += 1 - c as i64;
        if run > best {
            best = run;
            witness = Some(start..pos + 1);
        }
    }
    CoverageReport { delta_max: best as usize, witness }
}

/// One copy of chore `from` in agent `agent`'s bundle replaced by chore `to`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChoreMove {
    pub agent: usize,
    pub from: usize,
    pub to: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChoreRedistribution {
    pub alloc: MultiAllocation,
    pub moves: Vec<ChoreMove>,
}

/// Trades duplicate copies of low-index chores for unassigned higher-index
/// chores within `order` (the remaining chores, ascending) until none is left
/// to trade. Requires every window of `order` to be short by at most `delta`.
pub fn redistribute_chores(
    alloc: &MultiAllocation,
    instance: &Instance,
    order: &[usize],
    delta: usize,
) -> Result<ChoreRedistribution> {
    let m = instance.m();
    let mut pos_of = vec![usize::MAX; m];
    for (p, &g) in order.iter().enumerate() {
        *pos_of.get_mut(g).ok_or(Error::ItemOutOfRange { item: g, m })? = p;
    }
    let mut chi = vec![0usize; order.len()];
    for b in &alloc.bundles {
        for &g in b.items() {
            let p = *pos_of.get(g).ok_or(Error::ItemOutOfRange { item: g, m })?;
            if p == usize::MAX {
                return Err(Error::PreconditionViolated(format!("chore {g} is assigned but not among the remaining chores")));
            }
            chi[p] += 1;
        }
    }
    let report = coverage_deficit(&chi);
    if report.delta_max > delta {
        return Err(Error::PreconditionViolated(format!(
            "a window of chores is short by {} > {delta}",
            report.delta_max
        )));
    }
    let mut bundles = alloc.bundles.clone();
    let mut moves = Vec::new();
    let next_trade = |chi: &[usize]| {
        let s = chi.iter().position(|&c| c >= 2)?;
        (s + 1..chi.len()).find(|&t| chi[t] == 0).map(|t| (s, t))
    };
    while let Some((s, t)) = next_trade(&chi) {
        let (from, to) = (order[s], order[t]);
        let agent = bundles.iter().position(|b| b.contains(from)).expect("chore with two copies has a holder");
        bundles[agent].remove(from);
        bundles[agent].insert(to);
        chi[s] -= 1;
        chi[t] += 1;
        moves.push(ChoreMove { agent, from, to });
    }
    Ok(ChoreRedistribution { alloc: MultiAllocation::new(bundles), moves })
}

/// Pre-processing, a gated draw on the leftover chores, then redistribution.
pub fn ordered_chores_pipeline(instance: &Instance, profile: &MmsProfile, cfg: &ChoreConfig) -> Result<ChoreOutcome> {
    check_profile(instance, profile)?;
    if !check_identically_ordered(instance)? {
        return Err(Error::NotIdenticallyOrdered);
    }
    let (n, m) = (instance.n(), instance.m());
    let alpha = cfg.alpha.unwrap_or_else(|| default_alpha(n, m));
    let sub = preprocess_chores(instance, profile, alpha)?;
    let ds = delta_star(n, m);
    let mut bundles: Vec<Bundle> = sub.pre_bundles.iter().map(|b| b.clone().unwrap_or_default()).collect();
    let mut retries = 0;
    if !sub.remaining_chores.is_empty() && !sub.remaining_agents.is_empty() {
        let order = &sub.remaining_chores;
        let restricted: Vec<Vec<Bundle>> = sub
            .remaining_agents
            .iter()
            .map(|&i| profile.inducing[i].iter().map(|b| restrict(b, order)).collect())
            .collect();
        let gate = (ds.floor() as usize).min(order.len());
        let ((draw, deficit), k) = first_accepted(cfg.seed, cfg.retries_for(m), |rng| {
            let draw = draw_blocks(&restricted, rng);
            let chi = order_counts(&draw, order, m);
            let deficit = coverage_deficit(&chi).delta_max;
            (deficit <= gate).then_some((draw, deficit))
        })?;
        retries = k;
        let out = redistribute_chores(&draw, instance, order, deficit)?;
        for (&i, b) in sub.remaining_agents.iter().zip(out.alloc.bundles) {
            bundles[i] = b;
        }
    }
    let (alloc, unassigned) = finish(instance, profile, MultiAllocation::new(bundles))?;
    Ok(ChoreOutcome { alloc, retries, unassigned, delta_star: Some(ds), preassigned_agents: sub.preassigned_agents() })
}

fn restrict(block: &Bundle, order: &[usize]) -> Bundle {
    Bundle::from_sorted_unchecked(block.items().iter().copied().filter(|g| order.binary_search(g).is_ok()).collect())
}

/// Counts per position of `order`.
fn order_counts(alloc: &MultiAllocation, order: &[usize], m: usize) -> Vec<usize> {
    let counts = alloc.char_vector(m).map(|c| c.counts).unwrap_or_else(|_| vec![0; m]);
    order.iter().map(|&g| counts[g]).collect()
}

fn ratio(cost: f64, mu: f64) -> f64 {
    if cost <= EPS {
        0.0
    } else if mu <= EPS {
        f64::INFINITY
    } else {
        cost / mu
    }
}

/// Exact allocation minimizing `max_i c_i(A_i) / mu_i`, first in lexicographic
/// assignment order among optima. Returns the bundles and the ratio.
pub fn brute_force_minmax_ratio(instance: &Instance, profile: &MmsProfile, budget: u64) -> Result<(Vec<Bundle>, f64)> {
    let (n, m) = (instance.n(), instance.m());
    if profile.n() != n {
        return Err(Error::ProfileMismatch(format!("{n} agents, profile for {}", profile.n())));
    }
    check_budget(n, m, budget)?;
    struct Search<'a> {
        instance: &'a Instance,
        mu: &'a [f64],
        masks: Vec<u64>,
        assign: Vec<usize>,
        best: f64,
        best_assign: Option<Vec<usize>>,
    }
    impl Search<'_> {
        fn current(&self) -> f64 {
            (0..self.masks.len())
                .map(|i| ratio(self.instance.eval_mask(i, self.masks[i]), self.mu[i]))
                .fold(0.0, f64::max)
        }
        fn run(&mut self, g: usize) {
            let val = self.current();
            if self.best_assign.is_some() && val >= self.best - EPS {
                return;
            }
            if g == self.assign.len() {
                self.best = val;
                self.best_assign = Some(self.assign.clone());
                return;
            }
            for i in 0..self.masks.len() {
                self.masks[i] |= 1 << g;
                self.assign[g] = i;
                self.run(g + 1);
                self.masks[i] &= !(1 << g);
            }
        }
    }
    let mut search = Search {
        instance,
        mu: &profile.mu,
        masks: vec![0; n],
        assign: vec![0; m],
        best: f64::INFINITY,
        best_assign: None,
    };
    search.run(0);
    let assign = search.best_assign.expect("some assignment exists");
    let mut bundles = vec![Vec::new(); n];
    for (g, &i) in assign.iter().enumerate() {
        bundles[i].push(g);
    }
    Ok((bundles.into_iter().map(Bundle::from_sorted_unchecked).collect(), search.best))
}

/// `ceil(2k / 11)`.
pub fn trim_count(k: usize) -> usize {
    (2 * k).div_ceil(11)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrimOutcome {
    pub alloc: MultiAllocation,
    /// Exact allocation found by the oracle, before trimming.
    pub oracle: Vec<Bundle>,
    pub ratio: f64,
    pub removed: Vec<usize>,
    pub unassigned: Vec<usize>,
}

/// Takes a min-max-ratio exact allocation (ratio at most 11/9) and drops each
/// agent's `ceil(2k/11)` costliest chores.
pub fn trim_additive_chores(instance: &Instance, profile: &MmsProfile, budget: u64) -> Result<TrimOutcome> {
    if instance.kind().is_goods() || !instance.is_additive() {
        return Err(Error::Unsupported("additive chores".into()));
    }
    let (oracle, best) = brute_force_minmax_ratio(instance, profile, budget)?;
    if best > 11.0 / 9.0 + EPS {
        return Err(Error::RatioAssertionFailed { ratio: best });
    }
    let mut removed = Vec::with_capacity(instance.n());
    let mut bundles = Vec::with_capacity(instance.n());
    for (i, bundle) in oracle.iter().enumerate() {
        let ValuationSpec::Additive { weights } = instance.spec(i)? else { unreachable!() };
        let p = trim_count(bundle.len());
        let mut by_cost = bundle.items().to_vec();
        by_cost.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));
        let mut kept = by_cost.split_off(p);
        kept.sort_unstable();
        removed.push(p);
        bundles.push(Bundle::from_sorted_unchecked(kept));
    }
    let (alloc, unassigned) = finish(instance, profile, MultiAllocation::new(bundles))?;
    Ok(TrimOutcome { alloc, oracle, ratio: best, removed, unassigned })
}
