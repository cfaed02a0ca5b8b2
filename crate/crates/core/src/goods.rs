//! Multi-allocations of goods with bounded duplication.
//!
//! Samplers draw one block of each agent's share-inducing partition and
//! reject draws whose characteristic vector exceeds the gate; every agent
//! therefore always meets its share. Identically ordered instances get a
//! restricted draw followed by deterministic copy redistribution, and
//! additive instances get an exact search over the doubled ground set.

use std::ops::Range;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::alloc::{Bundle, MultiAllocation};
use crate::error::{Error, Result};
use crate::instance::{check_identically_ordered, EntitlementVector, Instance};
use crate::rng::first_accepted;
use crate::shares::{compute_constrained_profile, copy_of, find_feasible_copy_allocation, MmsProfile};
use crate::EPS;

pub(crate) fn log2(m: usize) -> f64 {
    (m as f64).log2()
}

/// `ceil(log2 m)` for `m >= 1`.
pub(crate) fn ceil_log2(m: usize) -> usize {
    (usize::BITS - m.saturating_sub(1).leading_zeros()) as usize
}

pub fn default_max_retries(m: usize) -> usize {
    64 * (m + 1)
}

/// `max(1, ceil(12 sqrt(log2 m)))`.
pub fn default_tau(m: usize) -> usize {
    ((12.0 * log2(m).sqrt()).ceil() as usize).max(1)
}

/// `max(6, ceil(3 log2 m))`.
pub fn monotone_linf_limit(m: usize) -> usize {
    ((3.0 * log2(m)).ceil() as usize).max(6)
}

/// `m + ceil(6 m sqrt(log2 m) / sqrt(n))`.
pub fn ordered_l1_limit(n: usize, m: usize) -> usize {
    m + (6.0 * m as f64 * log2(m).sqrt() / (n as f64).sqrt()).ceil() as usize
}

/// `max(12, ceil(3 log2 m))`.
pub fn entitled_linf_limit(m: usize) -> usize {
    ((3.0 * log2(m)).ceil() as usize).max(12)
}

/// `ceil(1.7 m)` in integer arithmetic.
pub fn entitled_l1_limit(m: usize) -> usize {
    (17 * m).div_ceil(10)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub seed: u64,
    /// Defaults to `64 (m + 1)`.
    pub max_retries: Option<usize>,
    /// Defaults to [`default_tau`].
    pub tau: Option<usize>,
}

impl SamplerConfig {
    pub fn new(seed: u64) -> Self {
        Self { seed, max_retries: None, tau: None }
    }

    pub fn retries_for(&self, m: usize) -> usize {
        self.max_retries.unwrap_or_else(|| default_max_retries(m)).max(1)
    }

    pub fn tau_for(&self, m: usize) -> usize {
        self.tau.unwrap_or_else(|| default_tau(m)).max(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub linf_limit: usize,
    pub l1_limit: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleOutcome {
    pub alloc: MultiAllocation,
    /// Rejected draws before the accepted one.
    pub retries: usize,
    pub bounds: Bounds,
}

/// One uniformly random block per agent.
pub fn draw_blocks<R: Rng>(partitions: &[Vec<Bundle>], rng: &mut R) -> MultiAllocation {
    MultiAllocation::new(partitions.iter().map(|p| p[rng.gen_range(0..p.len())].clone()).collect())
}

fn check_profile(instance: &Instance, profile: &MmsProfile, blocks: impl Fn(usize) -> usize) -> Result<()> {
    if !instance.kind().is_goods() {
        return Err(Error::Unsupported("a goods instance".into()));
    }
    if profile.n() != instance.n() || profile.inducing.len() != instance.n() {
        return Err(Error::ProfileMismatch(format!("{} agents, profile for {}", instance.n(), profile.n())));
    }
    for (i, p) in profile.inducing.iter().enumerate() {
        if p.len() != blocks(i) {
            return Err(Error::ProfileMismatch(format!("agent {i} has {} blocks, expected {}", p.len(), blocks(i))));
        }
    }
    Ok(())
}

fn assert_mms(instance: &Instance, profile: &MmsProfile, alloc: &MultiAllocation) -> Result<()> {
    if crate::alloc::verify_mms(instance, profile, alloc)? {
        Ok(())
    } else {
        Err(Error::PreconditionViolated("an agent's bundle is below its share; profile does not belong to this instance".into()))
    }
}

/// Independent uniform block draws, accepted once `linf <= max(6, ceil(3 log2 m))` and `l1 <= m`.
pub fn sample_monotone_goods(instance: &Instance, profile: &MmsProfile, cfg: &SamplerConfig) -> Result<SampleOutcome> {
    let (n, m) = (instance.n(), instance.m());
    check_profile(instance, profile, |_| n)?;
    let bounds = Bounds { linf_limit: monotone_linf_limit(m), l1_limit: m };
    let (alloc, retries) = first_accepted(cfg.seed, cfg.retries_for(m), |rng| {
        let alloc = draw_blocks(&profile.inducing, rng);
        let chi = alloc.char_vector(m).ok()?;
        (chi.linf <= bounds.linf_limit && chi.l1 <= bounds.l1_limit).then_some(alloc)
    })?;
    assert_mms(instance, profile, &alloc)?;
    Ok(SampleOutcome { alloc, retries, bounds })
}

/// Nested item prefixes of sizes `min(2^t, m)` for `t = 0..=ceil(log2 m)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixFamily {
    pub sizes: Vec<usize>,
}

impl PrefixFamily {
    pub fn new(m: usize) -> Self {
        Self { sizes: (0..=ceil_log2(m)).map(|t| (1usize << t).min(m)).collect() }
    }

    pub fn prefixes(&self) -> impl Iterator<Item = Range<usize>> + '_ {
        self.sizes.iter().map(|&s| 0..s)
    }

    /// True iff every prefix `P` has `sum of counts over P <= factor * |P|`.
    pub fn within(&self, counts: &[usize], factor: f64) -> bool {
        self.prefixes()
            .all(|p| counts[p.clone()].iter().sum::<usize>() as f64 <= factor * p.len() as f64 + EPS)
    }
}

/// Blocks sorted by size (then content), truncated to those with `|B| <= 2m/n`.
pub fn eligible_blocks(partition: &[Bundle], n: usize, m: usize) -> Vec<Bundle> {
    let mut sorted = partition.to_vec();
    sorted.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    sorted.retain(|b| b.len() * n <= 2 * m);
    sorted
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderedBase {
    pub alloc: MultiAllocation,
    pub retries: usize,
    pub l1_limit: usize,
}

/// Draws among the small blocks only; accepted when `l1` and every dyadic
/// prefix stay within their gates.
pub fn sample_ordered_goods_base(instance: &Instance, profile: &MmsProfile, cfg: &SamplerConfig) -> Result<OrderedBase> {
    let (n, m) = (instance.n(), instance.m());
    check_profile(instance, profile, |_| n)?;
    if !check_identically_ordered(instance)? {
        return Err(Error::NotIdenticallyOrdered);
    }
    let eligible: Vec<Vec<Bundle>> = profile.inducing.iter().map(|p| eligible_blocks(p, n, m)).collect();
    if let Some(i) = eligible.iter().position(Vec::is_empty) {
        return Err(Error::ProfileMismatch(format!("agent {i} has no block of size at most 2m/n")));
    }
    let l1_limit = ordered_l1_limit(n, m);
    let family = PrefixFamily::new(m);
    let factor = 6.0 * log2(m).sqrt();
    let (alloc, retries) = first_accepted(cfg.seed, cfg.retries_for(m), |rng| {
        let alloc = draw_blocks(&eligible, rng);
        let chi = alloc.char_vector(m).ok()?;
        // a single good has log2 m = 0 and nothing left to gate
        (m == 1 || (chi.l1 <= l1_limit && family.within(&chi.counts, factor))).then_some(alloc)
    })?;
    assert_mms(instance, profile, &alloc)?;
    Ok(OrderedBase { alloc, retries, l1_limit })
}

/// One copy of good `from` in agent `agent`'s bundle replaced by good `to`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Move {
    pub agent: usize,
    pub from: usize,
    pub to: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Redistribution {
    pub alloc: MultiAllocation,
    pub moves: Vec<Move>,
}

/// Moves copies of over-used goods to lower-index under-used goods until no
/// good is held more than `tau` times. Ties go to the lowest index.
pub fn redistribute_goods(alloc: &MultiAllocation, instance: &Instance, tau: usize) -> Result<Redistribution> {
    if !check_identically_ordered(instance)? {
        return Err(Error::NotIdenticallyOrdered);
    }
    let m = instance.m();
    let mut counts = alloc.char_vector(m)?.counts;
    let mut bundles = alloc.bundles.clone();
    let mut moves = Vec::new();
    while let Some(t) = counts.iter().position(|&c| c > tau) {
        let s = (0..t).find(|&s| counts[s] < tau).ok_or(Error::NoDonorGood { good: t, tau })?;
        let agent = bundles
            .iter()
            .position(|b| b.contains(t) && !b.contains(s))
            .expect("more holders of t than of s");
        bundles[agent].remove(t);
        bundles[agent].insert(s);
        counts[t] -= 1;
        counts[s] += 1;
        moves.push(Move { agent, from: t, to: s });
    }
    Ok(Redistribution { alloc: MultiAllocation::new(bundles), moves })
}

/// Restricted base draw followed by redistribution with threshold `tau`.
pub fn sample_ordered_goods(instance: &Instance, profile: &MmsProfile, cfg: &SamplerConfig) -> Result<SampleOutcome> {
    let m = instance.m();
    let base = sample_ordered_goods_base(instance, profile, cfg)?;
    let tau = cfg.tau_for(m);
    let out = redistribute_goods(&base.alloc, instance, tau)?;
    assert_mms(instance, profile, &out.alloc)?;
    Ok(SampleOutcome { alloc: out.alloc, retries: base.retries, bounds: Bounds { linf_limit: tau, l1_limit: base.l1_limit } })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Duplication {
    pub alloc: MultiAllocation,
    /// Shares over feasible partitions of the doubled ground set; empty for `n = 1`.
    pub mu_tilde: Vec<f64>,
    /// Exact allocation of copy indices that was projected.
    pub copies: Vec<Bundle>,
}

/// Every good handed to at most two agents, each agent reaching its share.
pub fn duplicate_additive(instance: &Instance, budget: u64) -> Result<Duplication> {
    if !instance.kind().is_goods() || !instance.is_additive() {
        return Err(Error::Unsupported("additive goods".into()));
    }
    let m = instance.m();
    if instance.n() == 1 {
        let full = Bundle::full(m);
        return Ok(Duplication { alloc: MultiAllocation::new(vec![full.clone()]), mu_tilde: Vec::new(), copies: vec![full] });
    }
    let mu_tilde = compute_constrained_profile(instance, budget)?.mu;
    let targets: Vec<f64> = mu_tilde.iter().map(|x| x / 2.0).collect();
    let copies = find_feasible_copy_allocation(instance, &targets, budget)?
        .ok_or_else(|| Error::SearchFailed("half of every agent's constrained share".into()))?;
    let bundles = copies
        .iter()
        .map(|b| Bundle::new(b.items().iter().map(|&c| copy_of(c).0).collect(), m))
        .collect::<Result<_>>()?;
    Ok(Duplication { alloc: MultiAllocation::new(bundles), mu_tilde, copies })
}

/// Uniform draws over each agent's `floor(1/b_i)` blocks, gated by
/// `linf <= max(12, ceil(3 log2 m))` and `l1 <= ceil(1.7 m)`.
pub fn sample_entitled(
    instance: &Instance,
    ent: &EntitlementVector,
    profile: &MmsProfile,
    cfg: &SamplerConfig,
) -> Result<SampleOutcome> {
    let m = instance.m();
    if ent.len() != instance.n() {
        return Err(Error::InvalidEntitlements(format!("{} entitlements for {} agents", ent.len(), instance.n())));
    }
    check_profile(instance, profile, |i| ent.blocks_for(i))?;
    let bounds = Bounds { linf_limit: entitled_linf_limit(m), l1_limit: entitled_l1_limit(m) };
    let (alloc, retries) = first_accepted(cfg.seed, cfg.retries_for(m), |rng| {
        let alloc = draw_blocks(&profile.inducing, rng);
        let chi = alloc.char_vector(m).ok()?;
        (chi.linf <= bounds.linf_limit && chi.l1 <= bounds.l1_limit).then_some(alloc)
    })?;
    assert_mms(instance, profile, &alloc)?;
    Ok(SampleOutcome { alloc, retries, bounds })
}
