//! Fair division instances and per-agent valuation (or cost) functions.
//!
//! Every valuation is a normalized monotone set function over item indices
//! `0..m`. For goods it is a value, for chores a cost; the evaluation code is
//! shared and only the comparison direction differs downstream.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::EPS;

/// Largest `m` for which table valuations and exhaustive checks are supported.
pub const MAX_EXHAUSTIVE_M: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ItemKind {
    Goods,
    Chores,
}

impl ItemKind {
    pub fn is_goods(self) -> bool {
        matches!(self, ItemKind::Goods)
    }
}

/// Monotone nondecreasing map applied to a weighted sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transform {
    Identity,
    Sqrt,
    /// `exp(w) - 1`, shifted so the empty bundle is worth zero.
    Exp,
}

impl Transform {
    pub fn apply(self, w: f64) -> f64 {
        match self {
            Transform::Identity => w,
            Transform::Sqrt => w.sqrt(),
            Transform::Exp => w.exp_m1(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ValuationSpec {
    Additive {
        weights: Vec<f64>,
    },
    /// `transform(sum of weights)` with weights nonincreasing in item index.
    Ordered {
        weights: Vec<f64>,
        transform: Transform,
    },
    /// 1 if the bundle contains some block entirely, else 0.
    PartitionThreshold {
        blocks: Vec<Vec<usize>>,
    },
    /// Largest covered fraction of any block.
    XosPartition {
        blocks: Vec<Vec<usize>>,
    },
    /// Cost 0 if the bundle fits inside a single block, else 1.
    PartitionSubset {
        blocks: Vec<Vec<usize>>,
    },
    /// Explicit value per subset, indexed by bitmask (bit g = item g).
    Table {
        values: Vec<f64>,
    },
}

fn block_masks(blocks: &[Vec<usize>]) -> impl Iterator<Item = u64> + '_ {
    blocks
        .iter()
        .map(|b| b.iter().fold(0u64, |acc, &g| acc | (1u64 << g)))
}

impl ValuationSpec {
    /// Evaluate on a subset given as a bitmask. Requires `m <= 64`.
    pub fn eval_mask(&self, mask: u64) -> f64 {
        match self {
            ValuationSpec::Additive { weights } => sum_mask(weights, mask),
            ValuationSpec::Ordered { weights, transform } => transform.apply(sum_mask(weights, mask)),
            ValuationSpec::PartitionThreshold { blocks } => {
                if block_masks(blocks).any(|b| b & mask == b) {
                    1.0
                } else {
                    0.0
                }
            }
            ValuationSpec::XosPartition { blocks } => blocks
                .iter()
                .zip(block_masks(blocks))
                .map(|(b, bm)| (bm & mask).count_ones() as f64 / b.len() as f64)
                .fold(0.0, f64::max),
            ValuationSpec::PartitionSubset { blocks } => {
                if mask == 0 || block_masks(blocks).any(|b| mask & !b == 0) {
                    0.0
                } else {
                    1.0
                }
            }
            ValuationSpec::Table { values } => values[mask as usize],
        }
    }

    /// Evaluate on a sorted, duplicate-free list of items (any `m`).
    pub fn eval_items(&self, items: &[usize], m: usize) -> Result<f64> {
        if m <= 64 {
            let mask = items.iter().fold(0u64, |acc, &g| acc | (1u64 << g));
            if let ValuationSpec::Table { values } = self {
                return values
                    .get(mask as usize)
                    .copied()
                    .ok_or(Error::MissingTableEntry(mask));
            }
            return Ok(self.eval_mask(mask));
        }
        let mut member = vec![false; m];
        for &g in items {
            member[g] = true;
        }
        Ok(match self {
            ValuationSpec::Additive { weights } => items.iter().map(|&g| weights[g]).sum(),
            ValuationSpec::Ordered { weights, transform } => {
                transform.apply(items.iter().map(|&g| weights[g]).sum())
            }
            ValuationSpec::PartitionThreshold { blocks } => {
                if blocks.iter().any(|b| b.iter().all(|&g| member[g])) {
                    1.0
                } else {
                    0.0
                }
            }
            ValuationSpec::XosPartition { blocks } => blocks
                .iter()
                .map(|b| b.iter().filter(|&&g| member[g]).count() as f64 / b.len() as f64)
                .fold(0.0, f64::max),
            ValuationSpec::PartitionSubset { blocks } => {
                let mut block_of = vec![usize::MAX; m];
                for (j, b) in blocks.iter().enumerate() {
                    for &g in b {
                        block_of[g] = j;
                    }
                }
                match items.first() {
                    None => 0.0,
                    Some(&first) if items.iter().all(|&g| block_of[g] == block_of[first]) => 0.0,
                    Some(_) => 1.0,
                }
            }
            ValuationSpec::Table { .. } => {
                return Err(Error::TooManyItems { m, limit: MAX_EXHAUSTIVE_M })
            }
        })
    }

    /// Structural validation against an item count. `agent` is only used in messages.
    pub fn validate(&self, m: usize, agent: usize) -> Result<()> {
        let bad = |reason: String| Error::InvalidValuation { agent, reason };
        match self {
            ValuationSpec::Additive { weights } | ValuationSpec::Ordered { weights, .. } => {
                if weights.len() != m {
                    return Err(bad(format!("expected {m} weights, got {}", weights.len())));
                }
                for (g, &w) in weights.iter().enumerate() {
                    if !w.is_finite() || w < 0.0 {
                        return Err(bad(format!("weights[{g}] = {w} is not a finite nonnegative number")));
                    }
                }
                if let ValuationSpec::Ordered { .. } = self {
                    if let Some(g) = (1..m).find(|&g| weights[g] > weights[g - 1]) {
                        return Err(bad(format!("weights[{g}] exceeds weights[{}]; ordered weights must be nonincreasing", g - 1)));
                    }
                }
            }
            ValuationSpec::PartitionThreshold { blocks }
            | ValuationSpec::XosPartition { blocks }
            | ValuationSpec::PartitionSubset { blocks } => {
                let mut seen = vec![false; m];
                for (j, block) in blocks.iter().enumerate() {
                    if block.is_empty() && !matches!(self, ValuationSpec::PartitionSubset { .. }) {
                        return Err(bad(format!("blocks[{j}] is empty")));
                    }
                    for &g in block {
                        if g >= m {
                            return Err(bad(format!("blocks[{j}] contains item {g} >= m = {m}")));
                        }
                        if seen[g] {
                            return Err(bad(format!("item {g} appears in more than one block")));
                        }
                        seen[g] = true;
                    }
                }
                if let Some(g) = seen.iter().position(|s| !s) {
                    return Err(bad(format!("item {g} is not covered by any block")));
                }
            }
            ValuationSpec::Table { values } => {
                if m > MAX_EXHAUSTIVE_M {
                    return Err(bad(format!("table valuations need m <= {MAX_EXHAUSTIVE_M}")));
                }
                if values.len() != 1 << m {
                    return Err(bad(format!("expected {} table values, got {}", 1usize << m, values.len())));
                }
                if let Some(i) = values.iter().position(|v| !v.is_finite() || *v < 0.0) {
                    return Err(bad(format!("values[{i}] is not a finite nonnegative number")));
                }
                if !check_monotone(self, m)? {
                    return Err(bad("table is not normalized and monotone".into()));
                }
            }
        }
        Ok(())
    }

    /// Nonnegative weights nonincreasing by index imply identical ordering for
    /// both weighted variants; `None` means no structural shortcut applies.
    fn ordered_by_index(&self) -> Option<bool> {
        match self {
            ValuationSpec::Additive { weights } | ValuationSpec::Ordered { weights, .. } => {
                Some(weights.windows(2).all(|w| w[0] + EPS >= w[1]))
            }
            _ => None,
        }
    }
}

fn sum_mask(weights: &[f64], mut mask: u64) -> f64 {
    let mut total = 0.0;
    while mask != 0 {
        let g = mask.trailing_zeros() as usize;
        total += weights[g];
        mask &= mask - 1;
    }
    total
}

/// Exhaustively checks normalization and monotonicity: `v(S) <= v(S + g)`.
pub fn check_monotone(spec: &ValuationSpec, m: usize) -> Result<bool> {
    if m > MAX_EXHAUSTIVE_M {
        return Err(Error::TooManyItems { m, limit: MAX_EXHAUSTIVE_M });
    }
    if let ValuationSpec::Table { values } = spec {
        if values.len() < 1 << m {
            return Err(Error::MissingTableEntry(values.len() as u64));
        }
    }
    if spec.eval_mask(0).abs() > EPS {
        return Ok(false);
    }
    let full = 1u64 << m;
    for s in 0..full {
        let vs = spec.eval_mask(s);
        for g in 0..m {
            let bit = 1u64 << g;
            if s & bit == 0 && vs > spec.eval_mask(s | bit) + EPS {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntitlementVector {
    b: Vec<f64>,
}

impl EntitlementVector {
    pub fn new(b: Vec<f64>) -> Result<Self> {
        if b.is_empty() {
            return Err(Error::InvalidEntitlements("no entitlements given".into()));
        }
        for (i, &x) in b.iter().enumerate() {
            if !(x > 0.0 && x <= 1.0) {
                return Err(Error::InvalidEntitlements(format!("b[{i}] = {x} is outside (0, 1]")));
            }
        }
        let total: f64 = b.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidEntitlements(format!("entitlements sum to {total}, not 1")));
        }
        if let Some(i) = (1..b.len()).find(|&i| b[i] > b[i - 1]) {
            return Err(Error::InvalidEntitlements(format!(
                "agents must be indexed by nonincreasing entitlement; b[{i}] > b[{}]",
                i - 1
            )));
        }
        Ok(Self { b })
    }

    /// Equal entitlements `1/n`.
    pub fn uniform(n: usize) -> Self {
        Self { b: vec![1.0 / n as f64; n] }
    }

    pub fn weights(&self) -> &[f64] {
        &self.b
    }

    pub fn len(&self) -> usize {
        self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.b.is_empty()
    }

    /// Number of blocks `floor(1 / b_i)` used for agent `i`'s share.
    pub fn blocks_for(&self, agent: usize) -> usize {
        blocks_for_entitlement(self.b[agent])
    }

    pub fn block_counts(&self) -> Vec<usize> {
        self.b.iter().map(|&x| blocks_for_entitlement(x)).collect()
    }
}

/// `floor(1/b)`, nudged so that `b = 1/k` computed in floating point maps to `k`.
pub fn blocks_for_entitlement(b: f64) -> usize {
    ((1.0 / b) + 1e-9).floor().max(1.0) as usize
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    kind: ItemKind,
    m: usize,
    agents: Vec<ValuationSpec>,
    entitlements: Option<EntitlementVector>,
}

impl Instance {
    pub fn new(
        kind: ItemKind,
        m: usize,
        agents: Vec<ValuationSpec>,
        entitlements: Option<EntitlementVector>,
    ) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidInstance("m must be at least 1".into()));
        }
        if agents.is_empty() {
            return Err(Error::InvalidInstance("n must be at least 1".into()));
        }
        for (i, spec) in agents.iter().enumerate() {
            spec.validate(m, i)?;
        }
        if let Some(ent) = &entitlements {
            if ent.len() != agents.len() {
                return Err(Error::InvalidEntitlements(format!(
                    "{} entitlements for {} agents",
                    ent.len(),
                    agents.len()
                )));
            }
        }
        Ok(Self { kind, m, agents, entitlements })
    }

    /// Goods instance with additive valuations.
    pub fn additive_goods(weights: Vec<Vec<f64>>) -> Result<Self> {
        let m = weights.first().map_or(0, Vec::len);
        let agents = weights.into_iter().map(|w| ValuationSpec::Additive { weights: w }).collect();
        Self::new(ItemKind::Goods, m, agents, None)
    }

    /// Chores instance with additive costs.
    pub fn additive_chores(costs: Vec<Vec<f64>>) -> Result<Self> {
        let m = costs.first().map_or(0, Vec::len);
        let agents = costs.into_iter().map(|w| ValuationSpec::Additive { weights: w }).collect();
        Self::new(ItemKind::Chores, m, agents, None)
    }

    pub fn with_entitlements(mut self, ent: EntitlementVector) -> Result<Self> {
        if ent.len() != self.n() {
            return Err(Error::InvalidEntitlements(format!("{} entitlements for {} agents", ent.len(), self.n())));
        }
        self.entitlements = Some(ent);
        Ok(self)
    }

    pub fn kind(&self) -> ItemKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.agents.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn agents(&self) -> &[ValuationSpec] {
        &self.agents
    }

    pub fn spec(&self, agent: usize) -> Result<&ValuationSpec> {
        self.agents
            .get(agent)
            .ok_or(Error::AgentOutOfRange { agent, n: self.n() })
    }

    pub fn entitlements(&self) -> Option<&EntitlementVector> {
        self.entitlements.as_ref()
    }

    /// `v_i(bundle)` for goods, `c_i(bundle)` for chores.
    pub fn eval(&self, agent: usize, bundle: &crate::alloc::Bundle) -> Result<f64> {
        let spec = self.spec(agent)?;
        if let Some(&g) = bundle.items().last() {
            if g >= self.m {
                return Err(Error::ItemOutOfRange { item: g, m: self.m });
            }
        }
        spec.eval_items(bundle.items(), self.m)
    }

    /// Fast path for enumeration code; requires `m <= 64`.
    pub(crate) fn eval_mask(&self, agent: usize, mask: u64) -> f64 {
        self.agents[agent].eval_mask(mask)
    }

    pub fn is_additive(&self) -> bool {
        self.agents.iter().all(|s| matches!(s, ValuationSpec::Additive { .. }))
    }
}

/// True iff for every agent, `v(S + g_s) >= v(S + g_t)` whenever `s < t` and
/// neither item is in `S`. Weighted variants are decided from their weights;
/// the remaining variants are checked exhaustively.
pub fn check_identically_ordered(instance: &Instance) -> Result<bool> {
    let m = instance.m();
    for spec in instance.agents() {
        match spec.ordered_by_index() {
            Some(true) => continue,
            Some(false) => return Ok(false),
            None => {}
        }
        if m > MAX_EXHAUSTIVE_M {
            return Err(Error::TooManyItems { m, limit: MAX_EXHAUSTIVE_M });
        }
        for s_mask in 0..(1u64 << m) {
            for s in 0..m {
                if s_mask >> s & 1 == 1 {
                    continue;
                }
                let with_s = spec.eval_mask(s_mask | 1 << s);
                for t in (s + 1)..m {
                    if s_mask >> t & 1 == 0 && spec.eval_mask(s_mask | 1 << t) > with_s + EPS {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}
