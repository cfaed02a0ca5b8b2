//! Seeded experiment sweeps and random instance generators.

use std::io::Write;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adversarial::random_partition;
use crate::alloc::MultiAllocation;
use crate::chores::{ordered_chores_pipeline, sample_monotone_chores, trim_additive_chores, ChoreConfig};
use crate::error::{Error, Result};
use crate::goods::{duplicate_additive, sample_entitled, sample_monotone_goods, sample_ordered_goods, SamplerConfig};
use crate::instance::{EntitlementVector, Instance, ItemKind, Transform, ValuationSpec};
use crate::rng::{derive, stream, trial_seed};
use crate::shares::{compute_hat_profile, compute_profile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceClass {
    Additive,
    Ordered,
    Threshold,
    Table,
}

/// Largest `m` accepted for random table valuations.
pub const MAX_TABLE_M: usize = 10;

/// Random instance of the given class. Threshold instances need `m >= n`.
pub fn gen_random_instance(class: InstanceClass, kind: ItemKind, n: usize, m: usize, seed: u64) -> Result<Instance> {
    let mut rng = stream(seed);
    let agents = match class {
        InstanceClass::Additive => (0..n)
            .map(|_| ValuationSpec::Additive { weights: (0..m).map(|_| rng.gen_range(1..=100) as f64).collect() })
            .collect(),
        InstanceClass::Ordered => {
            let mut shared: Vec<f64> = (0..m).map(|_| rng.gen_range(1..=100) as f64).collect();
            shared.sort_by(|a, b| b.total_cmp(a));
            (0..n)
                .map(|_| match rng.gen_range(0..3) {
                    0 => ValuationSpec::Ordered { weights: shared.clone(), transform: Transform::Identity },
                    1 => ValuationSpec::Ordered { weights: shared.clone(), transform: Transform::Sqrt },
                    _ => {
                        // keep exp(w) - 1 in a modest range
                        let total: f64 = shared.iter().sum();
                        let weights = shared.iter().map(|w| 4.0 * w / total).collect();
                        ValuationSpec::Ordered { weights, transform: Transform::Exp }
                    }
                })
                .collect()
        }
        InstanceClass::Threshold => {
            if m < n {
                return Err(Error::InvalidInstance(format!("threshold instances need m >= n, got n = {n}, m = {m}")));
            }
            (0..n)
                .map(|_| {
                    let blocks = random_partition(n, m, &mut rng).iter().map(|b| b.items().to_vec()).collect();
                    match kind {
                        ItemKind::Goods => ValuationSpec::PartitionThreshold { blocks },
                        ItemKind::Chores => ValuationSpec::PartitionSubset { blocks },
                    }
                })
                .collect()
        }
        InstanceClass::Table => {
            if m > MAX_TABLE_M {
                return Err(Error::TooManyItems { m, limit: MAX_TABLE_M });
            }
            (0..n).map(|_| ValuationSpec::Table { values: random_monotone_table(m, &mut rng) }).collect()
        }
    };
    Instance::new(kind, m, agents, None)
}

/// Random draw per subset, raised to the largest value among its one-smaller subsets.
fn random_monotone_table<R: Rng>(m: usize, rng: &mut R) -> Vec<f64> {
    let mut values = vec![0.0; 1 << m];
    for mask in 1..values.len() {
        let below = (0..m)
            .filter(|g| mask >> g & 1 == 1)
            .map(|g| values[mask & !(1 << g)])
            .fold(0.0, f64::max);
        values[mask] = below.max(rng.gen_range(0..=100) as f64);
    }
    values
}

/// Positive weights normalized to sum 1 and sorted nonincreasing.
pub fn gen_entitlements<R: Rng>(n: usize, rng: &mut R) -> EntitlementVector {
    loop {
        let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let mut b: Vec<f64> = raw.iter().map(|x| x / total).collect();
        b.sort_by(|x, y| y.total_cmp(x));
        // renormalizing can leave the sum a few ulps off
        let drift = 1.0 - b.iter().sum::<f64>();
        b[0] += drift;
        if let Ok(ent) = EntitlementVector::new(b) {
            return ent;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    MonotoneGoods,
    OrderedGoods,
    AdditiveGoods,
    EntitledGoods,
    MonotoneChores,
    OrderedChores,
    AdditiveChores,
}

impl Method {
    pub fn kind(self) -> ItemKind {
        match self {
            Method::MonotoneGoods | Method::OrderedGoods | Method::AdditiveGoods | Method::EntitledGoods => ItemKind::Goods,
            _ => ItemKind::Chores,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::MonotoneGoods => "monotone_goods",
            Method::OrderedGoods => "ordered_goods",
            Method::AdditiveGoods => "additive_goods",
            Method::EntitledGoods => "entitled_goods",
            Method::MonotoneChores => "monotone_chores",
            Method::OrderedChores => "ordered_chores",
            Method::AdditiveChores => "additive_chores",
        }
    }

    /// Whether instances of `class` meet the method's preconditions.
    pub fn accepts(self, class: InstanceClass) -> bool {
        match self {
            Method::OrderedGoods | Method::OrderedChores => class == InstanceClass::Ordered,
            Method::AdditiveGoods | Method::AdditiveChores => class == InstanceClass::Additive,
            _ => true,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub tau: Option<usize>,
    pub alpha: Option<f64>,
    pub max_retries: Option<usize>,
}

/// Grid of cells `n x m x class x method`, each run `trials` times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub master_seed: u64,
    pub trials: usize,
    pub n: Vec<usize>,
    pub m: Vec<usize>,
    pub classes: Vec<InstanceClass>,
    pub methods: Vec<Method>,
    #[serde(default)]
    pub overrides: Overrides,
    #[serde(default = "default_budget")]
    pub budget: u64,
    /// Fill `wall_time_ms`; off by default so output is byte-reproducible.
    #[serde(default)]
    pub timing: bool,
    #[serde(default)]
    pub output: Option<String>,
}

fn default_budget() -> u64 {
    crate::DEFAULT_BUDGET
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub n: usize,
    pub m: usize,
    pub class: InstanceClass,
    pub method: Method,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidInstance("trials must be at least 1".into()));
        }
        if self.n.contains(&0) || self.m.contains(&0) {
            return Err(Error::InvalidInstance("grid values of n and m must be positive".into()));
        }
        if self.cells().is_empty() {
            return Err(Error::InvalidInstance("the grid has no cell whose method accepts its class".into()));
        }
        Ok(())
    }

    /// Cells in grid order, skipping class/method pairs that do not fit.
    pub fn cells(&self) -> Vec<Cell> {
        let mut cells = Vec::new();
        for &n in &self.n {
            for &m in &self.m {
                for &class in &self.classes {
                    for &method in self.methods.iter().filter(|meth| meth.accepts(class)) {
                        cells.push(Cell { n, m, class, method });
                    }
                }
            }
        }
        cells
    }
}

/// One CSV row. Metrics are empty when the trial produced no allocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub method: Method,
    pub retries: Option<usize>,
    pub l1: Option<usize>,
    pub linf: Option<usize>,
    pub l0: Option<usize>,
    pub accepted: bool,
    pub wall_time_ms: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub records: Vec<TrialRecord>,
    /// `(cell index, trial, message)` for every trial that failed.
    pub failures: Vec<(usize, usize, String)>,
}

/// Allocation and retry count from running `method` on a fresh instance.
pub fn run_trial(cell: &Cell, seed: u64, overrides: &Overrides, budget: u64) -> Result<(MultiAllocation, usize)> {
    let instance = gen_random_instance(cell.class, cell.method.kind(), cell.n, cell.m, derive(seed, 0))?;
    let goods_cfg = SamplerConfig { seed: derive(seed, 1), max_retries: overrides.max_retries, tau: overrides.tau };
    let chores_cfg = ChoreConfig { seed: derive(seed, 1), max_retries: overrides.max_retries, alpha: overrides.alpha };
    Ok(match cell.method {
        Method::MonotoneGoods => {
            let out = sample_monotone_goods(&instance, &compute_profile(&instance, budget)?, &goods_cfg)?;
            (out.alloc, out.retries)
        }
        Method::OrderedGoods => {
            let out = sample_ordered_goods(&instance, &compute_profile(&instance, budget)?, &goods_cfg)?;
            (out.alloc, out.retries)
        }
        Method::AdditiveGoods => (duplicate_additive(&instance, budget)?.alloc, 0),
        Method::EntitledGoods => {
            let ent = gen_entitlements(cell.n, &mut stream(derive(seed, 2)));
            let profile = compute_hat_profile(&instance, &ent, budget)?;
            let out = sample_entitled(&instance, &ent, &profile, &goods_cfg)?;
            (out.alloc, out.retries)
        }
        Method::MonotoneChores => {
            let out = sample_monotone_chores(&instance, &compute_profile(&instance, budget)?, &chores_cfg)?;
            (out.alloc, out.retries)
        }
        Method::OrderedChores => {
            let out = ordered_chores_pipeline(&instance, &compute_profile(&instance, budget)?, &chores_cfg)?;
            (out.alloc, out.retries)
        }
        Method::AdditiveChores => {
            let profile = compute_profile(&instance, budget)?;
            (trim_additive_chores(&instance, &profile, budget)?.alloc, 0)
        }
    })
}

/// Runs every trial of every cell in parallel; rows come back in (cell, trial) order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let cells = cfg.cells();
    let jobs: Vec<(usize, usize)> = (0..cells.len()).flat_map(|c| (0..cfg.trials).map(move |t| (c, t))).collect();
    let results: Vec<(TrialRecord, Option<String>)> = jobs
        .par_iter()
        .map(|&(c, t)| {
            let cell = &cells[c];
            let seed = trial_seed(cfg.master_seed, c as u64, t as u64);
            let start = Instant::now();
            let outcome = run_trial(cell, seed, &cfg.overrides, cfg.budget);
            let wall_time_ms = if cfg.timing { start.elapsed().as_millis() as u64 } else { 0 };
            let mut rec = TrialRecord {
                seed,
                n: cell.n,
                m: cell.m,
                method: cell.method,
                retries: None,
                l1: None,
                linf: None,
                l0: None,
                accepted: false,
                wall_time_ms,
            };
            match outcome.and_then(|(alloc, retries)| Ok((alloc.char_vector(cell.m)?, retries))) {
                Ok((chi, retries)) => {
                    rec.retries = Some(retries);
                    rec.l1 = Some(chi.l1);
                    rec.linf = Some(chi.linf);
                    rec.l0 = Some(chi.l0);
                    rec.accepted = true;
                    (rec, None)
                }
                Err(e) => {
                    if let Error::RetriesExhausted { retries } = e {
                        rec.retries = Some(retries);
                    }
                    (rec, Some(e.to_string()))
                }
            }
        })
        .collect();
    let mut records = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    for ((rec, err), &(c, t)) in results.into_iter().zip(&jobs) {
        if let Some(msg) = err {
            failures.push((c, t, msg));
        }
        records.push(rec);
    }
    Ok(ExperimentReport { records, failures })
}

/// Header `seed,n,m,method,retries,l1,linf,l0,accepted,wall_time_ms`, one row per record.
pub fn write_csv<W: Write>(records: &[TrialRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    for rec in records {
        w.serialize(rec).map_err(io)?;
    }
    if records.is_empty() {
        w.write_record(["seed", "n", "m", "method", "retries", "l1", "linf", "l0", "accepted", "wall_time_ms"])
            .map_err(io)?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))?;
    Ok(())
}

pub fn csv_string(records: &[TrialRecord]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(records, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv is utf-8"))
}
