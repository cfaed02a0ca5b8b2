use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use mms_multialloc::adversarial::{
    disjoint_selection_exists, gen_chores_lb_instance, gen_goods_lb_instance, hardness_reduce, independent_set_exists,
    min_l0_over_family, min_linf_over_family, Graph, LbFlavor,
};
use mms_multialloc::chores::{ordered_chores_pipeline, sample_monotone_chores, trim_additive_chores, ChoreConfig};
use mms_multialloc::format::{parse_instance, serialize_instance, AllocationDoc};
use mms_multialloc::goods::{duplicate_additive, sample_entitled, sample_monotone_goods, sample_ordered_goods, Bounds, SamplerConfig};
use mms_multialloc::harness::{gen_random_instance, run_experiment, write_csv, ExperimentConfig, InstanceClass};
use mms_multialloc::rng::derive;
use mms_multialloc::shares::{
    compute_constrained_mms, compute_constrained_profile, compute_hat_profile, compute_mms, compute_mms_hat, MmsProfile,
};
use mms_multialloc::{compute_profile, Error, Instance, ItemKind, MultiAllocation, DEFAULT_BUDGET};

#[derive(Parser)]
#[command(name = "mms", about = "Maximin-share multi-allocations with duplicated goods or disposed chores")]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Cap on states visited by exhaustive searches.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact shares with one inducing partition per agent.
    Compute {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        agent: Option<usize>,
        /// Use floor(1/b_i)-partitions from the instance's entitlements.
        #[arg(long, conflicts_with = "constrained")]
        entitled: bool,
        /// Partitions of the doubled ground set with at most one copy of a good per block.
        #[arg(long)]
        constrained: bool,
    },
    /// Goods multi-allocation where every agent meets its share.
    DupGoods {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum)]
        method: GoodsMethod,
        #[arg(long)]
        tau: Option<usize>,
        #[arg(long)]
        max_retries: Option<usize>,
    },
    /// Chores multi-allocation where every agent stays within its share.
    DisposeChores {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum)]
        method: ChoresMethod,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        max_retries: Option<usize>,
    },
    /// Exact minimum multiplicity (or leftover count) on random lower-bound instances, as CSV.
    Lowerbound {
        #[arg(long, value_enum)]
        kind: LbKind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        seeds: usize,
    },
    /// Disjoint-selection instance from a graph, with both decisions.
    Hardness {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Parameter sweep from a JSON config, as CSV.
    Experiment {
        #[arg(long)]
        config: PathBuf,
    },
    /// Random instance file.
    Gen {
        #[arg(long, value_enum)]
        class: ClassArg,
        #[arg(long, value_enum, default_value_t = KindArg::Goods)]
        kind: KindArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GoodsMethod {
    Monotone,
    Ordered,
    Additive,
    Entitled,
}

#[derive(Clone, Copy, ValueEnum)]
enum ChoresMethod {
    Monotone,
    Ordered,
    Additive,
}

#[derive(Clone, Copy, ValueEnum)]
enum LbKind {
    Goods,
    Chores,
    Xos,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassArg {
    Additive,
    Ordered,
    Threshold,
    Table,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Goods,
    Chores,
}

fn read_instance(path: &PathBuf) -> anyhow::Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(parse_instance(&text)?)
}

fn emit(out: &Option<PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> anyhow::Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn alloc_json(alloc: &MultiAllocation, m: usize, extra: Value) -> anyhow::Result<Value> {
    let mut doc = serde_json::to_value(AllocationDoc::new(alloc, m)?)?;
    if let (Value::Object(map), Value::Object(more)) = (&mut doc, extra) {
        map.extend(more);
    }
    Ok(doc)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let budget = cli.budget;
    let text = match cli.command {
        Command::Compute { instance, agent, entitled, constrained } => {
            let inst = read_instance(&instance)?;
            let profile = match (agent, entitled, constrained) {
                (Some(i), false, false) => single(compute_mms(&inst, i, budget)?),
                (Some(i), false, true) => single(compute_constrained_mms(&inst, i, budget)?),
                (Some(i), true, _) => single(compute_mms_hat(&inst, entitlements(&inst)?, i, budget)?),
                (None, false, false) => compute_profile(&inst, budget)?,
                (None, false, true) => compute_constrained_profile(&inst, budget)?,
                (None, true, _) => compute_hat_profile(&inst, entitlements(&inst)?, budget)?,
            };
            to_json(&profile)?
        }
        Command::DupGoods { instance, method, tau, max_retries } => {
            let inst = read_instance(&instance)?;
            let m = inst.m();
            let cfg = SamplerConfig { seed: cli.seed, max_retries, tau };
            let out = match method {
                GoodsMethod::Monotone => sample_monotone_goods(&inst, &compute_profile(&inst, budget)?, &cfg)?,
                GoodsMethod::Ordered => sample_ordered_goods(&inst, &compute_profile(&inst, budget)?, &cfg)?,
                GoodsMethod::Entitled => {
                    let ent = entitlements(&inst)?;
                    sample_entitled(&inst, ent, &compute_hat_profile(&inst, ent, budget)?, &cfg)?
                }
                GoodsMethod::Additive => {
                    let dup = duplicate_additive(&inst, budget)?;
                    mms_multialloc::goods::SampleOutcome {
                        alloc: dup.alloc,
                        retries: 0,
                        bounds: Bounds { linf_limit: 2, l1_limit: 2 * m },
                    }
                }
            };
            to_json(&alloc_json(&out.alloc, m, json!({"retries": out.retries, "bounds": out.bounds}))?)?
        }
        Command::DisposeChores { instance, method, alpha, max_retries } => {
            let inst = read_instance(&instance)?;
            let profile = compute_profile(&inst, budget)?;
            let cfg = ChoreConfig { seed: cli.seed, max_retries, alpha };
            let (alloc, retries, unassigned, delta_star, pre) = match method {
                ChoresMethod::Monotone => {
                    let o = sample_monotone_chores(&inst, &profile, &cfg)?;
                    (o.alloc, o.retries, o.unassigned, o.delta_star, o.preassigned_agents)
                }
                ChoresMethod::Ordered => {
                    let o = ordered_chores_pipeline(&inst, &profile, &cfg)?;
                    (o.alloc, o.retries, o.unassigned, o.delta_star, o.preassigned_agents)
                }
                ChoresMethod::Additive => {
                    let o = trim_additive_chores(&inst, &profile, budget)?;
                    (o.alloc, 0, o.unassigned, None, Vec::new())
                }
            };
            let extra = json!({
                "retries": retries,
                "unassigned": unassigned,
                "delta_star": delta_star,
                "preassigned_agents": pre,
            });
            to_json(&alloc_json(&alloc, inst.m(), extra)?)?
        }
        Command::Lowerbound { kind, n, m, seeds } => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let column = if matches!(kind, LbKind::Chores) { "min_l0" } else { "min_linf" };
            w.write_record(["seed", column])?;
            for k in 0..seeds {
                let seed = derive(cli.seed, k as u64);
                let value = match kind {
                    LbKind::Goods => min_linf_over_family(&gen_goods_lb_instance(n, m, LbFlavor::Threshold, seed)?.1, budget)?.0,
                    LbKind::Xos => min_linf_over_family(&gen_goods_lb_instance(n, m, LbFlavor::Xos, seed)?.1, budget)?.0,
                    LbKind::Chores => min_l0_over_family(&gen_chores_lb_instance(n, m, seed)?.1, budget)?.0,
                };
                w.write_record([seed.to_string(), value.to_string()])?;
            }
            String::from_utf8(w.into_inner()?)?
        }
        Command::Hardness { graph, k } => {
            let text = fs::read_to_string(&graph).with_context(|| format!("reading {}", graph.display()))?;
            let g = Graph::parse(&text)?;
            let reduction = hardness_reduce(&g, k)?;
            let mut doc: Value = serde_json::from_str(&serialize_instance(&reduction.instance))?;
            doc["disjoint_selection"] = json!(disjoint_selection_exists(&reduction.family, budget)?);
            doc["independent_set"] = json!(independent_set_exists(&g, k, budget)?);
            to_json(&doc)?
        }
        Command::Experiment { config } => {
            let text = fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
            let cfg: ExperimentConfig = serde_json::from_str(&text).context("parsing experiment config")?;
            let report = run_experiment(&cfg)?;
            for (cell, trial, msg) in &report.failures {
                eprintln!("cell {cell} trial {trial}: {msg}");
            }
            let mut buf = Vec::new();
            write_csv(&report.records, &mut buf)?;
            let out = cli.out.clone().or(cfg.output.map(PathBuf::from));
            return emit(&out, std::str::from_utf8(&buf)?);
        }
        Command::Gen { class, kind, n, m } => {
            let class = match class {
                ClassArg::Additive => InstanceClass::Additive,
                ClassArg::Ordered => InstanceClass::Ordered,
                ClassArg::Threshold => InstanceClass::Threshold,
                ClassArg::Table => InstanceClass::Table,
            };
            let kind = match kind {
                KindArg::Goods => ItemKind::Goods,
                KindArg::Chores => ItemKind::Chores,
            };
            serialize_instance(&gen_random_instance(class, kind, n, m, cli.seed)?) + "\n"
        }
    };
    emit(&cli.out, &text)
}

fn single(share: mms_multialloc::shares::AgentShare) -> MmsProfile {
    MmsProfile { mu: vec![share.mu], inducing: vec![share.partition] }
}

fn entitlements(inst: &Instance) -> anyhow::Result<&mms_multialloc::EntitlementVector> {
    match inst.entitlements() {
        Some(e) => Ok(e),
        None => bail!("the instance file has no \"entitlements\" field"),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<Error>() {
                Some(Error::BudgetExceeded { .. }) => ExitCode::from(2),
                Some(Error::RetriesExhausted { .. }) => ExitCode::from(3),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
