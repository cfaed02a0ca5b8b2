//! Acceptance gate: one line per criterion, nonzero exit if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::Rng;

use mms_multialloc::adversarial::{
    disjoint_selection_exists, gen_chores_lb_instance, gen_goods_lb_instance, hardness_reduce, independent_set_exists,
    min_l0_over_family, min_linf_over_family, visit_disjoint_selections, Graph, LbFlavor,
};
use mms_multialloc::chores::{
    monotone_l0_limit, preprocess_chores, redistribute_chores, sample_monotone_chores, trim_additive_chores, trim_count,
    ChoreConfig,
};
use mms_multialloc::goods::{
    default_tau, draw_blocks, duplicate_additive, entitled_l1_limit, entitled_linf_limit, monotone_linf_limit,
    ordered_l1_limit, redistribute_goods, sample_entitled, sample_monotone_goods, sample_ordered_goods_base,
    PrefixFamily, SamplerConfig,
};
use mms_multialloc::harness::{gen_entitlements, gen_random_instance, run_experiment, csv_string, ExperimentConfig, InstanceClass, Method, Overrides};
use mms_multialloc::rng::{derive, stream};
use mms_multialloc::shares::{compute_constrained_profile, compute_hat_profile, compute_mms};
use mms_multialloc::{
    compute_profile, verify_mms, Bundle, Instance, ItemKind, MultiAllocation, Transform, ValuationSpec, DEFAULT_BUDGET,
};

type Check = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($msg)+));
        }
    };
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>, what: &str) -> std::result::Result<T, String> {
    r.map_err(|e| format!("{what}: {e}"))
}

const CLASSES: [InstanceClass; 4] = [InstanceClass::Additive, InstanceClass::Ordered, InstanceClass::Threshold, InstanceClass::Table];

fn random_cell(seed: u64) -> (InstanceClass, usize, usize) {
    let mut rng = stream(seed);
    let class = CLASSES[rng.gen_range(0..4)];
    (class, rng.gen_range(2..=4), rng.gen_range(4..=10))
}

fn eval(inst: &Instance, i: usize, b: &Bundle) -> f64 {
    inst.eval(i, b).unwrap()
}

// 1
fn exact_shares() -> Check {
    let add_g = |w: Vec<Vec<f64>>| Instance::additive_goods(w).unwrap();
    let add_c = |w: Vec<Vec<f64>>| Instance::additive_chores(w).unwrap();
    let with = |kind, m, specs: Vec<ValuationSpec>| Instance::new(kind, m, specs, None).unwrap();
    let thr = |b: Vec<Vec<usize>>| ValuationSpec::PartitionThreshold { blocks: b };
    let desc8: Vec<f64> = (1..=8).rev().map(f64::from).collect();
    // hand-derived shares
    let golden: Vec<(&str, Instance, Vec<f64>)> = vec![
        ("goods [4,3,2,1] n=2", add_g(vec![vec![4.0, 3.0, 2.0, 1.0]; 2]), vec![5.0, 5.0]),
        ("chores [3,2,2,1] n=2", add_c(vec![vec![3.0, 2.0, 2.0, 1.0]; 2]), vec![4.0, 4.0]),
        ("single agent", add_g(vec![vec![2.0, 5.0, 1.0]]), vec![8.0]),
        ("fewer goods than agents", add_g(vec![vec![2.0, 5.0]; 3]), vec![0.0; 3]),
        ("six unit goods n=3", add_g(vec![vec![1.0; 6]; 3]), vec![2.0; 3]),
        ("six unit chores n=3", add_c(vec![vec![1.0; 6]; 3]), vec![2.0; 3]),
        ("mixed agents", add_g(vec![vec![4.0, 3.0, 2.0, 1.0], vec![1.0; 4]]), vec![5.0, 2.0]),
        (
            "crossing thresholds",
            with(ItemKind::Goods, 4, vec![thr(vec![vec![0, 1], vec![2, 3]]), thr(vec![vec![0, 2], vec![1, 3]])]),
            vec![1.0, 1.0],
        ),
        (
            "xos halves",
            with(ItemKind::Goods, 4, vec![ValuationSpec::XosPartition { blocks: vec![vec![0, 1], vec![2, 3]] }; 2]),
            vec![1.0, 1.0],
        ),
        (
            "sqrt of [4,3,2,1]",
            with(
                ItemKind::Goods,
                4,
                vec![ValuationSpec::Ordered { weights: vec![4.0, 3.0, 2.0, 1.0], transform: Transform::Sqrt }; 2],
            ),
            vec![5f64.sqrt(); 2],
        ),
        ("goods 8..1 n=3", add_g(vec![desc8.clone(); 3]), vec![12.0; 3]),
        ("chores 8..1 n=3", add_c(vec![desc8; 3]), vec![12.0; 3]),
    ];
    let mut slowest = Duration::ZERO;
    for (name, inst, want) in &golden {
        for (i, &w) in want.iter().enumerate() {
            let start = Instant::now();
            let got = ok(compute_mms(inst, i, DEFAULT_BUDGET), name)?;
            slowest = slowest.max(start.elapsed());
            ensure!((got.mu - w).abs() < 1e-9, "{name}: agent {i} share {} != {w}", got.mu);
            let naive = common::naive_share(inst, i, inst.n());
            ensure!((naive - w).abs() < 1e-9, "{name}: brute force gives {naive}, expected {w}");
            ensure!(got.partition.len() == inst.n(), "{name}: partition has {} blocks", got.partition.len());
            for b in &got.partition {
                let v = eval(inst, i, b);
                let meets = if inst.kind().is_goods() { v + 1e-9 >= w } else { v <= w + 1e-9 };
                ensure!(meets, "{name}: block {b:?} worth {v} misses {w}");
            }
        }
    }
    ensure!(slowest < Duration::from_secs(1), "slowest share took {slowest:?}");
    Ok(format!("{} instances, slowest share {:?}", golden.len(), slowest))
}

// 2
fn monotone_goods() -> Check {
    let mut terminated = 0;
    for t in 0..200u64 {
        let (class, n, m) = random_cell(derive(2, t));
        let inst = ok(gen_random_instance(class, ItemKind::Goods, n, m, derive(20, t)), "generate")?;
        let profile = ok(compute_profile(&inst, DEFAULT_BUDGET), "profile")?;
        match sample_monotone_goods(&inst, &profile, &SamplerConfig::new(t)) {
            Ok(out) => {
                terminated += 1;
                let chi = out.alloc.char_vector(m).unwrap();
                ensure!(verify_mms(&inst, &profile, &out.alloc).unwrap(), "trial {t}: not MMS");
                ensure!(chi.linf <= monotone_linf_limit(m) && chi.l1 <= m, "trial {t}: linf {} l1 {}", chi.linf, chi.l1);
            }
            Err(mms_multialloc::Error::RetriesExhausted { .. }) => {}
            Err(e) => return Err(format!("trial {t}: {e}")),
        }
    }
    ensure!(terminated >= 198, "only {terminated}/200 terminated");
    let mut worst = 0.0f64;
    for t in 0..5u64 {
        let (class, n, m) = random_cell(derive(21, t));
        let inst = gen_random_instance(class, ItemKind::Goods, n, m, derive(22, t)).unwrap();
        let profile = compute_profile(&inst, DEFAULT_BUDGET).unwrap();
        let mut rng = stream(derive(23, t));
        let mut sums = vec![0usize; m];
        let draws = 10_000;
        for _ in 0..draws {
            for b in draw_blocks(&profile.inducing, &mut rng).bundles {
                for &g in b.items() {
                    sums[g] += 1;
                }
            }
        }
        for s in sums {
            worst = worst.max((s as f64 / draws as f64 - 1.0).abs());
        }
    }
    ensure!(worst <= 0.05, "mean multiplicity off by {worst}");
    Ok(format!("{terminated}/200 terminated, max |mean chi_g - 1| = {worst:.4}"))
}

fn ordered_additive(n: usize, m: usize, seed: u64) -> Instance {
    let mut rng = stream(seed);
    let weights = (0..n)
        .map(|_| {
            let mut w: Vec<f64> = (0..m).map(|_| rng.gen_range(1..=100) as f64).collect();
            w.sort_by(|a, b| b.total_cmp(a));
            w
        })
        .collect();
    Instance::additive_goods(weights).unwrap()
}

// 3
fn ordered_goods() -> Check {
    let (n, m) = (4, 8);
    let tau = default_tau(m);
    let family = PrefixFamily::new(m);
    let factor = 6.0 * (m as f64).log2().sqrt();
    let mut runs = 0;
    let mut attempts = 0;
    for t in 0..100u64 {
        let inst = ordered_additive(n, m, derive(3, t));
        let profile = compute_profile(&inst, DEFAULT_BUDGET).unwrap();
        for s in 0..10u64 {
            let base = ok(sample_ordered_goods_base(&inst, &profile, &SamplerConfig::new(derive(t, s))), "base draw")?;
            attempts += base.retries + 1;
            let chi = base.alloc.char_vector(m).unwrap();
            ensure!(chi.l1 <= ordered_l1_limit(n, m), "l1 gate broken");
            for size in &family.sizes {
                let sum: usize = chi.counts[..*size].iter().sum();
                ensure!(sum as f64 <= factor * *size as f64 + 1e-9, "prefix {size} holds {sum}");
            }
            let out = ok(redistribute_goods(&base.alloc, &inst, tau), "redistribute")?;
            let after = out.alloc.char_vector(m).unwrap();
            ensure!(after.linf <= tau, "linf {} > tau {tau}", after.linf);
            ensure!(after.l1 == chi.l1, "l1 changed");
            for i in 0..n {
                ensure!(out.alloc.bundles[i].len() == base.alloc.bundles[i].len(), "bundle size changed");
                let (before, now) = (eval(&inst, i, &base.alloc.bundles[i]), eval(&inst, i, &out.alloc.bundles[i]));
                ensure!(now + 1e-9 >= before, "agent {i} lost value");
            }
            ensure!(verify_mms(&inst, &profile, &out.alloc).unwrap(), "not MMS");
            runs += 1;
        }
    }
    Ok(format!("{runs}/1000 runs, tau = {tau}, base acceptance rate {:.3}", runs as f64 / attempts as f64))
}

fn check_duplication(inst: &Instance, label: &str) -> std::result::Result<Duration, String> {
    let start = Instant::now();
    let out = ok(duplicate_additive(inst, DEFAULT_BUDGET), label)?;
    let elapsed = start.elapsed();
    let m = inst.m();
    let chi = out.alloc.char_vector(m).unwrap();
    let profile = compute_profile(inst, DEFAULT_BUDGET).unwrap();
    ensure!(chi.linf <= 2, "{label}: linf {}", chi.linf);
    if inst.n() > 1 {
        ensure!(chi.l1 == 2 * m, "{label}: l1 {} != {}", chi.l1, 2 * m);
        let tilde = compute_constrained_profile(inst, DEFAULT_BUDGET).unwrap();
        for i in 0..inst.n() {
            ensure!(tilde.mu[i] + 1e-9 >= 2.0 * profile.mu[i], "{label}: constrained share below twice the share");
        }
    }
    ensure!(verify_mms(inst, &profile, &out.alloc).unwrap(), "{label}: an agent is below its share");
    Ok(elapsed)
}

// 4
fn additive_duplication() -> Check {
    let mut count = 0;
    let mut slowest = Duration::ZERO;
    // every weight matrix in 0..=4 for these (n, max m); larger grids only with identical nonincreasing rows
    let full = [(1, 5), (2, 4), (3, 2)];
    let mut grids: Vec<(usize, usize, bool)> = Vec::new();
    for (n, top) in full {
        grids.extend((1..=top).map(|m| (n, m, false)));
    }
    grids.extend([(2, 5, true), (3, 3, true), (3, 4, true), (3, 5, true)]);
    for (n, m, identical) in grids {
        let mut failure = None;
        let len = if identical { m } else { n * m };
        common::odometer(&vec![5; len], |w| {
            if failure.is_some() || (identical && w.windows(2).any(|p| p[0] < p[1])) {
                return;
            }
            let weights: Vec<Vec<f64>> = if identical {
                vec![w.iter().map(|&x| x as f64).collect(); n]
            } else {
                w.chunks(m).map(|r| r.iter().map(|&x| x as f64).collect()).collect()
            };
            match check_duplication(&Instance::additive_goods(weights).unwrap(), &format!("n={n} {w:?}")) {
                Ok(d) => {
                    slowest = slowest.max(d);
                    count += 1;
                }
                Err(e) => failure = Some(e),
            }
        });
        if let Some(e) = failure {
            return Err(e);
        }
    }
    for t in 0..100u64 {
        let mut rng = stream(derive(4, t));
        let (n, m) = (rng.gen_range(1..=3), rng.gen_range(1..=5));
        let weights = (0..n).map(|_| (0..m).map(|_| rng.gen_range(0..=4) as f64).collect()).collect();
        slowest = slowest.max(check_duplication(&Instance::additive_goods(weights).unwrap(), &format!("random {t}"))?);
        count += 1;
    }
    ensure!(slowest < Duration::from_secs(10), "slowest instance took {slowest:?}");
    Ok(format!("{count} instances, slowest {slowest:?}"))
}

// 5
fn monotone_chores() -> Check {
    let mut done = 0;
    for t in 0..200u64 {
        let (class, n, m) = random_cell(derive(5, t));
        let inst = gen_random_instance(class, ItemKind::Chores, n, m, derive(50, t)).unwrap();
        let profile = compute_profile(&inst, DEFAULT_BUDGET).unwrap();
        let out = ok(sample_monotone_chores(&inst, &profile, &ChoreConfig::new(t)), &format!("trial {t}"))?;
        let chi = out.alloc.char_vector(m).unwrap();
        ensure!(verify_mms(&inst, &profile, &out.alloc).unwrap(), "trial {t}: cost above share");
        ensure!(chi.l0 <= monotone_l0_limit(n, m), "trial {t}: l0 {}", chi.l0);
        done += 1;
    }
    let mut worst = 0.0f64;
    for t in 0..5u64 {
        let (class, n, m) = random_cell(derive(51, t));
        let inst = gen_random_instance(class, ItemKind::Chores, n, m, derive(52, t)).unwrap();
        let profile = compute_profile(&inst, DEFAULT_BUDGET).unwrap();
        let mut rng = stream(derive(53, t));
        let draws = 10_000;
        let samples: Vec<f64> = (0..draws)
            .map(|_| draw_blocks(&profile.inducing, &mut rng).char_vector(m).unwrap().l0 as f64)
            .collect();
        let mean = samples.iter().sum::<f64>() / draws as f64;
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (draws - 1) as f64;
        let se = (var / draws as f64).sqrt();
        let expect = m as f64 * (1.0 - 1.0 / n as f64).powi(n as i32);
        ensure!((mean - expect).abs() <= 3.0 * se, "mean l0 {mean} vs {expect} (se {se})");
        worst = worst.max((mean - expect).abs() / se);
    }
    Ok(format!("{done}/200 accepted, worst deviation {worst:.2} standard errors"))
}

fn ordered_chores_instance(n: usize, m: usize, seed: u64) -> Instance {
    let mut rng = stream(seed);
    let specs = (0..n)
        .map(|_| {
            let mut w: Vec<f64> = (0..m).map(|_| rng.gen_range(1..=50) as f64).collect();
            w.sort_by(|a, b| b.total_cmp(a));
            ValuationSpec::Ordered { weights: w, transform: Transform::Identity }
        })
        .collect();
    Instance::new(ItemKind::Chores, m, specs, None).unwrap()
}

// 6
fn chore_components() -> Check {
    let mut bound_checks = 0;
    for t in 0..60u64 {
        let mut rng = stream(derive(6, t));
        let (n, m) = (rng.gen_range(2..=4), rng.gen_range(2..=9));
        let inst = ordered_chores_instance(n, m, derive(60, t));
        let profile = compute_profile(&inst, DEFAULT_BUDGET).unwrap();
        let lg = (m as f64).log2();
        for alpha in [0.5, 1.0, lg, 1.5 * lg, 2.0 * lg, 4.0 * lg] {
            let sub = ok(preprocess_chores(&inst, &profile, alpha), "preprocess")?;
            let mut covered = vec![false; m];
            for (i, b) in sub.pre_bundles.iter().enumerate() {
                if let Some(b) = b {
                    ensure!(eval(&inst, i, b) <= profile.mu[i] + 1e-9, "removed agent {i} over its share");
                    for &g in b.items() {
                        ensure!(!covered[g], "pre-bundles overlap");
                        covered[g] = true;
                    }
                }
            }
            let assigned = covered.iter().filter(|&&c| c).count();
            ensure!(assigned + sub.remaining_chores.len() == m, "chores lost");
            if alpha >= lg && !sub.remaining_chores.is_empty() {
                ensure!(
                    sub.remaining_agents.len() as f64 + 1e-9 >= n as f64 * (1.0 - lg / alpha),
                    "too few agents left"
                );
                bound_checks += 1;
            }
        }
    }
    let mut inputs = 0;
    let mut t = 0u64;
    while inputs < 1000 {
        t += 1;
        let mut rng = stream(derive(61, t));
        let (n, m) = (rng.gen_range(1..=5), rng.gen_range(1..=10));
        let inst = ordered_chores_instance(n, m, derive(62, t));
        let order: Vec<usize> = (0..m).filter(|_| rng.gen_bool(0.8)).collect();
        let bundles: Vec<Bundle> = (0..n)
            .map(|_| Bundle::new(order.iter().copied().filter(|_| rng.gen_bool(0.35)).collect(), m).unwrap())
            .collect();
        let q = MultiAllocation::new(bundles);
        let counts = q.char_vector(m).unwrap().counts;
        let chi: Vec<usize> = order.iter().map(|&g| counts[g]).collect();
        let delta = common::naive_deficit(&chi);
        let out = ok(redistribute_chores(&q, &inst, &order, delta), "redistribute")?;
        let after = out.alloc.char_vector(m).unwrap().counts;
        let l0 = order.iter().filter(|&&g| after[g] == 0).count();
        ensure!(l0 <= delta, "l0 {l0} > delta {delta}");
        for i in 0..n {
            ensure!(out.alloc.bundles[i].len() == q.bundles[i].len(), "bundle size changed");
            ensure!(eval(&inst, i, &out.alloc.bundles[i]) <= eval(&inst, i, &q.bundles[i]) + 1e-9, "cost rose");
        }
        inputs += 1;
    }
    Ok(format!("{bound_checks} agent-count bounds, {inputs} redistributions; large-m disposal bound not asserted (vacuous for m <= 10)"))
}

// 7
fn trimming() -> Check {
    let mut count = 0;
    let mut worst = 0.0f64;
    let mut run = |inst: &Instance, label: &str| -> std::result::Result<(), String> {
        let profile = compute_profile(inst, DEFAULT_BUDGET).unwrap();
        let out = ok(trim_additive_chores(inst, &profile, DEFAULT_BUDGET), label)?;
        ensure!(out.ratio <= 11.0 / 9.0 + 1e-9, "{label}: ratio {}", out.ratio);
        ensure!(verify_mms(inst, &profile, &out.alloc).unwrap(), "{label}: cost above share");
        let expected: usize = out.oracle.iter().map(|b| trim_count(b.len())).sum();
        let l0 = out.alloc.char_vector(inst.m()).unwrap().l0;
        ensure!(l0 == expected, "{label}: l0 {l0} != {expected}");
        ensure!(l0 as f64 <= 2.0 * inst.m() as f64 / 11.0 + inst.n() as f64, "{label}: l0 {l0} too large");
        worst = worst.max(out.ratio);
        count += 1;
        Ok(())
    };
    for m in 1..=4 {
        let mut failure = None;
        common::odometer(&vec![3; 2 * m], |w| {
            if failure.is_none() {
                let costs = vec![w[..m].iter().map(|&x| x as f64 + 1.0).collect(), w[m..].iter().map(|&x| x as f64 + 1.0).collect()];
                failure = run(&Instance::additive_chores(costs).unwrap(), &format!("{w:?}")).err();
            }
        });
        if let Some(e) = failure {
            return Err(e);
        }
    }
    for t in 0..200u64 {
        let mut rng = stream(derive(7, t));
        let (n, m) = (rng.gen_range(1..=3), rng.gen_range(1..=7));
        let costs = (0..n).map(|_| (0..m).map(|_| rng.gen_range(1..=20) as f64).collect()).collect();
        run(&Instance::additive_chores(costs).unwrap(), &format!("random {t}"))?;
    }
    Ok(format!("{count} instances, worst oracle ratio {worst:.4}"))
}

// 8
fn lower_bounds() -> Check {
    let mut checked = 0;
    for t in 0..30u64 {
        let mut rng = stream(derive(8, t));
        let n = rng.gen_range(2..=3);
        let m = rng.gen_range(n..=7);
        for flavor in [LbFlavor::Threshold, LbFlavor::Xos] {
            let (inst, family) = gen_goods_lb_instance(n, m, flavor, t).unwrap();
            let profile = compute_profile(&inst, DEFAULT_BUDGET).unwrap();
            ensure!(profile.mu.iter().all(|&x| x == 1.0), "goods share {:?}", profile.mu);
            let (linf, choice) = min_linf_over_family(&family, DEFAULT_BUDGET).unwrap();
            ensure!(linf == common::naive_family_minima(&family).0, "min linf disagrees");
            ensure!(verify_mms(&inst, &profile, &family.select(&choice)).unwrap(), "selection not MMS");
        }
        let (inst, family) = gen_chores_lb_instance(n, m, t).unwrap();
        let profile = compute_profile(&inst, DEFAULT_BUDGET).unwrap();
        ensure!(profile.mu.iter().all(|&x| x == 0.0), "chores share {:?}", profile.mu);
        ensure!(min_l0_over_family(&family, DEFAULT_BUDGET).unwrap().0 == common::naive_family_minima(&family).1, "min l0 disagrees");
        checked += 1;
    }
    let mut linf_hist = std::collections::BTreeMap::new();
    let mut l0_mean = 0.0;
    for seed in 0..100u64 {
        let (_, family) = gen_goods_lb_instance(4, 64, LbFlavor::Threshold, seed).unwrap();
        let v = min_linf_over_family(&family, DEFAULT_BUDGET).unwrap().0;
        ensure!(v >= 1, "min linf {v}");
        *linf_hist.entry(v).or_insert(0) += 1;
        let (_, family) = gen_chores_lb_instance(4, 64, seed).unwrap();
        l0_mean += min_l0_over_family(&family, DEFAULT_BUDGET).unwrap().0 as f64 / 64.0 / 100.0;
    }
    Ok(format!(
        "{checked} seeds checked; n=4 m=64: min linf histogram {linf_hist:?}, mean min l0/m {l0_mean:.3} vs 0.316 (reported only)"
    ))
}

fn graphs_on(v: usize) -> Vec<Graph> {
    let pairs: Vec<(usize, usize)> = (0..v).flat_map(|a| (a + 1..v).map(move |b| (a, b))).collect();
    (0..1u64 << pairs.len())
        .map(|mask| Graph::new(v, pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect()).unwrap())
        .collect()
}

fn reduction_agrees(g: &Graph, k: usize) -> std::result::Result<(), String> {
    let r = hardness_reduce(g, k).unwrap();
    let want = independent_set_exists(g, k, DEFAULT_BUDGET).unwrap();
    let got = disjoint_selection_exists(&r.family, DEFAULT_BUDGET).unwrap();
    ensure!(want == got, "graph {:?} k={k}: independent set {want}, disjoint selection {got}", g.edges());
    let v = g.vertex_count();
    if v + 1 - k > 1 {
        let mut bad = false;
        visit_disjoint_selections(&r.family, DEFAULT_BUDGET, |choice| {
            bad |= choice[..k].contains(&v);
            !bad
        })
        .unwrap();
        ensure!(!bad, "graph {:?} k={k}: a vertex agent takes its remainder block", g.edges());
    }
    Ok(())
}

// 9
fn hardness() -> Check {
    let start = Instant::now();
    let mut cases = 0;
    for v in 2..=5 {
        for g in graphs_on(v) {
            for k in 2..=v {
                reduction_agrees(&g, k)?;
                cases += 1;
            }
        }
    }
    let all6 = graphs_on(6);
    let mut rng = stream(9);
    for _ in 0..200 {
        let g = &all6[rng.gen_range(0..all6.len())];
        for k in 2..=6 {
            reduction_agrees(g, k)?;
            cases += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    Ok(format!("{cases} (graph, k) pairs in {elapsed:.1?}"))
}

// 10
fn entitlements() -> Check {
    let mut rng = stream(10);
    let mut worst = 0.0f64;
    for t in 0..100_000 {
        let n = rng.gen_range(1..=12);
        let ent = if t % 2 == 0 {
            gen_entitlements(n, &mut rng)
        } else {
            // spiky weights reach the small-b regime
            let raw: Vec<f64> = (0..n).map(|_| rng.gen::<f64>().powi(4) + 1e-6).collect();
            let total: f64 = raw.iter().sum();
            let mut b: Vec<f64> = raw.iter().map(|x| x / total).collect();
            b.sort_by(|x, y| y.total_cmp(x));
            b[0] += 1.0 - b.iter().sum::<f64>();
            match mms_multialloc::EntitlementVector::new(b) {
                Ok(e) => e,
                Err(_) => continue,
            }
        };
        let s: f64 = ent.block_counts().iter().map(|&k| 1.0 / k as f64).sum();
        worst = worst.max(s);
    }
    ensure!(worst <= 1.7 + 1e-9, "sum of 1/n_i reached {worst}");
    let mut done = 0;
    for t in 0..200u64 {
        let mut r = stream(derive(100, t));
        let (class, n, m) = (CLASSES[r.gen_range(0..4)], r.gen_range(2..=3), r.gen_range(4..=8));
        let inst = gen_random_instance(class, ItemKind::Goods, n, m, derive(101, t)).unwrap();
        let ent = gen_entitlements(n, &mut r);
        let profile = ok(compute_hat_profile(&inst, &ent, DEFAULT_BUDGET), "hat profile")?;
        let out = ok(sample_entitled(&inst, &ent, &profile, &SamplerConfig::new(t)), &format!("trial {t}"))?;
        let chi = out.alloc.char_vector(m).unwrap();
        for i in 0..n {
            ensure!(eval(&inst, i, &out.alloc.bundles[i]) + 1e-9 >= profile.mu[i], "trial {t}: agent {i} below share");
        }
        ensure!(chi.linf <= entitled_linf_limit(m) && chi.l1 <= entitled_l1_limit(m), "trial {t}: gates broken");
        done += 1;
    }
    Ok(format!("max sum 1/n_i = {worst:.4} over 1e5 vectors; {done}/200 entitled draws"))
}

fn alloc_jsons() -> Vec<String> {
    let mut docs = Vec::new();
    for t in 0..6u64 {
        let inst = ordered_additive(3, 6, derive(110, t));
        let profile = compute_profile(&inst, DEFAULT_BUDGET).unwrap();
        let cfg = SamplerConfig::new(t);
        let a = sample_monotone_goods(&inst, &profile, &cfg).unwrap().alloc;
        let b = mms_multialloc::goods::sample_ordered_goods(&inst, &profile, &cfg).unwrap().alloc;
        let c = duplicate_additive(&inst, DEFAULT_BUDGET).unwrap().alloc;
        for alloc in [a, b, c] {
            let doc = mms_multialloc::format::AllocationDoc::new(&alloc, 6).unwrap();
            docs.push(serde_json::to_string(&doc).unwrap());
        }
    }
    docs
}

// 11
fn determinism() -> Check {
    let cfg = ExperimentConfig {
        master_seed: 2024,
        trials: 4,
        n: vec![2, 3],
        m: vec![5],
        classes: vec![InstanceClass::Additive, InstanceClass::Ordered, InstanceClass::Threshold],
        methods: vec![
            Method::MonotoneGoods,
            Method::OrderedGoods,
            Method::AdditiveGoods,
            Method::EntitledGoods,
            Method::MonotoneChores,
            Method::OrderedChores,
            Method::AdditiveChores,
        ],
        overrides: Overrides::default(),
        budget: DEFAULT_BUDGET,
        timing: false,
        output: None,
    };
    let pool = |threads| rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    let csv = |threads| pool(threads).install(|| csv_string(&run_experiment(&cfg).unwrap().records).unwrap());
    let (one, four, again) = (csv(1), csv(4), csv(4));
    ensure!(one == four && four == again, "experiment CSV differs between runs");
    let (j1, j4) = (pool(1).install(alloc_jsons), pool(4).install(alloc_jsons));
    ensure!(j1 == j4 && j4 == alloc_jsons(), "allocation JSON differs between runs");
    Ok(format!("{} CSV rows and {} allocation documents identical across 1 and 4 threads", one.lines().count() - 1, j1.len()))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("exact share oracle", exact_shares),
        ("monotone goods sampler", monotone_goods),
        ("ordered goods with copy redistribution", ordered_goods),
        ("additive goods duplicated at most twice", additive_duplication),
        ("monotone chores sampler", monotone_chores),
        ("chore pre-processing and redistribution", chore_components),
        ("additive chores trimming", trimming),
        ("lower-bound instances", lower_bounds),
        ("independent set reduction", hardness),
        ("entitlements", entitlements),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {:>2} PASS  {name} ({secs:.2}s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} ({secs:.2}s): {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
