//! Lower-bound instances built from random partitions, and a reduction from
//! independent set to picking pairwise disjoint blocks.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::alloc::{Bundle, MultiAllocation};
use crate::error::{Error, Result};
use crate::instance::{Instance, ItemKind, ValuationSpec};
use crate::rng::stream;

/// One partition of `0..m` per agent; a selection picks one block from each.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionFamily {
    pub m: usize,
    pub partitions: Vec<Vec<Bundle>>,
}

impl SelectionFamily {
    /// Checks that every partition's blocks are disjoint and cover `0..m`.
    pub fn new(m: usize, partitions: Vec<Vec<Bundle>>) -> Result<Self> {
        for (i, p) in partitions.iter().enumerate() {
            let mut seen = vec![false; m];
            for g in p.iter().flat_map(|b| b.items().iter().copied()) {
                if g >= m || seen[g] {
                    return Err(Error::InvalidInstance(format!("partition {i} repeats or exceeds item {g}")));
                }
                seen[g] = true;
            }
            if let Some(g) = seen.iter().position(|s| !s) {
                return Err(Error::InvalidInstance(format!("partition {i} misses item {g}")));
            }
        }
        Ok(Self { m, partitions })
    }

    pub fn n(&self) -> usize {
        self.partitions.len()
    }

    /// Number of selections, as a float to survive overflow.
    pub fn size(&self) -> f64 {
        self.partitions.iter().map(|p| p.len() as f64).product()
    }

    pub fn select(&self, choice: &[usize]) -> MultiAllocation {
        MultiAllocation::new(self.partitions.iter().zip(choice).map(|(p, &j)| p[j].clone()).collect())
    }

    fn check_budget(&self, budget: u64) -> Result<()> {
        let states = self.size();
        if states > budget as f64 {
            return Err(Error::BudgetExceeded { states, budget });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LbFlavor {
    Threshold,
    Xos,
}

/// Ordered `n`-partition with every item in a uniform block, redrawn until no block is empty.
pub(crate) fn random_partition<R: Rng>(n: usize, m: usize, rng: &mut R) -> Vec<Bundle> {
    loop {
        let mut blocks = vec![Vec::new(); n];
        for g in 0..m {
            blocks[rng.gen_range(0..n)].push(g);
        }
        if blocks.iter().all(|b| !b.is_empty()) {
            return blocks.into_iter().map(Bundle::from_sorted_unchecked).collect();
        }
    }
}

fn random_family(n: usize, m: usize, seed: u64) -> Result<SelectionFamily> {
    if n < 2 || m < n {
        return Err(Error::InvalidInstance(format!("lower-bound instances need n >= 2 and m >= n, got n = {n}, m = {m}")));
    }
    let mut rng = stream(seed);
    let partitions = (0..n).map(|_| random_partition(n, m, &mut rng)).collect();
    Ok(SelectionFamily { m, partitions })
}

fn raw_blocks(p: &[Bundle]) -> Vec<Vec<usize>> {
    p.iter().map(|b| b.items().to_vec()).collect()
}

/// Goods instance where agent `i` values a bundle by how much of a block of
/// its random partition it contains. Every share equals 1.
pub fn gen_goods_lb_instance(n: usize, m: usize, flavor: LbFlavor, seed: u64) -> Result<(Instance, SelectionFamily)> {
    let family = random_family(n, m, seed)?;
    let agents = family
        .partitions
        .iter()
        .map(|p| match flavor {
            LbFlavor::Threshold => ValuationSpec::PartitionThreshold { blocks: raw_blocks(p) },
            LbFlavor::Xos => ValuationSpec::XosPartition { blocks: raw_blocks(p) },
        })
        .collect();
    Ok((Instance::new(ItemKind::Goods, m, agents, None)?, family))
}

/// Chores instance where a bundle is free iff it fits inside one block of the
/// agent's random partition. Every share equals 0.
pub fn gen_chores_lb_instance(n: usize, m: usize, seed: u64) -> Result<(Instance, SelectionFamily)> {
    let family = random_family(n, m, seed)?;
    let agents = family
        .partitions
        .iter()
        .map(|p| ValuationSpec::PartitionSubset { blocks: raw_blocks(p) })
        .collect();
    Ok((Instance::new(ItemKind::Chores, m, agents, None)?, family))
}

struct MinSearch<'a> {
    family: &'a SelectionFamily,
    counts: Vec<usize>,
    choice: Vec<usize>,
    best: usize,
    best_choice: Vec<usize>,
}

impl MinSearch<'_> {
    fn linf(&mut self, i: usize, cur: usize) {
        if cur >= self.best {
            return;
        }
        if i == self.family.n() {
            self.best = cur;
            self.best_choice = self.choice.clone();
            return;
        }
        for (j, block) in self.family.partitions[i].iter().enumerate() {
            let mut next = cur;
            for &g in block.items() {
                self.counts[g] += 1;
                next = next.max(self.counts[g]);
            }
            self.choice[i] = j;
            self.linf(i + 1, next);
            for &g in block.items() {
                self.counts[g] -= 1;
            }
        }
    }

    /// `zeros` can drop by at most the largest block of each agent still to choose.
    fn l0(&mut self, i: usize, zeros: usize, reach: &[usize]) {
        if zeros.saturating_sub(reach[i]) >= self.best {
            return;
        }
        if i == self.family.n() {
            self.best = zeros;
            self.best_choice = self.choice.clone();
            return;
        }
        for (j, block) in self.family.partitions[i].iter().enumerate() {
            let mut next = zeros;
            for &g in block.items() {
                if self.counts[g] == 0 {
                    next -= 1;
                }
                self.counts[g] += 1;
            }
            self.choice[i] = j;
            self.l0(i + 1, next, reach);
            for &g in block.items() {
                self.counts[g] -= 1;
            }
        }
    }
}

fn min_search(family: &SelectionFamily) -> MinSearch<'_> {
    MinSearch {
        family,
        counts: vec![0; family.m],
        choice: vec![0; family.n()],
        best: usize::MAX,
        best_choice: Vec::new(),
    }
}

/// Smallest maximum multiplicity over all selections, with the first selection attaining it.
pub fn min_linf_over_family(family: &SelectionFamily, budget: u64) -> Result<(usize, Vec<usize>)> {
    family.check_budget(budget)?;
    let mut s = min_search(family);
    s.linf(0, 0);
    Ok((s.best, s.best_choice))
}

/// Fewest uncovered items over all selections, with the first selection attaining it.
pub fn min_l0_over_family(family: &SelectionFamily, budget: u64) -> Result<(usize, Vec<usize>)> {
    family.check_budget(budget)?;
    let mut reach = vec![0; family.n() + 1];
    for i in (0..family.n()).rev() {
        reach[i] = reach[i + 1] + family.partitions[i].iter().map(Bundle::len).max().unwrap_or(0);
    }
    let mut s = min_search(family);
    s.l0(0, family.m, &reach);
    Ok((s.best, s.best_choice))
}

/// Simple undirected graph on vertices `0..v`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    v: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Stores each edge as `(min, max)`; rejects loops, repeats and out-of-range endpoints.
    pub fn new(v: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut norm = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            if a >= v || b >= v {
                return Err(Error::InvalidGraph(format!("edge ({a}, {b}) has an endpoint outside 0..{v}")));
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {a}")));
            }
            let e = (a.min(b), a.max(b));
            if norm.contains(&e) {
                return Err(Error::InvalidGraph(format!("edge ({}, {}) listed twice", e.0, e.1)));
            }
            norm.push(e);
        }
        Ok(Self { v, edges: norm })
    }

    /// First line `V E`, then `E` lines `u v` with 0-based vertices.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let pair = |no: usize, line: &str| -> Result<(usize, usize)> {
            let nums: Vec<usize> = line
                .split_whitespace()
                .map(|t| t.parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse { location: format!("line {}", no + 1), message: e.to_string() })?;
            match nums[..] {
                [a, b] => Ok((a, b)),
                _ => Err(Error::Parse { location: format!("line {}", no + 1), message: "expected two integers".into() }),
            }
        };
        let (no, header) = lines.next().ok_or(Error::Parse { location: "line 1".into(), message: "empty graph file".into() })?;
        let (v, e) = pair(no, header)?;
        let edges = lines.map(|(no, l)| pair(no, l)).collect::<Result<Vec<_>>>()?;
        if edges.len() != e {
            return Err(Error::Parse { location: "line 1".into(), message: format!("header announces {e} edges, found {}", edges.len()) });
        }
        Self::new(v, edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.v
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }
}

/// Output of [`hardness_reduce`]. Agents `0..k` choose a vertex block or the
/// remainder; agents `k..=|V|` choose a vertex token or all pair goods.
#[derive(Debug, Clone, PartialEq)]
pub struct Reduction {
    pub k: usize,
    pub instance: Instance,
    pub family: SelectionFamily,
    /// Pair goods as `((i, u), (j, v))`, in item order; vertex tokens follow.
    pub pairs: Vec<((usize, usize), (usize, usize))>,
}

/// Pair goods: `{(i,u),(j,u)}` for every vertex and `i < j`, then `{(i,u),(j,v)}`
/// for every edge `u < v` and every ordered `i != j`.
fn pair_goods(graph: &Graph, k: usize) -> Vec<((usize, usize), (usize, usize))> {
    let mut pairs = Vec::new();
    for u in 0..graph.v {
        for i in 0..k {
            for j in i + 1..k {
                pairs.push(((i, u), (j, u)));
            }
        }
    }
    for &(u, v) in &graph.edges {
        for i in 0..k {
            for j in (0..k).filter(|&j| j != i) {
                pairs.push(((i, u), (j, v)));
            }
        }
    }
    pairs
}

/// Selection instance with `|V| + 1` agents that admits pairwise disjoint
/// picks iff `graph` has an independent set of size `k`.
pub fn hardness_reduce(graph: &Graph, k: usize) -> Result<Reduction> {
    let nv = graph.v;
    if k < 2 || k > nv {
        return Err(Error::InvalidGraph(format!("k = {k} must lie in 2..={nv}")));
    }
    let pairs = pair_goods(graph, k);
    let p = pairs.len();
    let m = p + nv;
    let mut partitions = Vec::with_capacity(nv + 1);
    for i in 0..k {
        let mut blocks = vec![Vec::new(); nv + 1];
        for (s, &(a, b)) in pairs.iter().enumerate() {
            match [a, b].iter().find(|t| t.0 == i) {
                Some(&(_, u)) => blocks[u].push(s),
                None => blocks[nv].push(s),
            }
        }
        blocks[nv].extend(p..m);
        partitions.push(blocks.into_iter().map(Bundle::from_sorted_unchecked).collect());
    }
    for _ in k..=nv {
        let mut blocks: Vec<Bundle> = (0..nv).map(|u| Bundle::from_sorted_unchecked(vec![p + u])).collect();
        blocks.push(Bundle::from_sorted_unchecked((0..p).collect()));
        partitions.push(blocks);
    }
    let family = SelectionFamily::new(m, partitions)?;
    let agents = family
        .partitions
        .iter()
        .map(|blocks| ValuationSpec::PartitionThreshold {
            blocks: blocks.iter().filter(|b| !b.is_empty()).map(|b| b.items().to_vec()).collect(),
        })
        .collect();
    let instance = Instance::new(ItemKind::Goods, m, agents, None)?;
    Ok(Reduction { k, instance, family, pairs })
}

fn bitset(block: &Bundle, words: usize) -> Vec<u64> {
    let mut bits = vec![0u64; words];
    for &g in block.items() {
        bits[g / 64] |= 1 << (g % 64);
    }
    bits
}

/// Calls `visit` on every selection whose blocks are pairwise disjoint, in
/// lexicographic order, until it returns `false`.
pub fn visit_disjoint_selections(
    family: &SelectionFamily,
    budget: u64,
    mut visit: impl FnMut(&[usize]) -> bool,
) -> Result<()> {
    family.check_budget(budget)?;
    let words = family.m.div_ceil(64).max(1);
    let sets: Vec<Vec<Vec<u64>>> = family
        .partitions
        .iter()
        .map(|p| p.iter().map(|b| bitset(b, words)).collect())
        .collect();
    fn go(
        sets: &[Vec<Vec<u64>>],
        i: usize,
        used: &mut Vec<u64>,
        choice: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        if i == sets.len() {
            return visit(choice);
        }
        for (j, bits) in sets[i].iter().enumerate() {
            if bits.iter().zip(used.iter()).any(|(a, b)| a & b != 0) {
                continue;
            }
            for (u, b) in used.iter_mut().zip(bits) {
                *u |= b;
            }
            choice.push(j);
            let keep_going = go(sets, i + 1, used, choice, visit);
            choice.pop();
            for (u, b) in used.iter_mut().zip(bits) {
                *u &= !b;
            }
            if !keep_going {
                return false;
            }
        }
        true
    }
    go(&sets, 0, &mut vec![0; words], &mut Vec::new(), &mut visit);
    Ok(())
}

/// Some selection assigns every item at most once.
pub fn disjoint_selection_exists(family: &SelectionFamily, budget: u64) -> Result<bool> {
    let mut found = false;
    visit_disjoint_selections(family, budget, |_| {
        found = true;
        false
    })?;
    Ok(found)
}

/// Some `k` vertices are pairwise non-adjacent.
pub fn independent_set_exists(graph: &Graph, k: usize, budget: u64) -> Result<bool> {
    let nv = graph.v;
    if k > nv {
        return Ok(false);
    }
    let combos = (0..k).fold(1f64, |acc, t| acc * (nv - t) as f64 / (t + 1) as f64);
    if combos > budget as f64 {
        return Err(Error::BudgetExceeded { states: combos, budget });
    }
    fn go(graph: &Graph, start: usize, left: usize, picked: &mut Vec<usize>) -> bool {
        if left == 0 {
            return true;
        }
        for u in start..graph.v {
            if picked.iter().all(|&w| !graph.has_edge(u, w)) {
                picked.push(u);
                if go(graph, u + 1, left - 1, picked) {
                    return true;
                }
                picked.pop();
            }
        }
        false
    }
    Ok(go(graph, 0, k, &mut Vec::new()))
}

/// `|V| C(k,2) + 2 |E| C(k,2) + |V|`: each edge contributes pair goods for
/// both orientations.
pub fn reduction_item_count(v: usize, e: usize, k: usize) -> usize {
    let c = k * (k - 1) / 2;
    v * c + 2 * e * c + v
}
