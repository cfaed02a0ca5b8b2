//! Brute-force reference implementations shared by the integration tests.
//! They walk every assignment or selection with a plain odometer and use only
//! the public evaluation API, so they share no search code with the library.
#![allow(dead_code)]

use mms_multialloc::adversarial::SelectionFamily;
use mms_multialloc::{Bundle, Instance, MultiAllocation};

/// Calls `f` on every vector in `0..base` of length `len`, in lexicographic order.
pub fn odometer(base: &[usize], mut f: impl FnMut(&[usize])) {
    if base.contains(&0) {
        return;
    }
    let mut digits = vec![0usize; base.len()];
    loop {
        f(&digits);
        let mut pos = base.len();
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < base[pos] {
                break;
            }
            digits[pos] = 0;
        }
    }
}

pub fn blocks_of(assign: &[usize], k: usize) -> Vec<Bundle> {
    let mut blocks = vec![Vec::new(); k];
    for (g, &j) in assign.iter().enumerate() {
        blocks[j].push(g);
    }
    blocks.into_iter().map(|b| Bundle::new(b, assign.len()).unwrap()).collect()
}

/// Max-min (goods) or min-max (chores) of agent `i` over all `k`-block assignments.
pub fn naive_share(instance: &Instance, i: usize, k: usize) -> f64 {
    let m = instance.m();
    let goods = instance.kind().is_goods();
    let mut best = if goods { f64::NEG_INFINITY } else { f64::INFINITY };
    odometer(&vec![k; m], |assign| {
        let vals = blocks_of(assign, k).iter().map(|b| instance.eval(i, b).unwrap()).collect::<Vec<_>>();
        if goods {
            best = best.max(vals.iter().cloned().fold(f64::INFINITY, f64::min));
        } else {
            best = best.min(vals.iter().cloned().fold(0.0, f64::max));
        }
    });
    best
}

/// Largest `|S| - sum(chi over S)` over all windows, floored at 0.
pub fn naive_deficit(chi: &[usize]) -> usize {
    let mut best = 0i64;
    for l in 0..chi.len() {
        for r in l + 1..=chi.len() {
            best = best.max((r - l) as i64 - chi[l..r].iter().sum::<usize>() as i64);
        }
    }
    best as usize
}

fn counts(alloc: &MultiAllocation, m: usize) -> Vec<usize> {
    let mut c = vec![0; m];
    for b in &alloc.bundles {
        for &g in b.items() {
            c[g] += 1;
        }
    }
    c
}

/// `(min linf, min l0)` over every selection of the family.
pub fn naive_family_minima(family: &SelectionFamily) -> (usize, usize) {
    let sizes: Vec<usize> = family.partitions.iter().map(Vec::len).collect();
    let (mut linf, mut l0) = (usize::MAX, usize::MAX);
    odometer(&sizes, |choice| {
        let c = counts(&family.select(choice), family.m);
        linf = linf.min(c.iter().copied().max().unwrap_or(0));
        l0 = l0.min(c.iter().filter(|&&x| x == 0).count());
    });
    (linf, l0)
}

/// Whether some selection has pairwise disjoint blocks, by full enumeration.
pub fn naive_disjoint(family: &SelectionFamily) -> bool {
    let sizes: Vec<usize> = family.partitions.iter().map(Vec::len).collect();
    let mut found = false;
    odometer(&sizes, |choice| {
        if !found {
            found = counts(&family.select(choice), family.m).iter().all(|&c| c <= 1);
        }
    });
    found
}
