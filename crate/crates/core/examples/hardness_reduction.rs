//! Independent set of size k as a disjoint block selection.

use mms_multialloc::adversarial::{disjoint_selection_exists, hardness_reduce, independent_set_exists, Graph};
use mms_multialloc::DEFAULT_BUDGET;

fn main() -> mms_multialloc::Result<()> {
    let cycle = Graph::parse("5 5\n0 1\n1 2\n2 3\n3 4\n4 0\n")?;
    for k in 2..=3 {
        let r = hardness_reduce(&cycle, k)?;
        println!(
            "C5, k = {k}: {} agents, {} items, disjoint selection {}, independent set {}",
            r.instance.n(),
            r.instance.m(),
            disjoint_selection_exists(&r.family, DEFAULT_BUDGET)?,
            independent_set_exists(&cycle, k, DEFAULT_BUDGET)?
        );
    }
    Ok(())
}
