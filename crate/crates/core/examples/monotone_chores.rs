//! Chores drawn block by block; leftovers are disposed.

use mms_multialloc::chores::{monotone_l0_limit, sample_monotone_chores, ChoreConfig};
use mms_multialloc::harness::{gen_random_instance, InstanceClass};
use mms_multialloc::{compute_profile, ItemKind, DEFAULT_BUDGET};

fn main() -> mms_multialloc::Result<()> {
    let (n, m) = (3, 9);
    let inst = gen_random_instance(InstanceClass::Additive, ItemKind::Chores, n, m, 4)?;
    let profile = compute_profile(&inst, DEFAULT_BUDGET)?;
    let out = sample_monotone_chores(&inst, &profile, &ChoreConfig::new(2))?;
    for (i, b) in out.alloc.bundles.iter().enumerate() {
        println!("agent {i}: {:?} cost {} (share {})", b.items(), inst.eval(i, b)?, profile.mu[i]);
    }
    println!("unassigned {:?} (at most {})", out.unassigned, monotone_l0_limit(n, m));
    Ok(())
}
