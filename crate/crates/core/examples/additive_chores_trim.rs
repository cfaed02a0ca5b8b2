//! Best min-max-ratio allocation, trimmed until every agent is within its share.

use mms_multialloc::chores::trim_additive_chores;
use mms_multialloc::{compute_profile, Instance, DEFAULT_BUDGET};

fn main() -> mms_multialloc::Result<()> {
    let inst = Instance::additive_chores(vec![
        vec![5.0, 4.0, 4.0, 3.0, 2.0, 2.0, 1.0],
        vec![2.0, 6.0, 1.0, 3.0, 3.0, 2.0, 2.0],
    ])?;
    let profile = compute_profile(&inst, DEFAULT_BUDGET)?;
    let out = trim_additive_chores(&inst, &profile, DEFAULT_BUDGET)?;
    println!("oracle {:?}, ratio {:.3}", out.oracle, out.ratio);
    for (i, b) in out.alloc.bundles.iter().enumerate() {
        println!("agent {i}: {:?} cost {} (share {})", b.items(), inst.eval(i, b)?, profile.mu[i]);
    }
    println!("removed {:?}, unassigned {:?}", out.removed, out.unassigned);
    Ok(())
}
