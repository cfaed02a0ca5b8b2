//! Additive goods where every good goes to at most two agents.

use mms_multialloc::goods::duplicate_additive;
use mms_multialloc::{compute_profile, Instance, DEFAULT_BUDGET};

fn main() -> mms_multialloc::Result<()> {
    let inst = Instance::additive_goods(vec![
        vec![4.0, 3.0, 2.0, 2.0, 1.0],
        vec![1.0, 4.0, 1.0, 3.0, 2.0],
        vec![2.0, 2.0, 2.0, 2.0, 2.0],
    ])?;
    let profile = compute_profile(&inst, DEFAULT_BUDGET)?;
    let dup = duplicate_additive(&inst, DEFAULT_BUDGET)?;
    println!("doubled-set shares {:?}", dup.mu_tilde);
    for (i, b) in dup.alloc.bundles.iter().enumerate() {
        println!("agent {i}: {:?} worth {} (share {})", b.items(), inst.eval(i, b)?, profile.mu[i]);
    }
    println!("chi {:?}", dup.alloc.char_vector(inst.m())?.counts);
    Ok(())
}
