//! Restricted draw on identically ordered goods, then copy redistribution with a tight threshold.

use mms_multialloc::goods::{redistribute_goods, sample_ordered_goods_base, SamplerConfig};
use mms_multialloc::{compute_profile, Instance, DEFAULT_BUDGET};

fn main() -> mms_multialloc::Result<()> {
    let inst = Instance::additive_goods(vec![
        vec![9.0, 8.0, 6.0, 5.0, 3.0, 2.0, 2.0, 1.0],
        vec![5.0, 5.0, 4.0, 4.0, 3.0, 3.0, 1.0, 1.0],
        vec![7.0, 3.0, 3.0, 2.0, 2.0, 2.0, 1.0, 1.0],
        vec![4.0, 4.0, 4.0, 4.0, 1.0, 1.0, 1.0, 1.0],
    ])?;
    let m = inst.m();
    let profile = compute_profile(&inst, DEFAULT_BUDGET)?;
    let base = sample_ordered_goods_base(&inst, &profile, &SamplerConfig::new(3))?;
    println!("base chi {:?}", base.alloc.char_vector(m)?.counts);

    let tau = 2;
    let out = redistribute_goods(&base.alloc, &inst, tau)?;
    for mv in &out.moves {
        println!("agent {} trades good {} for good {}", mv.agent, mv.from, mv.to);
    }
    println!("after chi {:?} (tau = {tau})", out.alloc.char_vector(m)?.counts);
    for i in 0..inst.n() {
        let (before, after) = (inst.eval(i, &base.alloc.bundles[i])?, inst.eval(i, &out.alloc.bundles[i])?);
        println!("agent {i}: {before} -> {after} (share {})", profile.mu[i]);
    }
    Ok(())
}
