//! Unequal entitlements: agents partition into floor(1/b_i) blocks.

use mms_multialloc::goods::{sample_entitled, SamplerConfig};
use mms_multialloc::shares::compute_hat_profile;
use mms_multialloc::{EntitlementVector, Instance, DEFAULT_BUDGET};

fn main() -> mms_multialloc::Result<()> {
    let ent = EntitlementVector::new(vec![0.5, 0.3, 0.2])?;
    let inst = Instance::additive_goods(vec![
        vec![6.0, 5.0, 4.0, 3.0, 2.0, 1.0],
        vec![3.0, 3.0, 3.0, 2.0, 2.0, 1.0],
        vec![9.0, 4.0, 4.0, 1.0, 1.0, 1.0],
    ])?;
    let profile = compute_hat_profile(&inst, &ent, DEFAULT_BUDGET)?;
    let out = sample_entitled(&inst, &ent, &profile, &SamplerConfig::new(1))?;
    for i in 0..inst.n() {
        let b = &out.alloc.bundles[i];
        println!(
            "agent {i}: {} blocks, share {}, bundle {:?} worth {}",
            ent.blocks_for(i),
            profile.mu[i],
            b.items(),
            inst.eval(i, b)?
        );
    }
    let sum: f64 = ent.block_counts().iter().map(|&k| 1.0 / k as f64).sum();
    println!("sum of 1/n_i = {sum:.3}");
    Ok(())
}
