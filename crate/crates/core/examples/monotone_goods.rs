//! Independent block draws on a random table-valued instance.

use mms_multialloc::goods::{sample_monotone_goods, SamplerConfig};
use mms_multialloc::harness::{gen_random_instance, InstanceClass};
use mms_multialloc::{compute_profile, verify_mms, ItemKind, DEFAULT_BUDGET};

fn main() -> mms_multialloc::Result<()> {
    let inst = gen_random_instance(InstanceClass::Table, ItemKind::Goods, 3, 8, 11)?;
    let profile = compute_profile(&inst, DEFAULT_BUDGET)?;
    let out = sample_monotone_goods(&inst, &profile, &SamplerConfig::new(7))?;
    let chi = out.alloc.char_vector(inst.m())?;
    println!("shares {:?}", profile.mu);
    for (i, b) in out.alloc.bundles.iter().enumerate() {
        println!("agent {i}: {:?} worth {}", b.items(), inst.eval(i, b)?);
    }
    println!("chi {:?}, l1 {} (<= {}), linf {} (<= {})", chi.counts, chi.l1, out.bounds.l1_limit, chi.linf, out.bounds.linf_limit);
    println!("rejected draws: {}, mms: {}", out.retries, verify_mms(&inst, &profile, &out.alloc)?);
    Ok(())
}
