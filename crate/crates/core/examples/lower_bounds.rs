//! Exact minimum multiplicity and leftover count on random partition instances.

use mms_multialloc::adversarial::{gen_chores_lb_instance, gen_goods_lb_instance, min_l0_over_family, min_linf_over_family, LbFlavor};
use mms_multialloc::DEFAULT_BUDGET;

fn main() -> mms_multialloc::Result<()> {
    let (n, m) = (4, 32);
    for seed in 0..5 {
        let (_, goods) = gen_goods_lb_instance(n, m, LbFlavor::Threshold, seed)?;
        let (linf, choice) = min_linf_over_family(&goods, DEFAULT_BUDGET)?;
        let (_, chores) = gen_chores_lb_instance(n, m, seed)?;
        let (l0, _) = min_l0_over_family(&chores, DEFAULT_BUDGET)?;
        println!("seed {seed}: min linf {linf} via {choice:?}, min l0 {l0} of {m}");
    }
    Ok(())
}
