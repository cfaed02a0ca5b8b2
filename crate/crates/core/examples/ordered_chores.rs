//! Pre-processing, a draw on the leftover chores, and redistribution.

use mms_multialloc::chores::{coverage_deficit, ordered_chores_pipeline, preprocess_chores, ChoreConfig};
use mms_multialloc::{compute_profile, Instance, DEFAULT_BUDGET};

fn main() -> mms_multialloc::Result<()> {
    let inst = Instance::additive_chores(vec![
        vec![9.0, 7.0, 5.0, 4.0, 3.0, 2.0, 1.0, 1.0],
        vec![6.0, 6.0, 5.0, 3.0, 3.0, 2.0, 2.0, 1.0],
        vec![8.0, 4.0, 4.0, 3.0, 2.0, 2.0, 1.0, 1.0],
    ])?;
    let profile = compute_profile(&inst, DEFAULT_BUDGET)?;

    let sub = preprocess_chores(&inst, &profile, 6.0)?;
    println!("handled up front: {:?}", sub.preassigned_agents());
    println!("left over: agents {:?}, chores {:?}", sub.remaining_agents, sub.remaining_chores);

    let out = ordered_chores_pipeline(&inst, &profile, &ChoreConfig::new(5))?;
    for (i, b) in out.alloc.bundles.iter().enumerate() {
        println!("agent {i}: {:?} cost {} (share {})", b.items(), inst.eval(i, b)?, profile.mu[i]);
    }
    let chi = out.alloc.char_vector(inst.m())?;
    println!("unassigned {:?}, disposal gate {:?}", out.unassigned, out.delta_star);
    println!("largest window shortfall {}", coverage_deficit(&chi.counts).delta_max);
    Ok(())
}
