//! Exact shares and inducing partitions for a small goods instance.

use mms_multialloc::shares::{compute_constrained_profile, compute_hat_profile};
use mms_multialloc::{compute_profile, EntitlementVector, Instance, DEFAULT_BUDGET};

fn main() -> mms_multialloc::Result<()> {
    let inst = Instance::additive_goods(vec![vec![4.0, 3.0, 2.0, 1.0], vec![1.0, 1.0, 1.0, 1.0]])?;
    let profile = compute_profile(&inst, DEFAULT_BUDGET)?;
    for (i, (mu, part)) in profile.mu.iter().zip(&profile.inducing).enumerate() {
        println!("agent {i}: share {mu}, partition {part:?}");
    }

    let tilde = compute_constrained_profile(&inst, DEFAULT_BUDGET)?;
    println!("shares on the doubled ground set: {:?}", tilde.mu);

    let ent = EntitlementVector::new(vec![0.75, 0.25])?;
    let hat = compute_hat_profile(&inst, &ent, DEFAULT_BUDGET)?;
    println!("entitled shares for {:?}: {:?}", ent.weights(), hat.mu);
    Ok(())
}
