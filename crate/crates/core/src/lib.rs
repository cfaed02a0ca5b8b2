//! Maximin-share multi-allocations of indivisible items.
//!
//! Exact share computation by enumeration, randomized samplers for goods
//! (bounded duplication) and chores (bounded disposal), deterministic copy
//! redistribution along a shared item order, adversarial lower-bound
//! instances, and a reduction from independent set.

pub mod adversarial;
pub mod alloc;
pub mod chores;
pub mod error;
pub mod format;
pub mod goods;
pub mod harness;
pub mod instance;
pub mod rng;
pub mod shares;

/// Absolute tolerance for comparisons of real values.
pub const EPS: f64 = 1e-9;

/// Default cap on enumerated states for exhaustive searches.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

pub use alloc::{char_vector, verify_mms, Bundle, CharVector, MultiAllocation};
pub use error::{Error, Result};
pub use instance::{check_identically_ordered, check_monotone, EntitlementVector, Instance, ItemKind, Transform, ValuationSpec};
pub use shares::{compute_mms, compute_profile, MmsProfile};
