//! JSON instance files and multi-allocation output documents.

use serde::{Deserialize, Serialize};

use crate::alloc::{Bundle, MultiAllocation};
use crate::error::{Error, Result};
use crate::instance::{EntitlementVector, Instance, ItemKind, ValuationSpec};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    kind: ItemKind,
    n: usize,
    m: usize,
    agents: Vec<ValuationSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    entitlements: Option<Vec<f64>>,
}

fn at(location: impl Into<String>, message: impl ToString) -> Error {
    Error::Parse { location: location.into(), message: message.to_string() }
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let raw: RawInstance = serde_json::from_str(text)
        .map_err(|e| at(format!("line {}, column {}", e.line(), e.column()), e))?;
    if raw.agents.len() != raw.n {
        return Err(at("n", format!("n = {} but {} agents are listed", raw.n, raw.agents.len())));
    }
    let ent = raw
        .entitlements
        .map(EntitlementVector::new)
        .transpose()
        .map_err(|e| at("entitlements", e))?;
    Instance::new(raw.kind, raw.m, raw.agents, ent).map_err(|e| match e {
        Error::InvalidValuation { agent, reason } => at(format!("agents[{agent}]"), reason),
        Error::InvalidEntitlements(msg) => at("entitlements", msg),
        Error::InvalidInstance(msg) => at("m", msg),
        other => other,
    })
}

pub fn serialize_instance(instance: &Instance) -> String {
    let raw = RawInstance {
        kind: instance.kind(),
        n: instance.n(),
        m: instance.m(),
        agents: instance.agents().to_vec(),
        entitlements: instance.entitlements().map(|e| e.weights().to_vec()),
    };
    serde_json::to_string_pretty(&raw).expect("instance serializes")
}

/// `{"bundles", "chi", "l1", "linf", "l0"}` view of a multi-allocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocationDoc {
    pub bundles: Vec<Bundle>,
    pub chi: Vec<usize>,
    pub l1: usize,
    pub linf: usize,
    pub l0: usize,
}

impl AllocationDoc {
    pub fn new(alloc: &MultiAllocation, m: usize) -> Result<Self> {
        let chi = alloc.char_vector(m)?;
        Ok(Self { bundles: alloc.bundles.clone(), chi: chi.counts, l1: chi.l1, linf: chi.linf, l0: chi.l0 })
    }
}
