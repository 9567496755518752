//! JSON reading and writing for instances, plans and reports.

use freightplan_core::{Instance, ShipmentPlan, SCHEMA_VERSION};
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum JsonError {
    #[error("{what}: {source}")]
    Syntax { what: &'static str, source: serde_json::Error },
    #[error("{what}: schema version {found}, expected {SCHEMA_VERSION}")]
    Version { what: &'static str, found: u32 },
    #[error("instance: {0}")]
    Instance(#[from] freightplan_core::ModelError),
}

/// Pretty JSON with a trailing newline. Map keys are ordered, so equal
/// values always give identical bytes.
pub fn to_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

/// Parses and structurally checks an instance.
pub fn read_instance(bytes: &[u8]) -> Result<Instance, JsonError> {
    let inst: Instance = serde_json::from_slice(bytes).map_err(|source| JsonError::Syntax { what: "instance", source })?;
    if inst.schema_version != SCHEMA_VERSION {
        return Err(JsonError::Version { what: "instance", found: inst.schema_version });
    }
    inst.check()?;
    Ok(inst)
}

pub fn read_plan(bytes: &[u8]) -> Result<ShipmentPlan, JsonError> {
    let plan: ShipmentPlan = serde_json::from_slice(bytes).map_err(|source| JsonError::Syntax { what: "plan", source })?;
    if plan.schema_version != SCHEMA_VERSION {
        return Err(JsonError::Version { what: "plan", found: plan.schema_version });
    }
    Ok(plan)
}
