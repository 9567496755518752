//! MIP starts as `name value` lines, `#` for comments.
//!
//! The header records the tool, the instance digest and the objective value
//! of the start. Only nonzero values are listed.

use std::fmt::Write as _;

use freightplan_core::milp::{mip_start, BuiltModel, MilpError};
use freightplan_core::{Instance, Provenance, ShipmentPlan};

use crate::mps::{NameKind, NameMap};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct MipStart {
    pub objective: Option<f64>,
    pub values: Vec<(String, f64)>,
}

impl MipStart {
    pub fn value(&self, name: &str) -> f64 {
        self.values.iter().find(|(n, _)| n == name).map_or(0.0, |v| v.1)
    }
}

/// Checks `plan` against every row of `built`, then renders the start. With
/// `names`, column names follow an MPS file's generated names.
pub fn write_mip_start(
    built: &BuiltModel,
    inst: &Instance,
    plan: &ShipmentPlan,
    names: Option<&NameMap>,
    provenance: Option<&Provenance>,
) -> Result<String, MilpError> {
    let pairs = mip_start(built, inst, plan)?;
    let objective: f64 = built
        .model
        .objective
        .iter()
        .map(|&(j, c)| c * pairs.iter().find(|(n, _)| *n == built.model.variables[j].name).map_or(0.0, |p| p.1))
        .sum();
    let rename = names.map(|m| m.forward(NameKind::Column));
    let mut out = String::new();
    if let Some(p) = provenance {
        writeln!(out, "# {} {} input sha256 {}", p.tool, p.version, p.input_digest).unwrap();
    }
    if !pairs.is_empty() {
        writeln!(out, "# objective {objective}").unwrap();
    }
    for (name, v) in &pairs {
        let name = rename.as_ref().and_then(|m| m.get(name.as_str()).copied()).unwrap_or(name);
        writeln!(out, "{name} {v}").unwrap();
    }
    Ok(out)
}

#[derive(Debug, PartialEq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct MipStartError {
    pub line: usize,
    pub message: String,
}

pub fn parse_mip_start(text: &str) -> Result<MipStart, MipStartError> {
    let mut out = MipStart::default();
    for (k, line) in text.lines().enumerate() {
        let err = |message: &str| MipStartError { line: k + 1, message: message.into() };
        let line = line.trim();
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(v) = comment.trim().strip_prefix("objective ") {
                out.objective = Some(v.trim().parse().map_err(|_| err("bad objective"))?);
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(name), Some(v), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(err("expected `name value`"));
        };
        out.values.push((name.to_string(), v.parse().map_err(|_| err("bad value"))?));
    }
    Ok(out)
}
