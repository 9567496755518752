//! File formats, solver driver and reports around [`freightplan_core`].
//!
//! Instances, plans and reports are JSON; tables are CSV; models are written
//! as CPLEX-style LP or fixed-format MPS text, with MIP starts as
//! `name value` lines. Every parser here reads what the matching writer
//! produces back into an identical value.

pub mod digest;
pub mod json;
pub mod lp;
pub mod mipstart;
pub mod mps;
pub mod parallel;
pub mod report;
pub mod tables;

pub use freightplan_core as core;

/// Name recorded in artifacts written by this crate.
pub const TOOL_NAME: &str = "freightplan";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Provenance for a file derived from an input with the given bytes.
pub fn provenance(input: &[u8]) -> freightplan_core::Provenance {
    freightplan_core::Provenance {
        tool: TOOL_NAME.into(),
        version: TOOL_VERSION.into(),
        input_digest: digest::sha256_hex(input),
    }
}
