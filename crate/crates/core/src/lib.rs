//! Multi-period inbound freight planning.
//!
//! Orders travel from an inland supply node through export and import ports
//! to a demand node, by air, by less-than-container-load (LCL) ocean freight,
//! or consolidated in booked full-container-load (FCL) units. This crate holds
//! the pure algorithmic pieces:
//!
//! - [`model`]: domain types and structural checks,
//! - [`validate`] and [`cost`]: plan feasibility and cost accounting,
//! - [`generator`]: seeded synthetic instances,
//! - [`heuristic`]: the knapsack-based rolling-horizon planner,
//! - [`oracle`]: exhaustive exact search for desk-scale instances,
//! - [`milp`]: assembly of the time-expanded integer program and its variants.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, parallel
//! execution and the command-line tool live in the `freightplan` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod cost;
pub mod fixed;
pub mod generator;
pub mod heuristic;
pub mod knapsack;
pub mod milp;
pub mod model;
pub mod oracle;
pub mod paths;
pub mod validate;

pub use cost::{heuristic_error, plan_cost, CostBreakdown, CostError};
pub use fixed::Fixed4;
pub use model::{
    Booking, Edge, EdgeId, Instance, Leg, Location, LocationId, LocationKind, ModeClass,
    ModelError, Network, OrderId, ProductOrder, Provenance, ShipmentPlan, TransportMode,
};
pub use validate::{arrival_week, validate_plan, ConstraintFamily, ValidationReport, Violation};

/// Version of the JSON schema for instances, plans and reports.
pub const SCHEMA_VERSION: u32 = 1;
