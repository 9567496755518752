//! Feasibility checks for shipment plans.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{EdgeId, Instance, Leg, LocationKind, ModelError, OrderId, ShipmentPlan};
use crate::SCHEMA_VERSION;

/// Constraint family a violation belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintFamily {
    /// Weight on a capacitated edge in one week exceeds its capacity.
    Capacity,
    /// An order ships on an FCL edge in a week with no booking.
    MissingBooking,
    /// A booking departs before the booking lead time has passed.
    BookingLead,
    /// Too many bookings leave one port in one week.
    PortBookingCap,
    DuplicateBooking,
    /// First departure before the order is ready.
    Availability,
    /// Idle time at an in-transit node exceeds the dwell limit.
    Dwell,
    /// Arrival outside the delivery window.
    Deadline,
    /// Legs do not form a path from origin to destination through in-transit nodes.
    RouteChain,
    Unrouted,
    /// A departure falls outside the planning horizon.
    Horizon,
}

impl fmt::Display for ConstraintFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConstraintFamily::Capacity => "capacity",
            ConstraintFamily::MissingBooking => "missing_booking",
            ConstraintFamily::BookingLead => "booking_lead",
            ConstraintFamily::PortBookingCap => "port_booking_cap",
            ConstraintFamily::DuplicateBooking => "duplicate_booking",
            ConstraintFamily::Availability => "availability",
            ConstraintFamily::Dwell => "dwell",
            ConstraintFamily::Deadline => "deadline",
            ConstraintFamily::RouteChain => "route_chain",
            ConstraintFamily::Unrouted => "unrouted",
            ConstraintFamily::Horizon => "horizon",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub family: ConstraintFamily,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<OrderId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge: Option<EdgeId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub week: Option<u32>,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn count(&self, family: ConstraintFamily) -> usize {
        self.violations.iter().filter(|v| v.family == family).count()
    }

    fn push(&mut self, family: ConstraintFamily, order: Option<OrderId>, edge: Option<EdgeId>, week: Option<u32>, message: String) {
        self.violations.push(Violation { family, order, edge, week, message });
    }
}

/// Plan references something the instance does not contain.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PlanError {
    #[error("invalid instance: {0}")]
    Instance(#[from] ModelError),
    #[error("unsupported plan schema version {0}")]
    SchemaVersion(u32),
    #[error("plan routes unknown order {0}")]
    UnknownOrder(OrderId),
    #[error("plan references unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("booking on edge {0}, which is not an FCL edge")]
    BookingOnNonFcl(EdgeId),
}

/// Checks every dangling reference in `plan` against `instance`.
pub fn check_references(instance: &Instance, plan: &ShipmentPlan) -> Result<(), PlanError> {
    instance.check()?;
    if plan.schema_version != SCHEMA_VERSION {
        return Err(PlanError::SchemaVersion(plan.schema_version));
    }
    let orders = instance.order_index();
    for (id, legs) in &plan.routes {
        if !orders.contains_key(id) {
            return Err(PlanError::UnknownOrder(*id));
        }
        for leg in legs {
            instance.network.edge(leg.edge).ok_or(PlanError::UnknownEdge(leg.edge))?;
        }
    }
    for b in &plan.bookings {
        let edge = instance.network.edge(b.edge).ok_or(PlanError::UnknownEdge(b.edge))?;
        if !edge.is_fcl() {
            return Err(PlanError::BookingOnNonFcl(b.edge));
        }
    }
    Ok(())
}

/// Week the order reaches its destination: departure plus transit of the last leg.
pub fn arrival_week(instance: &Instance, plan: &ShipmentPlan, order: OrderId) -> Option<u32> {
    route_arrival(instance, plan.routes.get(&order)?)
}

pub(crate) fn route_arrival(instance: &Instance, legs: &[Leg]) -> Option<u32> {
    let last = legs.last()?;
    let edge = instance.network.edge(last.edge)?;
    Some(last.depart_week + edge.transit_weeks)
}

/// Lists every violated constraint of `plan`; an empty report means feasible.
pub fn validate_plan(instance: &Instance, plan: &ShipmentPlan) -> Result<ValidationReport, PlanError> {
    check_references(instance, plan)?;
    let net = &instance.network;
    let horizon = instance.horizon_weeks;
    let rho = instance.dwell_limit_weeks;
    let mut report = ValidationReport::default();
    let booked: BTreeSet<(EdgeId, u32)> = plan.bookings.iter().map(|b| (b.edge, b.depart_week)).collect();
    let mut load: BTreeMap<(EdgeId, u32), u64> = BTreeMap::new();

    for order in &instance.orders {
        let id = Some(order.id);
        let legs = match plan.routes.get(&order.id) {
            Some(legs) if !legs.is_empty() => legs,
            _ => {
                report.push(ConstraintFamily::Unrouted, id, None, None, format!("order {} has no route", order.id));
                continue;
            }
        };
        let mut chain_ok = true;
        let mut prev_arrival = 0u32;
        for (i, leg) in legs.iter().enumerate() {
            let edge = net.edge(leg.edge).expect("references checked");
            let (e, w) = (Some(leg.edge), Some(leg.depart_week));
            if leg.depart_week >= horizon {
                report.push(ConstraintFamily::Horizon, id, e, w, format!("departure week {} not below horizon {}", leg.depart_week, horizon));
            }
            if i == 0 {
                if edge.origin != order.origin {
                    chain_ok = false;
                    report.push(ConstraintFamily::RouteChain, id, e, w, format!("first leg leaves {} instead of origin {}", edge.origin, order.origin));
                }
                if leg.depart_week < order.ready_week {
                    report.push(ConstraintFamily::Availability, id, e, w, format!("departs week {} before ready week {}", leg.depart_week, order.ready_week));
                }
            } else {
                let prev = net.edge(legs[i - 1].edge).expect("references checked");
                if prev.dest != edge.origin {
                    chain_ok = false;
                    report.push(ConstraintFamily::RouteChain, id, e, w, format!("leg leaves {} but previous leg ends at {}", edge.origin, prev.dest));
                } else if net.kind(edge.origin) != Some(LocationKind::InTransit) {
                    chain_ok = false;
                    report.push(ConstraintFamily::RouteChain, id, e, w, format!("route passes through {} which is not an in-transit node", edge.origin));
                }
                if leg.depart_week < prev_arrival {
                    chain_ok = false;
                    report.push(ConstraintFamily::RouteChain, id, e, w, format!("departs week {} before arriving week {}", leg.depart_week, prev_arrival));
                } else if leg.depart_week - prev_arrival > rho {
                    report.push(ConstraintFamily::Dwell, id, e, w, format!("idles {} weeks at {} (limit {})", leg.depart_week - prev_arrival, edge.origin, rho));
                }
            }
            if edge.is_fcl() && !booked.contains(&(leg.edge, leg.depart_week)) {
                report.push(ConstraintFamily::MissingBooking, id, e, w, format!("no FCL booking for {} in week {}", leg.edge, leg.depart_week));
            }
            if edge.capacity_kg.is_some() {
                *load.entry((leg.edge, leg.depart_week)).or_default() += u64::from(order.gross_weight_kg);
            }
            prev_arrival = leg.depart_week + edge.transit_weeks;
        }
        let last = net.edge(legs[legs.len() - 1].edge).expect("references checked");
        if last.dest != order.destination {
            chain_ok = false;
            report.push(ConstraintFamily::RouteChain, id, Some(last.id), None, format!("route ends at {} instead of {}", last.dest, order.destination));
        }
        if chain_ok && !(order.earliest_week..=order.latest_week).contains(&prev_arrival) {
            report.push(
                ConstraintFamily::Deadline,
                id,
                None,
                Some(prev_arrival),
                format!("arrives week {} outside [{}, {}]", prev_arrival, order.earliest_week, order.latest_week),
            );
        }
    }

    for (&(edge_id, week), &kg) in &load {
        let cap = net.edge(edge_id).and_then(|e| e.capacity_kg).expect("capacitated");
        if kg > u64::from(cap) {
            report.push(ConstraintFamily::Capacity, None, Some(edge_id), Some(week), format!("{} kg exceeds capacity {} kg", kg, cap));
        }
    }

    let mut seen = BTreeSet::new();
    let mut per_port: BTreeMap<(crate::model::LocationId, u32), u32> = BTreeMap::new();
    for b in &plan.bookings {
        let (e, w) = (Some(b.edge), Some(b.depart_week));
        if !seen.insert((b.edge, b.depart_week)) {
            report.push(ConstraintFamily::DuplicateBooking, None, e, w, format!("{} booked twice in week {}", b.edge, b.depart_week));
            continue;
        }
        if b.depart_week < instance.booking_lead_weeks {
            report.push(ConstraintFamily::BookingLead, None, e, w, format!("booking departs week {} before lead time {}", b.depart_week, instance.booking_lead_weeks));
        }
        if b.depart_week >= horizon {
            report.push(ConstraintFamily::Horizon, None, e, w, format!("booking week {} not below horizon {}", b.depart_week, horizon));
        }
        let port = net.edge(b.edge).expect("references checked").origin;
        *per_port.entry((port, b.depart_week)).or_default() += 1;
    }
    for (&(port, week), &count) in &per_port {
        if count > instance.bookings_per_port_week {
            report.push(
                ConstraintFamily::PortBookingCap,
                None,
                None,
                Some(week),
                format!("{} bookings at {} exceed the limit {}", count, port, instance.bookings_per_port_week),
            );
        }
    }
    Ok(report)
}
