//! Domain types shared by every planner: network, orders, instance and plan.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::fixed::Fixed4;
use crate::SCHEMA_VERSION;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LocationId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OrderId(pub u32);

impl EdgeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl LocationId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for LocationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

impl fmt::Display for OrderId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocationKind {
    Supply,
    InTransit,
    Demand,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Location {
    pub id: LocationId,
    pub kind: LocationKind,
    pub label: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeClass {
    Ground,
    Air,
    Lcl,
    Fcl,
}

impl ModeClass {
    /// LCL and FCL legs cross the ocean.
    pub fn is_ocean(self) -> bool {
        matches!(self, ModeClass::Lcl | ModeClass::Fcl)
    }
}

impl fmt::Display for ModeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModeClass::Ground => "ground",
            ModeClass::Air => "air",
            ModeClass::Lcl => "lcl",
            ModeClass::Fcl => "fcl",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TransportMode {
    pub class: ModeClass,
    /// Numbers parallel FCL units between the same port pair; `None` for
    /// every other class.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub container_index: Option<u32>,
}

impl TransportMode {
    pub const GROUND: TransportMode = TransportMode { class: ModeClass::Ground, container_index: None };
    pub const AIR: TransportMode = TransportMode { class: ModeClass::Air, container_index: None };
    pub const LCL: TransportMode = TransportMode { class: ModeClass::Lcl, container_index: None };

    pub const fn fcl(container_index: u32) -> Self {
        TransportMode { class: ModeClass::Fcl, container_index: Some(container_index) }
    }
}

/// How an edge charges a single order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CostSpec {
    /// Ground (gross weight) and air (air-charge weight) legs.
    PerKg { rate_cents_per_kg: u64 },
    /// Bunker surcharge plus a per-CBM rate, charged per consignment.
    Lcl { bunker_cents: u64, rate_cents_per_cbm: u64 },
    /// Fixed charge per booked unit plus an optional per-order charge.
    Fcl { fixed_cost_cents: u64, variable_cents_per_order: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub origin: LocationId,
    pub dest: LocationId,
    pub mode: TransportMode,
    pub transit_weeks: u32,
    /// `None` means unbounded.
    pub capacity_kg: Option<u32>,
    pub cost: CostSpec,
}

impl Edge {
    pub fn class(&self) -> ModeClass {
        self.mode.class
    }

    pub fn is_fcl(&self) -> bool {
        self.mode.class == ModeClass::Fcl
    }

    /// Fixed booking charge, zero for non-FCL edges.
    pub fn fixed_cost_cents(&self) -> u64 {
        match self.cost {
            CostSpec::Fcl { fixed_cost_cents, .. } => fixed_cost_cents,
            _ => 0,
        }
    }

    /// Cost of moving `order` over this edge, excluding any fixed charge.
    pub fn order_cost_cents(&self, order: &ProductOrder) -> u64 {
        match (self.cost, self.mode.class) {
            (CostSpec::PerKg { rate_cents_per_kg }, ModeClass::Air) => {
                order.air_charge_weight_kg.mul_rate(rate_cents_per_kg)
            }
            (CostSpec::PerKg { rate_cents_per_kg }, _) => {
                rate_cents_per_kg * u64::from(order.gross_weight_kg)
            }
            (CostSpec::Lcl { bunker_cents, rate_cents_per_cbm }, _) => {
                bunker_cents + order.volume_cbm.mul_rate(rate_cents_per_cbm)
            }
            (CostSpec::Fcl { variable_cents_per_order, .. }, _) => variable_cents_per_order,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Network {
    pub locations: Vec<Location>,
    pub edges: Vec<Edge>,
}

impl Network {
    pub fn location(&self, id: LocationId) -> Option<&Location> {
        self.locations.get(id.index()).filter(|l| l.id == id)
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.edges.get(id.index()).filter(|e| e.id == id)
    }

    pub fn kind(&self, id: LocationId) -> Option<LocationKind> {
        self.location(id).map(|l| l.kind)
    }

    pub fn fcl_edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(|e| e.is_fcl())
    }

    pub fn edges_of(&self, class: ModeClass) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.mode.class == class)
    }

    /// Outgoing edge ids per location, in edge-id order.
    pub fn adjacency(&self) -> Vec<Vec<EdgeId>> {
        let mut out = alloc::vec![Vec::new(); self.locations.len()];
        for e in &self.edges {
            if let Some(list) = out.get_mut(e.origin.index()) {
                list.push(e.id);
            }
        }
        out
    }

    /// Longest transit time of any edge, used for big-M and arrival bounds.
    pub fn max_transit(&self) -> u32 {
        self.edges.iter().map(|e| e.transit_weeks).max().unwrap_or(0)
    }

    /// Groups of interchangeable FCL units (same lane, transit, capacity and
    /// cost), each sorted by container index. Singletons are included.
    pub fn fcl_sibling_groups(&self) -> Vec<Vec<EdgeId>> {
        type Key = (LocationId, LocationId, u32, Option<u32>, CostSpec);
        let mut groups: BTreeMap<Key, Vec<(u32, EdgeId)>> = BTreeMap::new();
        for e in self.fcl_edges() {
            let key = (e.origin, e.dest, e.transit_weeks, e.capacity_kg, e.cost);
            groups.entry(key).or_default().push((e.mode.container_index.unwrap_or(0), e.id));
        }
        groups
            .into_values()
            .map(|mut g| {
                g.sort();
                g.into_iter().map(|(_, id)| id).collect()
            })
            .collect()
    }

    /// Rebuilds the edge list keeping only edges accepted by `keep`,
    /// renumbering ids so that `id == position` still holds.
    pub fn retain_edges(&mut self, mut keep: impl FnMut(&Edge) -> bool) {
        self.edges.retain(|e| keep(e));
        for (i, e) in self.edges.iter_mut().enumerate() {
            e.id = EdgeId(i as u32);
        }
    }
}

/// One purchase-order line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductOrder {
    pub id: OrderId,
    pub origin: LocationId,
    pub destination: LocationId,
    pub gross_weight_kg: u32,
    pub volume_cbm: Fixed4,
    pub air_charge_weight_kg: Fixed4,
    pub ready_week: u32,
    pub earliest_week: u32,
    pub latest_week: u32,
}

/// Provenance recorded by the generator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub generator: String,
    pub version: String,
    pub seed: u64,
    pub scenario: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub schema_version: u32,
    pub network: Network,
    pub orders: Vec<ProductOrder>,
    pub horizon_weeks: u32,
    /// Maximum idle weeks at an in-transit node (rho).
    pub dwell_limit_weeks: u32,
    /// FCL units cannot depart before this week (upsilon).
    pub booking_lead_weeks: u32,
    /// FCL bookings allowed per port and week (lambda).
    pub bookings_per_port_week: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<Manifest>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("unsupported schema version {0}")]
    SchemaVersion(u32),
    #[error("location at position {position} has id {id}")]
    LocationId { position: usize, id: LocationId },
    #[error("edge at position {position} has id {id}")]
    EdgeIdMismatch { position: usize, id: EdgeId },
    #[error("edge {edge} references unknown location {location}")]
    DanglingEdge { edge: EdgeId, location: LocationId },
    #[error("edge {edge}: {reason}")]
    BadEdge { edge: EdgeId, reason: &'static str },
    #[error("duplicate order id {0}")]
    DuplicateOrder(OrderId),
    #[error("order {order}: {reason}")]
    BadOrder { order: OrderId, reason: &'static str },
    #[error("horizon must exceed the booking lead ({horizon} <= {lead})")]
    Horizon { horizon: u32, lead: u32 },
    #[error("bookings per port and week must be positive")]
    PortCap,
}

impl Instance {
    pub fn order(&self, id: OrderId) -> Option<&ProductOrder> {
        self.orders.iter().find(|o| o.id == id)
    }

    /// Order lookup table by id.
    pub fn order_index(&self) -> BTreeMap<OrderId, usize> {
        self.orders.iter().enumerate().map(|(i, o)| (o.id, i)).collect()
    }

    /// Copy of this instance without the listed orders.
    pub fn without_orders(&self, drop: &[OrderId]) -> Instance {
        let mut out = self.clone();
        out.orders.retain(|o| !drop.contains(&o.id));
        out
    }

    /// Structural checks: references, kinds, mode/cost consistency and order data.
    pub fn check(&self) -> Result<(), ModelError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(ModelError::SchemaVersion(self.schema_version));
        }
        let net = &self.network;
        for (position, l) in net.locations.iter().enumerate() {
            if l.id.index() != position {
                return Err(ModelError::LocationId { position, id: l.id });
            }
        }
        for (position, e) in net.edges.iter().enumerate() {
            if e.id.index() != position {
                return Err(ModelError::EdgeIdMismatch { position, id: e.id });
            }
            for loc in [e.origin, e.dest] {
                if net.location(loc).is_none() {
                    return Err(ModelError::DanglingEdge { edge: e.id, location: loc });
                }
            }
            check_edge(e)?;
        }
        if self.horizon_weeks <= self.booking_lead_weeks {
            return Err(ModelError::Horizon { horizon: self.horizon_weeks, lead: self.booking_lead_weeks });
        }
        if self.bookings_per_port_week == 0 {
            return Err(ModelError::PortCap);
        }
        let mut seen = BTreeMap::new();
        for o in &self.orders {
            if seen.insert(o.id, ()).is_some() {
                return Err(ModelError::DuplicateOrder(o.id));
            }
            let bad = |reason| Err(ModelError::BadOrder { order: o.id, reason });
            if net.kind(o.origin) != Some(LocationKind::Supply) {
                return bad("origin must be a supply location");
            }
            if net.kind(o.destination) != Some(LocationKind::Demand) {
                return bad("destination must be a demand location");
            }
            if o.gross_weight_kg == 0 || o.volume_cbm == Fixed4::ZERO {
                return bad("weight and volume must be positive");
            }
            if o.air_charge_weight_kg < Fixed4::from_int(u64::from(o.gross_weight_kg)) {
                return bad("air-charge weight below gross weight");
            }
            if o.earliest_week > o.latest_week {
                return bad("earliest week after latest week");
            }
            if o.ready_week > o.latest_week {
                return bad("ready week after latest week");
            }
            if o.ready_week >= self.horizon_weeks {
                return bad("ready week outside the horizon");
            }
        }
        Ok(())
    }
}

fn check_edge(e: &Edge) -> Result<(), ModelError> {
    let bad = |reason| Err(ModelError::BadEdge { edge: e.id, reason });
    match (e.mode.class, e.mode.container_index) {
        (ModeClass::Fcl, Some(k)) if k >= 1 => {}
        (ModeClass::Fcl, _) => return bad("FCL edges need a container index >= 1"),
        (_, Some(_)) => return bad("only FCL edges carry a container index"),
        _ => {}
    }
    match (e.mode.class, e.cost) {
        (ModeClass::Ground | ModeClass::Air, CostSpec::PerKg { .. })
        | (ModeClass::Lcl, CostSpec::Lcl { .. })
        | (ModeClass::Fcl, CostSpec::Fcl { .. }) => {}
        _ => return bad("cost specification does not match the mode"),
    }
    match (e.mode.class, e.capacity_kg) {
        (ModeClass::Fcl, None) => return bad("FCL edges need a finite capacity"),
        (ModeClass::Lcl | ModeClass::Air, Some(_)) => return bad("LCL and air edges are unbounded"),
        (_, Some(0)) => return bad("capacity must be positive"),
        _ => {}
    }
    if e.origin == e.dest {
        return bad("self loop");
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Leg {
    pub edge: EdgeId,
    pub depart_week: u32,
}

/// Reservation of one FCL unit (an FCL edge) for one departure week.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Booking {
    pub edge: EdgeId,
    pub depart_week: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShipmentPlan {
    pub schema_version: u32,
    pub routes: BTreeMap<OrderId, Vec<Leg>>,
    pub bookings: Vec<Booking>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

/// Tool and input that produced a file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    /// SHA-256 of the input file, lowercase hex.
    pub input_digest: String,
}

impl Default for ShipmentPlan {
    fn default() -> Self {
        ShipmentPlan { schema_version: SCHEMA_VERSION, routes: BTreeMap::new(), bookings: Vec::new(), provenance: None }
    }
}

impl ShipmentPlan {
    /// Dominant class of a route: FCL, then LCL, then air, then ground.
    pub fn route_class(net: &Network, legs: &[Leg]) -> Option<ModeClass> {
        let classes = legs.iter().filter_map(|l| net.edge(l.edge)).map(|e| e.mode.class);
        let mut best = None;
        for c in classes {
            let rank = |c: ModeClass| match c {
                ModeClass::Fcl => 3,
                ModeClass::Lcl => 2,
                ModeClass::Air => 1,
                ModeClass::Ground => 0,
            };
            if best.map_or(true, |b| rank(c) > rank(b)) {
                best = Some(c);
            }
        }
        best
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    //! Small hand-built lane networks shared by unit tests.
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    pub const SUPPLY: LocationId = LocationId(0);
    pub const EXPORT: LocationId = LocationId(1);
    pub const IMPORT: LocationId = LocationId(2);
    pub const DEMAND: LocationId = LocationId(3);

    pub fn loc(id: u32, kind: LocationKind, label: &str) -> Location {
        Location { id: LocationId(id), kind, label: label.to_string() }
    }

    pub fn edge(id: u32, o: LocationId, d: LocationId, mode: TransportMode, transit: u32, cap: Option<u32>, cost: CostSpec) -> Edge {
        Edge { id: EdgeId(id), origin: o, dest: d, mode, transit_weeks: transit, capacity_kg: cap, cost }
    }

    /// supply -ground(2)-> export -LCL(7)/FCL(7)-> import -ground(2)-> demand, plus air(2).
    /// Edges: 0 ground in, 1 LCL, 2 FCL#1, 3 ground out, 4 air.
    pub fn lane_network() -> Network {
        Network {
            locations: vec![
                loc(0, LocationKind::Supply, "origin"),
                loc(1, LocationKind::InTransit, "export port"),
                loc(2, LocationKind::InTransit, "import port"),
                loc(3, LocationKind::Demand, "plant"),
            ],
            edges: vec![
                edge(0, SUPPLY, EXPORT, TransportMode::GROUND, 2, None, CostSpec::PerKg { rate_cents_per_kg: 10 }),
                edge(1, EXPORT, IMPORT, TransportMode::LCL, 7, None, CostSpec::Lcl { bunker_cents: 116_000, rate_cents_per_cbm: 80_000 }),
                edge(2, EXPORT, IMPORT, TransportMode::fcl(1), 7, Some(20_000), CostSpec::Fcl { fixed_cost_cents: 1_253_800, variable_cents_per_order: 0 }),
                edge(3, IMPORT, DEMAND, TransportMode::GROUND, 2, None, CostSpec::PerKg { rate_cents_per_kg: 8 }),
                edge(4, SUPPLY, DEMAND, TransportMode::AIR, 2, None, CostSpec::PerKg { rate_cents_per_kg: 1323 }),
            ],
        }
    }

    pub fn order(id: u32, kg: u32, cbm: &str, ready: u32, early: u32, late: u32) -> ProductOrder {
        ProductOrder {
            id: OrderId(id),
            origin: SUPPLY,
            destination: DEMAND,
            gross_weight_kg: kg,
            volume_cbm: cbm.parse().unwrap(),
            air_charge_weight_kg: Fixed4::from_int(u64::from(kg)),
            ready_week: ready,
            earliest_week: early,
            latest_week: late,
        }
    }

    pub fn instance(orders: Vec<ProductOrder>) -> Instance {
        Instance {
            schema_version: SCHEMA_VERSION,
            network: lane_network(),
            orders,
            horizon_weeks: 26,
            dwell_limit_weeks: 2,
            booking_lead_weeks: 4,
            bookings_per_port_week: 2,
            manifest: None,
        }
    }
}
