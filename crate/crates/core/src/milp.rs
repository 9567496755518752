//! Time-expanded integer program and its variants, as a solver-neutral model.
//!
//! Variables:
//!
//! - `x_p{p}_e{e}_t{t}`: order `p` departs on edge `e` in week `t` (binary),
//! - `z_e{e}_t{t}`: FCL unit `e` is booked for week `t` (binary),
//! - `e_p{p}`: arrival week of order `p` at its destination (integer),
//! - `r_n{i}_p{p}_t{t}`: order `p` waits at in-transit node `i` at the end
//!   of week `t` (binary, inventory mode only),
//! - `eps_p{p}`, `late_p{p}`: early and late deadline slack (relaxed modes),
//! - `ind_p{p}`: order `p` is late (service-level mode).
//!
//! Row names start with their family: `cap`, `sup`, `dem`, `dwin`, `dout`,
//! `bal`, `fcl`, `port`, `avail`, `arrlo`, `arrhi`, `ddllo`, `ddlhi`, `svcind`,
//! `svc`, `inv`, `invcap` and `sym`.
//!
//! In the original in-transit mode the dwell rows read as: a departure in
//! week `t` needs an arrival in `[t - ρ, t]` (`dwin`), an arrival in week `t`
//! needs a departure in `[t, t + ρ]` (`dout`), and inflow equals outflow
//! (`bal`). Both in-transit modes assume the in-transit nodes carry no
//! directed cycle.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::model::{EdgeId, Instance, LocationId, LocationKind, ModelError, OrderId, ProductOrder, ShipmentPlan};
use crate::paths::{dijkstra, Digraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarKind {
    Binary,
    Integer,
    Continuous,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    /// `f64::INFINITY` when unbounded.
    pub upper: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub name: String,
    /// (variable index, coefficient), sorted by index, no zeros.
    pub coefficients: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// A minimization model.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ModelDescription {
    pub name: String,
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    /// (variable index, coefficient), sorted by index, no zeros.
    pub objective: Vec<(usize, f64)>,
}

/// Absolute tolerance of [`ModelDescription::violations`].
pub const FEASIBILITY_TOLERANCE: f64 = 1e-9;

impl ModelDescription {
    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective.iter().map(|&(i, c)| c * values[i]).sum()
    }

    /// Names of violated rows, bounds and integrality restrictions.
    pub fn violations(&self, values: &[f64]) -> Vec<String> {
        let tol = FEASIBILITY_TOLERANCE;
        let mut out = Vec::new();
        if values.len() != self.variables.len() {
            out.push(format!("expected {} values, got {}", self.variables.len(), values.len()));
            return out;
        }
        for (v, &x) in self.variables.iter().zip(values) {
            if x < v.lower - tol || x > v.upper + tol {
                out.push(format!("bound {}", v.name));
            }
            if v.kind != VarKind::Continuous && (x - libm_round(x)).abs() > tol {
                out.push(format!("integrality {}", v.name));
            }
        }
        for c in &self.constraints {
            let lhs: f64 = c.coefficients.iter().map(|&(i, a)| a * values[i]).sum();
            let ok = match c.sense {
                Sense::Le => lhs <= c.rhs + tol,
                Sense::Ge => lhs >= c.rhs - tol,
                Sense::Eq => (lhs - c.rhs).abs() <= tol,
            };
            if !ok {
                out.push(c.name.clone());
            }
        }
        out
    }

    /// Row count per family (the name prefix before the first underscore).
    pub fn family_counts(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        for c in &self.constraints {
            let family = c.name.split('_').next().unwrap_or("");
            *out.entry(String::from(family)).or_insert(0) += 1;
        }
        out
    }

    /// Structural checks: unique names, declared indices, sorted nonzero terms.
    pub fn check(&self) -> Result<(), String> {
        let mut names = BTreeSet::new();
        for v in &self.variables {
            if !names.insert(v.name.as_str()) {
                return Err(format!("duplicate variable {}", v.name));
            }
        }
        let mut rows = BTreeSet::new();
        let terms = |what: &str, list: &[(usize, f64)]| -> Result<(), String> {
            for w in list.windows(2) {
                if w[0].0 >= w[1].0 {
                    return Err(format!("{what}: terms not strictly sorted"));
                }
            }
            for &(i, c) in list {
                if i >= self.variables.len() {
                    return Err(format!("{what}: undeclared variable {i}"));
                }
                if c == 0.0 || !c.is_finite() {
                    return Err(format!("{what}: bad coefficient {c}"));
                }
            }
            Ok(())
        };
        terms("objective", &self.objective)?;
        for c in &self.constraints {
            if !rows.insert(c.name.as_str()) {
                return Err(format!("duplicate row {}", c.name));
            }
            terms(&c.name, &c.coefficients)?;
        }
        Ok(())
    }
}

fn libm_round(x: f64) -> f64 {
    // f64::round needs std; values here are far below 2^52.
    let t = x as i64 as f64;
    if (x - t).abs() >= 0.5 {
        t + if x > 0.0 { 1.0 } else { -1.0 }
    } else {
        t
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DeadlineMode {
    /// Arrival inside `[ξ, Ξ]`.
    Strict,
    /// Early and late slack priced per week in cents.
    Penalized { early_weight: u64, late_weight: u64 },
    /// Penalized slack plus a bound on the number of late orders:
    /// `late_p <= gamma * ind_p` and `sum ind_p <= floor(kappa * |P|)`.
    ServiceLevel { gamma: Option<u32>, kappa: f64, early_weight: u64, late_weight: u64 },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum InTransitMode {
    Original,
    #[default]
    Inventory,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VariantConfig {
    pub deadline: DeadlineMode,
    pub in_transit: InTransitMode,
    pub symmetry_breaking: bool,
    /// Defaults to `|T| + max τ + 1`.
    pub big_m: Option<u64>,
    /// Skip arc variables that cannot meet availability or deadlines, and
    /// orders without any feasible route.
    pub elide_hopeless: bool,
}

impl Default for VariantConfig {
    fn default() -> Self {
        VariantConfig {
            deadline: DeadlineMode::Strict,
            in_transit: InTransitMode::Inventory,
            symmetry_breaking: false,
            big_m: None,
            elide_hopeless: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum MilpError {
    #[error(transparent)]
    Instance(#[from] ModelError),
    #[error("invalid variant: {0}")]
    Config(String),
    #[error("plan uses {0}, which has no variable in the model")]
    Unrepresentable(String),
    #[error("plan routes order {0}, which the model excludes")]
    ExcludedOrder(OrderId),
    #[error("plan references unknown order {0}")]
    UnknownOrder(OrderId),
    #[error("plan violates model rows: {0:?}")]
    Infeasible(Vec<String>),
}

/// Variable positions by meaning.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VarIndex {
    pub x: BTreeMap<(OrderId, EdgeId, u32), usize>,
    pub z: BTreeMap<(EdgeId, u32), usize>,
    pub e: BTreeMap<OrderId, usize>,
    pub r: BTreeMap<(LocationId, OrderId, u32), usize>,
    pub eps: BTreeMap<OrderId, usize>,
    pub late: BTreeMap<OrderId, usize>,
    pub ind: BTreeMap<OrderId, usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BuiltModel {
    pub model: ModelDescription,
    pub index: VarIndex,
    pub variant: VariantConfig,
    /// Orders left out because no route reaches them in time.
    pub excluded_orders: Vec<OrderId>,
}

struct Builder {
    model: ModelDescription,
}

impl Builder {
    fn var(&mut self, name: String, kind: VarKind, lower: f64, upper: f64) -> usize {
        self.model.variables.push(Variable { name, kind, lower, upper });
        self.model.variables.len() - 1
    }

    /// Adds a row unless it has no terms and holds trivially.
    fn row(&mut self, name: String, terms: Vec<(usize, f64)>, sense: Sense, rhs: f64) {
        let mut merged: BTreeMap<usize, f64> = BTreeMap::new();
        for (i, c) in terms {
            *merged.entry(i).or_insert(0.0) += c;
        }
        let coefficients: Vec<(usize, f64)> = merged.into_iter().filter(|&(_, c)| c != 0.0).collect();
        if coefficients.is_empty() {
            let holds = match sense {
                Sense::Le => 0.0 <= rhs,
                Sense::Ge => 0.0 >= rhs,
                Sense::Eq => rhs == 0.0,
            };
            if holds {
                return;
            }
        }
        self.model.constraints.push(Constraint { name, coefficients, sense, rhs });
    }
}

/// Whether `order` has any route meeting availability, dwell, booking lead,
/// single-order capacity, horizon and (optionally) deadline rules.
pub fn order_has_route(inst: &Instance, order: &ProductOrder, deadlines: bool) -> bool {
    let net = &inst.network;
    let adj = net.adjacency();
    let mut seen = BTreeSet::new();
    // (node, first allowed departure, last allowed departure)
    let mut stack = vec![(order.origin, order.ready_week, inst.horizon_weeks.saturating_sub(1))];
    while let Some((node, lo, hi)) = stack.pop() {
        for &eid in &adj[node.index()] {
            let e = net.edge(eid).expect("adjacency");
            if e.capacity_kg.is_some_and(|c| order.gross_weight_kg > c) {
                continue;
            }
            let lo = if e.is_fcl() { lo.max(inst.booking_lead_weeks) } else { lo };
            for t in lo..=hi.min(inst.horizon_weeks.saturating_sub(1)) {
                let arrival = t + e.transit_weeks;
                if e.dest == order.destination {
                    if !deadlines || (order.earliest_week..=order.latest_week).contains(&arrival) {
                        return true;
                    }
                } else if net.kind(e.dest) == Some(LocationKind::InTransit) && seen.insert((e.dest, arrival)) {
                    stack.push((e.dest, arrival, arrival + inst.dwell_limit_weeks));
                }
            }
        }
    }
    false
}

/// Edges an order may use: leaving its origin or an in-transit node, and
/// entering an in-transit node or its destination.
fn order_edges(inst: &Instance, order: &ProductOrder) -> Vec<EdgeId> {
    let net = &inst.network;
    net.edges
        .iter()
        .filter(|e| {
            let from = e.origin == order.origin || net.kind(e.origin) == Some(LocationKind::InTransit);
            let to = e.dest == order.destination || net.kind(e.dest) == Some(LocationKind::InTransit);
            from && to
        })
        .map(|e| e.id)
        .collect()
}

/// Minimum transit from the origin to every node and from every node to the
/// destination, over the order's edges.
fn transit_distances(inst: &Instance, edges: &[EdgeId], order: &ProductOrder) -> (Vec<Option<u64>>, Vec<Option<u64>>) {
    let n = inst.network.locations.len();
    let mut fwd = Digraph::new(n);
    let mut bwd = Digraph::new(n);
    for &id in edges {
        let e = inst.network.edge(id).expect("order edge");
        fwd.add_arc(e.origin.index(), e.dest.index(), u64::from(e.transit_weeks));
        bwd.add_arc(e.dest.index(), e.origin.index(), u64::from(e.transit_weeks));
    }
    (dijkstra(&fwd, order.origin.index()).dist, dijkstra(&bwd, order.destination.index()).dist)
}

/// Assembles the model for `variant`.
pub fn build_model(inst: &Instance, variant: &VariantConfig) -> Result<BuiltModel, MilpError> {
    inst.check()?;
    let net = &inst.network;
    let h = inst.horizon_weeks;
    let max_tau = net.max_transit();
    let min_m = u64::from(h) + u64::from(max_tau);
    let big_m = variant.big_m.unwrap_or(min_m + 1);
    if big_m < min_m {
        return Err(MilpError::Config(format!("big-M {big_m} is below |T| + max transit = {min_m}")));
    }
    let strict = matches!(variant.deadline, DeadlineMode::Strict);
    match variant.deadline {
        DeadlineMode::ServiceLevel { gamma: None, .. } => return Err(MilpError::Config("service-level mode needs gamma".into())),
        DeadlineMode::ServiceLevel { gamma: Some(0), .. } => return Err(MilpError::Config("gamma must be positive".into())),
        DeadlineMode::ServiceLevel { kappa, .. } if !(kappa > 0.0 && kappa <= 1.0) => {
            return Err(MilpError::Config(format!("kappa must lie in (0, 1], got {kappa}")))
        }
        _ => {}
    }

    let mut excluded = Vec::new();
    let orders: Vec<&ProductOrder> = inst
        .orders
        .iter()
        .filter(|o| {
            let keep = !variant.elide_hopeless || order_has_route(inst, o, strict);
            if !keep {
                excluded.push(o.id);
            }
            keep
        })
        .collect();

    let mut b = Builder { model: ModelDescription { name: String::from("freightplan"), ..Default::default() } };
    let mut ix = VarIndex::default();
    let last_week = h.saturating_sub(1);

    // x: per order, per usable edge, per departure week
    for o in &orders {
        let edges = order_edges(inst, o);
        let (from_origin, to_dest) = transit_distances(inst, &edges, o);
        for &id in &edges {
            let e = net.edge(id).expect("order edge");
            let tau = e.transit_weeks;
            let mut lo = 0u32;
            let mut hi = if e.dest == o.destination { last_week } else { last_week.saturating_sub(tau) };
            if e.dest != o.destination && last_week < tau {
                continue;
            }
            if variant.elide_hopeless {
                let (Some(a), Some(b2)) = (from_origin[e.origin.index()], to_dest[e.dest.index()]) else {
                    continue;
                };
                lo = o.ready_week.saturating_add(a as u32);
                if e.is_fcl() {
                    lo = lo.max(inst.booking_lead_weeks);
                }
                if strict {
                    let latest = i64::from(o.latest_week) - i64::from(tau) - b2 as i64;
                    if latest < 0 {
                        continue;
                    }
                    hi = hi.min(latest as u32);
                }
            }
            for t in lo..=hi {
                if t > last_week {
                    break;
                }
                let v = b.var(format!("x_p{}_e{}_t{}", o.id.0, id.0, t), VarKind::Binary, 0.0, 1.0);
                ix.x.insert((o.id, id, t), v);
            }
        }
    }
    for e in net.fcl_edges() {
        for t in 0..h {
            let upper = if t < inst.booking_lead_weeks { 0.0 } else { 1.0 };
            let v = b.var(format!("z_e{}_t{}", e.id.0, t), VarKind::Binary, 0.0, upper);
            ix.z.insert((e.id, t), v);
        }
    }
    let e_upper = f64::from(last_week + max_tau);
    for o in &orders {
        let v = b.var(format!("e_p{}", o.id.0), VarKind::Integer, 0.0, e_upper);
        ix.e.insert(o.id, v);
    }

    // arc variables grouped by order and node
    let mut out_of: BTreeMap<(OrderId, LocationId), Vec<(u32, usize)>> = BTreeMap::new();
    let mut into: BTreeMap<(OrderId, LocationId), Vec<(u32, usize)>> = BTreeMap::new();
    for (&(p, id, t), &v) in &ix.x {
        let e = net.edge(id).expect("x edge");
        out_of.entry((p, e.origin)).or_default().push((t, v));
        into.entry((p, e.dest)).or_default().push((t + e.transit_weeks, v));
    }
    let in_transit: Vec<LocationId> =
        net.locations.iter().filter(|l| l.kind == LocationKind::InTransit).map(|l| l.id).collect();

    if variant.in_transit == InTransitMode::Inventory {
        for o in &orders {
            for &i in &in_transit {
                if !out_of.contains_key(&(o.id, i)) && !into.contains_key(&(o.id, i)) {
                    continue;
                }
                for t in 0..h {
                    let v = b.var(format!("r_n{}_p{}_t{}", i.0, o.id.0, t), VarKind::Binary, 0.0, 1.0);
                    ix.r.insert((i, o.id, t), v);
                }
            }
        }
    }
    if !strict {
        for o in &orders {
            let v = b.var(format!("eps_p{}", o.id.0), VarKind::Continuous, 0.0, f64::INFINITY);
            ix.eps.insert(o.id, v);
            let v = b.var(format!("late_p{}", o.id.0), VarKind::Continuous, 0.0, f64::INFINITY);
            ix.late.insert(o.id, v);
        }
    }
    if matches!(variant.deadline, DeadlineMode::ServiceLevel { .. }) {
        for o in &orders {
            let v = b.var(format!("ind_p{}", o.id.0), VarKind::Binary, 0.0, 1.0);
            ix.ind.insert(o.id, v);
        }
    }

    // objective
    let mut obj = Vec::new();
    for (&(p, id, _), &v) in &ix.x {
        let order = inst.order(p).expect("model order");
        obj.push((v, net.edge(id).expect("x edge").order_cost_cents(order) as f64));
    }
    for (&(id, _), &v) in &ix.z {
        obj.push((v, net.edge(id).expect("z edge").fixed_cost_cents() as f64));
    }
    let (early_w, late_w) = match variant.deadline {
        DeadlineMode::Strict => (0, 0),
        DeadlineMode::Penalized { early_weight, late_weight } | DeadlineMode::ServiceLevel { early_weight, late_weight, .. } => {
            (early_weight, late_weight)
        }
    };
    for (&p, &v) in &ix.eps {
        obj.push((v, early_w as f64));
        obj.push((ix.late[&p], late_w as f64));
    }
    obj.sort_by_key(|&(i, _)| i);
    obj.retain(|&(_, c)| c != 0.0);
    b.model.objective = obj;

    // capacity
    let mut loads: BTreeMap<(EdgeId, u32), Vec<(usize, f64)>> = BTreeMap::new();
    for (&(p, id, t), &v) in &ix.x {
        if net.edge(id).expect("x edge").capacity_kg.is_some() {
            let w = inst.order(p).expect("model order").gross_weight_kg;
            loads.entry((id, t)).or_default().push((v, f64::from(w)));
        }
    }
    for ((id, t), terms) in loads {
        let cap = net.edge(id).and_then(|e| e.capacity_kg).expect("capacitated");
        b.row(format!("cap_e{}_t{}", id.0, t), terms, Sense::Le, f64::from(cap));
    }

    for o in &orders {
        let p = o.id;
        let sum = |list: Option<&Vec<(u32, usize)>>, sign: f64| -> Vec<(usize, f64)> {
            list.map(|l| l.iter().map(|&(_, v)| (v, sign)).collect()).unwrap_or_default()
        };
        // supply and availability
        for l in net.locations.iter().filter(|l| l.kind == LocationKind::Supply) {
            let rhs = if l.id == o.origin { 1.0 } else { 0.0 };
            b.row(format!("sup_p{}_n{}", p.0, l.id.0), sum(out_of.get(&(p, l.id)), 1.0), Sense::Le, rhs);
            let early: Vec<(usize, f64)> = out_of
                .get(&(p, l.id))
                .map(|list| list.iter().filter(|&&(t, _)| t < o.ready_week).map(|&(_, v)| (v, 1.0)).collect())
                .unwrap_or_default();
            b.row(format!("avail_p{}_n{}", p.0, l.id.0), early, Sense::Eq, 0.0);
        }
        // demand
        for l in net.locations.iter().filter(|l| l.kind == LocationKind::Demand) {
            let rhs = if l.id == o.destination { 1.0 } else { 0.0 };
            b.row(format!("dem_p{}_n{}", p.0, l.id.0), sum(into.get(&(p, l.id)), 1.0), Sense::Eq, rhs);
        }
        // in-transit flow
        for &i in &in_transit {
            let outs = out_of.get(&(p, i)).cloned().unwrap_or_default();
            let ins = into.get(&(p, i)).cloned().unwrap_or_default();
            if outs.is_empty() && ins.is_empty() {
                continue;
            }
            match variant.in_transit {
                InTransitMode::Original => {
                    let rho = inst.dwell_limit_weeks;
                    for t in 0..h {
                        let departs: Vec<(usize, f64)> = outs.iter().filter(|&&(d, _)| d == t).map(|&(_, v)| (v, -1.0)).collect();
                        if !departs.is_empty() {
                            let mut terms: Vec<(usize, f64)> =
                                ins.iter().filter(|&&(a, _)| a <= t && a + rho >= t).map(|&(_, v)| (v, 1.0)).collect();
                            terms.extend(departs);
                            b.row(format!("dwin_n{}_p{}_t{}", i.0, p.0, t), terms, Sense::Ge, 0.0);
                        }
                        let arrives: Vec<(usize, f64)> = ins.iter().filter(|&&(a, _)| a == t).map(|&(_, v)| (v, -1.0)).collect();
                        if !arrives.is_empty() {
                            let mut terms: Vec<(usize, f64)> =
                                outs.iter().filter(|&&(d, _)| d >= t && d <= t + rho).map(|&(_, v)| (v, 1.0)).collect();
                            terms.extend(arrives);
                            b.row(format!("dout_n{}_p{}_t{}", i.0, p.0, t), terms, Sense::Ge, 0.0);
                        }
                    }
                    let mut terms = sum(Some(&ins), 1.0);
                    terms.extend(sum(Some(&outs), -1.0));
                    b.row(format!("bal_n{}_p{}", i.0, p.0), terms, Sense::Eq, 0.0);
                }
                InTransitMode::Inventory => {
                    for t in 0..h {
                        let mut terms: Vec<(usize, f64)> = outs.iter().filter(|&&(d, _)| d == t).map(|&(_, v)| (v, 1.0)).collect();
                        terms.push((ix.r[&(i, p, t)], 1.0));
                        if t > 0 {
                            terms.push((ix.r[&(i, p, t - 1)], -1.0));
                        }
                        terms.extend(ins.iter().filter(|&&(a, _)| a == t).map(|&(_, v)| (v, -1.0)));
                        b.row(format!("inv_n{}_p{}_t{}", i.0, p.0, t), terms, Sense::Eq, 0.0);
                    }
                    let terms = (0..h).map(|t| (ix.r[&(i, p, t)], 1.0)).collect();
                    b.row(format!("invcap_n{}_p{}", i.0, p.0), terms, Sense::Le, f64::from(inst.dwell_limit_weeks));
                }
            }
        }
        // arrival week
        let e_var = ix.e[&p];
        for (&(q, id, t), &v) in ix.x.range((p, EdgeId(0), 0)..=(p, EdgeId(u32::MAX), u32::MAX)) {
            debug_assert_eq!(q, p);
            let e = net.edge(id).expect("x edge");
            if e.dest != o.destination {
                continue;
            }
            let arrive = f64::from(t + e.transit_weeks);
            b.row(format!("arrlo_p{}_e{}_t{}", p.0, id.0, t), vec![(v, arrive), (e_var, -1.0)], Sense::Le, 0.0);
            b.row(format!("arrhi_p{}_e{}_t{}", p.0, id.0, t), vec![(v, big_m as f64), (e_var, 1.0)], Sense::Le, arrive + big_m as f64);
        }
        // deadlines
        let (lo, hi) = (f64::from(o.earliest_week), f64::from(o.latest_week));
        if strict {
            b.row(format!("ddllo_p{}", p.0), vec![(e_var, 1.0)], Sense::Ge, lo);
            b.row(format!("ddlhi_p{}", p.0), vec![(e_var, 1.0)], Sense::Le, hi);
        } else {
            b.row(format!("ddllo_p{}", p.0), vec![(e_var, 1.0), (ix.eps[&p], 1.0)], Sense::Ge, lo);
            b.row(format!("ddlhi_p{}", p.0), vec![(e_var, 1.0), (ix.late[&p], -1.0)], Sense::Le, hi);
        }
        if let DeadlineMode::ServiceLevel { gamma: Some(gamma), .. } = variant.deadline {
            b.row(format!("svcind_p{}", p.0), vec![(ix.late[&p], 1.0), (ix.ind[&p], -f64::from(gamma))], Sense::Le, 0.0);
        }
    }
    if let DeadlineMode::ServiceLevel { kappa, .. } = variant.deadline {
        let rhs = (kappa * orders.len() as f64) as u64 as f64;
        let terms = ix.ind.values().map(|&v| (v, 1.0)).collect();
        b.row(String::from("svc"), terms, Sense::Le, rhs);
    }

    // FCL usage
    for (&(p, id, t), &v) in &ix.x {
        if let Some(&z) = ix.z.get(&(id, t)) {
            b.row(format!("fcl_p{}_e{}_t{}", p.0, id.0, t), vec![(v, 1.0), (z, -1.0)], Sense::Le, 0.0);
        }
    }
    // bookings per port and week
    let mut ports: BTreeMap<(LocationId, u32), Vec<(usize, f64)>> = BTreeMap::new();
    for (&(id, t), &z) in &ix.z {
        ports.entry((net.edge(id).expect("z edge").origin, t)).or_default().push((z, 1.0));
    }
    for ((port, t), terms) in ports {
        b.row(format!("port_n{}_t{}", port.0, t), terms, Sense::Le, f64::from(inst.bookings_per_port_week));
    }
    // symmetry breaking among interchangeable units
    if variant.symmetry_breaking {
        for group in net.fcl_sibling_groups() {
            for pair in group.windows(2) {
                for t in inst.booking_lead_weeks..h {
                    let terms = vec![(ix.z[&(pair[0], t)], 1.0), (ix.z[&(pair[1], t)], -1.0)];
                    b.row(format!("sym_e{}_t{}", pair[1].0, t), terms, Sense::Ge, 0.0);
                }
            }
        }
    }

    Ok(BuiltModel { model: b.model, index: ix, variant: *variant, excluded_orders: excluded })
}

/// Variable values encoding `plan`: x, z, e, r, and the slack and indicator
/// values implied by the arrival weeks.
pub fn plan_assignment(built: &BuiltModel, inst: &Instance, plan: &ShipmentPlan) -> Result<Vec<f64>, MilpError> {
    let net = &inst.network;
    let ix = &built.index;
    let mut values = vec![0.0; built.model.variables.len()];
    for (&p, legs) in &plan.routes {
        if built.excluded_orders.contains(&p) {
            return Err(MilpError::ExcludedOrder(p));
        }
        let order = inst.order(p).ok_or(MilpError::UnknownOrder(p))?;
        let mut arrival = 0;
        for (k, leg) in legs.iter().enumerate() {
            let v = *ix
                .x
                .get(&(p, leg.edge, leg.depart_week))
                .ok_or_else(|| MilpError::Unrepresentable(format!("x for order {p} on {} in week {}", leg.edge, leg.depart_week)))?;
            if values[v] != 0.0 {
                return Err(MilpError::Unrepresentable(format!("order {p} on {} twice in week {}", leg.edge, leg.depart_week)));
            }
            values[v] = 1.0;
            let edge = net.edge(leg.edge).ok_or_else(|| MilpError::Unrepresentable(format!("edge {}", leg.edge)))?;
            if k > 0 && built.variant.in_transit == InTransitMode::Inventory {
                for t in arrival..leg.depart_week {
                    let r = *ix
                        .r
                        .get(&(edge.origin, p, t))
                        .ok_or_else(|| MilpError::Unrepresentable(format!("wait of order {p} at {} in week {t}", edge.origin)))?;
                    values[r] = 1.0;
                }
            }
            arrival = leg.depart_week + edge.transit_weeks;
        }
        if let Some(&e) = ix.e.get(&p) {
            values[e] = f64::from(arrival);
        }
        if let Some(&v) = ix.eps.get(&p) {
            values[v] = f64::from(order.earliest_week.saturating_sub(arrival));
        }
        let late = arrival.saturating_sub(order.latest_week);
        if let Some(&v) = ix.late.get(&p) {
            values[v] = f64::from(late);
        }
        if let Some(&v) = ix.ind.get(&p) {
            values[v] = if late > 0 { 1.0 } else { 0.0 };
        }
    }
    for b in &plan.bookings {
        let v = *ix
            .z
            .get(&(b.edge, b.depart_week))
            .ok_or_else(|| MilpError::Unrepresentable(format!("booking of {} in week {}", b.edge, b.depart_week)))?;
        values[v] = 1.0;
    }
    Ok(values)
}

/// Nonzero (name, value) pairs for a MIP start, after checking that the
/// assignment satisfies every row.
pub fn mip_start(built: &BuiltModel, inst: &Instance, plan: &ShipmentPlan) -> Result<Vec<(String, f64)>, MilpError> {
    let values = plan_assignment(built, inst, plan)?;
    let violated = built.model.violations(&values);
    if !violated.is_empty() {
        return Err(MilpError::Infeasible(violated));
    }
    Ok(built
        .model
        .variables
        .iter()
        .zip(&values)
        .filter(|(_, &v)| v != 0.0)
        .map(|(var, &v)| (var.name.clone(), v))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::*;
    use crate::model::{Booking, Leg};

    fn leg(edge: u32, week: u32) -> Leg {
        Leg { edge: EdgeId(edge), depart_week: week }
    }

    #[test]
    fn booking_lead_fixes_z_by_bounds() {
        let mut inst = instance(vec![order(1, 100, "0.2", 0, 8, 10)]);
        inst.horizon_weeks = 10;
        let built = build_model(&inst, &VariantConfig::default()).unwrap();
        for t in 0..10 {
            let v = &built.model.variables[built.index.z[&(EdgeId(2), t)]];
            assert_eq!(v.upper, if t < 4 { 0.0 } else { 1.0 }, "week {t}");
        }
        built.model.check().unwrap();
    }

    #[test]
    fn inventory_cap_rows() {
        let inst = instance(vec![order(1, 100, "0.2", 0, 11, 13), order(2, 100, "0.2", 1, 12, 14)]);
        let built = build_model(&inst, &VariantConfig::default()).unwrap();
        let caps: Vec<&Constraint> = built.model.constraints.iter().filter(|c| c.name.starts_with("invcap_")).collect();
        // two in-transit nodes times two orders
        assert_eq!(caps.len(), 4);
        assert!(caps.iter().all(|c| c.rhs == 2.0 && c.sense == Sense::Le));
        let counts = built.model.family_counts();
        assert_eq!(counts["inv"], 4 * 26);
        assert_eq!(counts["ddllo"], 2);
        assert!(!counts.contains_key("dwin"));
    }

    #[test]
    fn plan_rows_hold() {
        let inst = instance(vec![order(1, 100, "0.2", 0, 11, 13), order(2, 100, "0.2", 0, 11, 13)]);
        let mut plan = ShipmentPlan::default();
        plan.routes.insert(OrderId(1), vec![leg(0, 0), leg(2, 4), leg(3, 11)]);
        plan.routes.insert(OrderId(2), vec![leg(0, 1), leg(1, 3), leg(3, 10)]);
        plan.bookings.push(Booking { edge: EdgeId(2), depart_week: 4 });
        let cost = crate::cost::plan_cost(&inst, &plan).unwrap();
        for in_transit in [InTransitMode::Original, InTransitMode::Inventory] {
            for deadline in [
                DeadlineMode::Strict,
                DeadlineMode::Penalized { early_weight: 1, late_weight: 1 },
                DeadlineMode::ServiceLevel { gamma: Some(3), kappa: 0.5, early_weight: 1, late_weight: 1 },
            ] {
                let variant = VariantConfig { deadline, in_transit, symmetry_breaking: true, ..Default::default() };
                let built = build_model(&inst, &variant).unwrap();
                built.model.check().unwrap();
                let values = plan_assignment(&built, &inst, &plan).unwrap();
                assert_eq!(built.model.violations(&values), Vec::<String>::new(), "{variant:?}");
                assert_eq!(built.model.objective_value(&values), cost.total_cents as f64);
            }
        }
    }

    #[test]
    fn infeasible_plan_is_refused() {
        let inst = instance(vec![order(1, 100, "0.2", 0, 11, 13)]);
        let built = build_model(&inst, &VariantConfig { elide_hopeless: false, ..Default::default() }).unwrap();
        let mut plan = ShipmentPlan::default();
        // FCL leg without booking
        plan.routes.insert(OrderId(1), vec![leg(0, 0), leg(2, 4), leg(3, 11)]);
        match mip_start(&built, &inst, &plan) {
            Err(MilpError::Infeasible(rows)) => assert_eq!(rows, vec![String::from("fcl_p1_e2_t4")]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn variant_errors() {
        let inst = instance(vec![]);
        let sl = |gamma, kappa| VariantConfig {
            deadline: DeadlineMode::ServiceLevel { gamma, kappa, early_weight: 1, late_weight: 1 },
            ..Default::default()
        };
        assert!(matches!(build_model(&inst, &sl(None, 0.5)), Err(MilpError::Config(_))));
        assert!(matches!(build_model(&inst, &sl(Some(2), 0.0)), Err(MilpError::Config(_))));
        assert!(matches!(build_model(&inst, &VariantConfig { big_m: Some(3), ..Default::default() }), Err(MilpError::Config(_))));
        assert!(build_model(&inst, &sl(Some(2), 1.0)).is_ok());
    }

    #[test]
    fn hopeless_orders_are_excluded() {
        let inst = instance(vec![order(1, 100, "0.2", 0, 1, 1), order(2, 100, "0.2", 0, 11, 13)]);
        let built = build_model(&inst, &VariantConfig::default()).unwrap();
        assert_eq!(built.excluded_orders, vec![OrderId(1)]);
        assert!(!built.index.e.contains_key(&OrderId(1)));
    }

    #[test]
    fn rounding_helper() {
        assert_eq!(libm_round(2.4999), 2.0);
        assert_eq!(libm_round(2.5), 3.0);
        assert_eq!(libm_round(-1.6), -2.0);
    }
}
