//! Exhaustive exact search for desk-scale instances.
//!
//! Every order gets the complete list of its individually feasible
//! (route, timing) options. A depth-first search then picks one option per
//! order, enforcing shared FCL capacity, the booking lead and the port cap,
//! and charging each booking's fixed cost once.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::cost::{plan_cost, CostBreakdown, CostError};
use crate::model::{Booking, EdgeId, Instance, Leg, LocationId, LocationKind, ModeClass, ModelError, OrderId, ProductOrder, ShipmentPlan};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OptionCaps {
    pub max_legs: usize,
}

impl Default for OptionCaps {
    fn default() -> Self {
        OptionCaps { max_legs: 3 }
    }
}

/// One feasible (route, timing) choice for one order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoutingOption {
    /// Position in the enumeration order of the order's options.
    pub id: u32,
    pub order: OrderId,
    pub legs: Vec<Leg>,
    pub class: ModeClass,
    /// Leg costs without FCL fixed charges.
    pub cost_cents: u64,
    /// FCL (edge, week) pairs this option rides on.
    pub bookings: Vec<Booking>,
    /// Capacitated (edge, week) pairs this option loads, FCL included.
    pub loads: Vec<Booking>,
}

/// All feasible options of `order`, in path-then-timing order.
///
/// Paths are simple, pass only through in-transit nodes and have at most
/// `caps.max_legs` legs. Timings cover every first departure from the ready
/// week on and every dwell in `[0, ρ]`; a timing is kept when all legs
/// depart inside the horizon, FCL legs respect the booking lead, the order
/// fits every capacitated leg on its own, and the arrival meets the window.
pub fn enumerate_options(inst: &Instance, order: &ProductOrder, caps: OptionCaps) -> Vec<RoutingOption> {
    let mut paths = Vec::new();
    let adj = inst.network.adjacency();
    let mut visited = vec![false; inst.network.locations.len()];
    let mut stack = Vec::new();
    visited[order.origin.index()] = true;
    simple_paths(inst, &adj, order, order.origin, caps.max_legs, &mut visited, &mut stack, &mut paths);

    let mut out = Vec::new();
    for path in paths {
        let mut legs = Vec::with_capacity(path.len());
        timings(inst, order, &path, order.ready_week, &mut legs, &mut |legs: &[Leg]| {
            let net = &inst.network;
            let edges = legs.iter().map(|l| net.edge(l.edge).expect("edge from adjacency"));
            let cost_cents = edges.clone().map(|e| e.order_cost_cents(order)).sum();
            let at = |pred: fn(&crate::model::Edge) -> bool| {
                legs.iter()
                    .filter(|l| pred(net.edge(l.edge).expect("edge from adjacency")))
                    .map(|l| Booking { edge: l.edge, depart_week: l.depart_week })
                    .collect::<Vec<_>>()
            };
            out.push(RoutingOption {
                id: out.len() as u32,
                order: order.id,
                legs: legs.to_vec(),
                class: ShipmentPlan::route_class(net, legs).expect("nonempty route"),
                cost_cents,
                bookings: at(|e| e.is_fcl()),
                loads: at(|e| e.capacity_kg.is_some()),
            });
        });
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn simple_paths(
    inst: &Instance,
    adj: &[Vec<EdgeId>],
    order: &ProductOrder,
    at: LocationId,
    budget: usize,
    visited: &mut [bool],
    stack: &mut Vec<EdgeId>,
    out: &mut Vec<Vec<EdgeId>>,
) {
    if budget == 0 {
        return;
    }
    for &e in &adj[at.index()] {
        let edge = inst.network.edge(e).expect("adjacency");
        let next = edge.dest;
        if visited[next.index()] {
            continue;
        }
        if edge.capacity_kg.is_some_and(|c| order.gross_weight_kg > c) {
            continue;
        }
        stack.push(e);
        if next == order.destination {
            out.push(stack.clone());
        } else if inst.network.kind(next) == Some(LocationKind::InTransit) {
            visited[next.index()] = true;
            simple_paths(inst, adj, order, next, budget - 1, visited, stack, out);
            visited[next.index()] = false;
        }
        stack.pop();
    }
}

fn timings(inst: &Instance, order: &ProductOrder, path: &[EdgeId], from: u32, legs: &mut Vec<Leg>, emit: &mut dyn FnMut(&[Leg])) {
    let i = legs.len();
    if i == path.len() {
        let arrival = from;
        if (order.earliest_week..=order.latest_week).contains(&arrival) {
            emit(legs);
        }
        return;
    }
    let edge = inst.network.edge(path[i]).expect("path edge");
    let last = if i == 0 { inst.horizon_weeks.saturating_sub(1) } else { from + inst.dwell_limit_weeks };
    for week in from..=last.min(inst.horizon_weeks.saturating_sub(1)) {
        if edge.is_fcl() && week < inst.booking_lead_weeks {
            continue;
        }
        if week + edge.transit_weeks > order.latest_week {
            break;
        }
        legs.push(Leg { edge: path[i], depart_week: week });
        timings(inst, order, path, week + edge.transit_weeks, legs, emit);
        legs.pop();
    }
}

/// Size limits beyond which [`solve_exact`] refuses to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExactLimits {
    pub max_orders: usize,
    pub max_weeks: u32,
    /// Parallel FCL units per port pair.
    pub max_fcl_slots: u32,
}

impl Default for ExactLimits {
    fn default() -> Self {
        ExactLimits { max_orders: 6, max_weeks: 14, max_fcl_slots: 3 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error(transparent)]
    Instance(#[from] ModelError),
    #[error("instance exceeds oracle limits: {0}")]
    LimitsExceeded(String),
    #[error("no joint assignment satisfies capacity and booking limits")]
    Infeasible,
    #[error(transparent)]
    Cost(#[from] CostError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactOutcome {
    pub plan: ShipmentPlan,
    pub cost: CostBreakdown,
    /// Orders without a single feasible option; left out of the plan.
    pub unservable: Vec<OrderId>,
    /// Search nodes visited.
    pub nodes: u64,
}

/// Checks `inst` against `limits` without solving.
pub fn check_limits(inst: &Instance, limits: &ExactLimits) -> Result<(), OracleError> {
    if inst.orders.len() > limits.max_orders {
        return Err(OracleError::LimitsExceeded(format!("{} orders > {}", inst.orders.len(), limits.max_orders)));
    }
    if inst.horizon_weeks > limits.max_weeks {
        return Err(OracleError::LimitsExceeded(format!("{} weeks > {}", inst.horizon_weeks, limits.max_weeks)));
    }
    let mut per_pair: BTreeMap<(LocationId, LocationId), u32> = BTreeMap::new();
    for e in inst.network.fcl_edges() {
        *per_pair.entry((e.origin, e.dest)).or_default() += 1;
    }
    if let Some((&(o, d), &n)) = per_pair.iter().find(|(_, &n)| n > limits.max_fcl_slots) {
        return Err(OracleError::LimitsExceeded(format!("{n} FCL units between {o} and {d} > {}", limits.max_fcl_slots)));
    }
    Ok(())
}

struct Search<'a> {
    inst: &'a Instance,
    weights: Vec<u64>,
    options: Vec<Vec<RoutingOption>>,
    /// Previous sibling of every FCL edge, if any.
    prev_sibling: BTreeMap<EdgeId, EdgeId>,
    load: BTreeMap<Booking, u64>,
    open: BTreeMap<Booking, ()>,
    port: BTreeMap<(LocationId, u32), u32>,
    chosen: Vec<usize>,
    best: u64,
    best_choice: Option<Vec<usize>>,
    nodes: u64,
}

impl Search<'_> {
    fn edge(&self, id: EdgeId) -> &crate::model::Edge {
        self.inst.network.edge(id).expect("option edge")
    }

    /// Lower bound on the remaining cost, scaled by the number `k` of
    /// remaining orders: a new booking serves at most `k` of them, so each
    /// order opening one is charged at least a `1/k` share of its fixed cost.
    fn bound_scaled(&self, depth: usize) -> u128 {
        let k = (self.options.len() - depth) as u128;
        self.options[depth..]
            .iter()
            .map(|opts| {
                opts.iter()
                    .map(|o| {
                        let share = o
                            .bookings
                            .iter()
                            .filter(|b| !self.open.contains_key(b))
                            .map(|b| u128::from(self.edge(b.edge).fixed_cost_cents()))
                            .min()
                            .unwrap_or(0);
                        u128::from(o.cost_cents) * k + share
                    })
                    .min()
                    .unwrap_or(u128::MAX / 16)
            })
            .sum()
    }

    fn admissible(&self, o: &RoutingOption, weight: u64) -> bool {
        for l in &o.loads {
            let cap = self.edge(l.edge).capacity_kg.map_or(u64::MAX, u64::from);
            if self.load.get(l).copied().unwrap_or(0) + weight > cap {
                return false;
            }
        }
        let mut extra: BTreeMap<(LocationId, u32), u32> = BTreeMap::new();
        for b in &o.bookings {
            if self.open.contains_key(b) {
                continue;
            }
            if let Some(prev) = self.prev_sibling.get(&b.edge) {
                if !self.open.contains_key(&Booking { edge: *prev, depart_week: b.depart_week }) {
                    return false;
                }
            }
            let key = (self.edge(b.edge).origin, b.depart_week);
            let n = extra.entry(key).or_default();
            *n += 1;
            if self.port.get(&key).copied().unwrap_or(0) + *n > self.inst.bookings_per_port_week {
                return false;
            }
        }
        true
    }

    fn dfs(&mut self, depth: usize, partial: u64) {
        self.nodes += 1;
        if depth == self.options.len() {
            if partial < self.best {
                self.best = partial;
                self.best_choice = Some(self.chosen.clone());
            }
            return;
        }
        let k = (self.options.len() - depth) as u128;
        if u128::from(partial) * k + self.bound_scaled(depth) >= u128::from(self.best) * k {
            return;
        }
        let weight = self.weights[depth];
        for i in 0..self.options[depth].len() {
            let o = &self.options[depth][i];
            if partial + o.cost_cents >= self.best || !self.admissible(o, weight) {
                continue;
            }
            let loads = o.loads.clone();
            let new: Vec<Booking> = o.bookings.iter().filter(|b| !self.open.contains_key(b)).copied().collect();
            let mut step = o.cost_cents;
            for l in &loads {
                *self.load.entry(*l).or_default() += weight;
            }
            for b in &new {
                step += self.edge(b.edge).fixed_cost_cents();
                self.open.insert(*b, ());
                *self.port.entry((self.edge(b.edge).origin, b.depart_week)).or_default() += 1;
            }
            self.chosen.push(i);
            self.dfs(depth + 1, partial + step);
            self.chosen.pop();
            for b in &new {
                self.open.remove(b);
                let key = (self.edge(b.edge).origin, b.depart_week);
                *self.port.get_mut(&key).expect("port count") -= 1;
            }
            for l in &loads {
                *self.load.get_mut(l).expect("load") -= weight;
            }
        }
    }
}

/// Options that share a capacity and booking footprint are interchangeable
/// for the joint constraints, so only the cheapest of each is kept.
fn reduce(options: Vec<RoutingOption>) -> Vec<RoutingOption> {
    let mut best: BTreeMap<(Vec<Booking>, Vec<Booking>), RoutingOption> = BTreeMap::new();
    for o in options {
        let key = (o.bookings.clone(), o.loads.clone());
        match best.get(&key) {
            Some(cur) if (cur.cost_cents, cur.id) <= (o.cost_cents, o.id) => {}
            _ => {
                best.insert(key, o);
            }
        }
    }
    let mut out: Vec<RoutingOption> = best.into_values().collect();
    out.sort_by_key(|o| (o.cost_cents, o.id));
    out
}

/// Minimum-cost plan by exhaustive search.
///
/// Orders are branched heaviest first; options in (cost, id) order. Among
/// interchangeable FCL units (same lane, capacity and cost) a unit may only
/// be opened in a week once its lower-indexed sibling is open, which removes
/// relabelled duplicates without losing any optimal cost.
pub fn solve_exact(inst: &Instance, limits: &ExactLimits) -> Result<ExactOutcome, OracleError> {
    inst.check()?;
    check_limits(inst, limits)?;
    let mut unservable = Vec::new();
    let mut entries: Vec<(u64, OrderId, Vec<RoutingOption>)> = Vec::new();
    for order in &inst.orders {
        let opts = enumerate_options(inst, order, OptionCaps::default());
        if opts.is_empty() {
            unservable.push(order.id);
        } else {
            entries.push((u64::from(order.gross_weight_kg), order.id, reduce(opts)));
        }
    }
    entries.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));

    let mut prev_sibling = BTreeMap::new();
    for group in inst.network.fcl_sibling_groups() {
        for pair in group.windows(2) {
            prev_sibling.insert(pair[1], pair[0]);
        }
    }
    let mut search = Search {
        inst,
        weights: entries.iter().map(|e| e.0).collect(),
        options: entries.into_iter().map(|e| e.2).collect(),
        prev_sibling,
        load: BTreeMap::new(),
        open: BTreeMap::new(),
        port: BTreeMap::new(),
        chosen: Vec::new(),
        best: u64::MAX,
        best_choice: None,
        nodes: 0,
    };
    search.dfs(0, 0);
    let choice = search.best_choice.clone().ok_or(OracleError::Infeasible)?;

    let mut plan = ShipmentPlan::default();
    for (opts, &i) in search.options.iter().zip(&choice) {
        let o = &opts[i];
        plan.routes.insert(o.order, o.legs.clone());
        plan.bookings.extend(o.bookings.iter().copied());
    }
    plan.bookings.sort();
    plan.bookings.dedup();
    let cost = plan_cost(inst, &plan)?;
    debug_assert_eq!(cost.total_cents, search.best);
    Ok(ExactOutcome { plan, cost, unservable, nodes: search.nodes })
}
