//! Knapsack-based rolling-horizon planner.
//!
//! Each order gets a cheapest route in the air network, the ground+LCL
//! network and one ground+FCL network per FCL unit. Walking the horizon week
//! by week, the planner fills FCL units by solving one knapsack per unit,
//! where an order's value is what it saves against its cheapest feasible
//! LCL or air alternative, and books a unit when the knapsack value beats the
//! fixed charge. A look-ahead postpones a booking while later weeks promise
//! more. Orders left over ship by LCL or air.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use crate::cost::{plan_cost, CostBreakdown, CostError};
use crate::knapsack::{knapsack, Item, KnapsackResult};
use crate::model::{Booking, EdgeId, Instance, Leg, LocationId, ModeClass, ModelError, OrderId, ProductOrder, ShipmentPlan};
use crate::paths::{cheapest_route, InducedNetwork, PricedRoute};

/// Inclusive range of departure weeks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct WeekWindow {
    pub first: u32,
    pub last: u32,
}

impl WeekWindow {
    pub fn new(first: i64, last: i64) -> Option<Self> {
        (first <= last && last >= 0).then(|| WeekWindow { first: first.max(0) as u32, last: last as u32 })
    }

    pub fn contains(&self, week: u32) -> bool {
        (self.first..=self.last).contains(&week)
    }

    /// Number of weeks in the window.
    pub fn width(&self) -> u32 {
        self.last - self.first + 1
    }
}

/// Departure windows of the air leg and of the ocean leg (LCL or FCL).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TimeRanges {
    pub air: Option<WeekWindow>,
    pub lcl: Option<WeekWindow>,
    pub fcl: Option<WeekWindow>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum HeuristicError {
    #[error(transparent)]
    Instance(#[from] ModelError),
    #[error("{0} transit times differ across edges; use per-route windows")]
    NonUniformTransit(ModeClass),
    #[error("ground edge {0} is capacitated, which the planner does not support")]
    CapacitatedGround(EdgeId),
    #[error(transparent)]
    Cost(#[from] CostError),
}

fn uniform_transit(inst: &Instance, class: ModeClass) -> Result<Option<u32>, HeuristicError> {
    let mut it = inst.network.edges_of(class).map(|e| e.transit_weeks);
    let first = it.next();
    match first {
        Some(t) if it.all(|u| u == t) => Ok(Some(t)),
        Some(_) => Err(HeuristicError::NonUniformTransit(class)),
        None => Ok(None),
    }
}

/// Closed-form windows for networks with one transit time per mode family.
///
/// Upper bounds are trimmed so that every leg of the route departs inside
/// the horizon.
pub fn time_ranges(inst: &Instance, order: &ProductOrder) -> Result<TimeRanges, HeuristicError> {
    let air_t = uniform_transit(inst, ModeClass::Air)?;
    let ground_t = uniform_transit(inst, ModeClass::Ground)?.unwrap_or(0);
    let lcl_t = uniform_transit(inst, ModeClass::Lcl)?;
    let fcl_t = uniform_transit(inst, ModeClass::Fcl)?;
    let h = i64::from(inst.horizon_weeks);
    let a = i64::from(order.ready_week);
    let lo = i64::from(order.earliest_week);
    let hi = i64::from(order.latest_week);
    let rho = i64::from(inst.dwell_limit_weeks);
    let g = i64::from(ground_t);

    let air = air_t.and_then(|t| {
        let t = i64::from(t);
        WeekWindow::new(a.max(lo - t), (hi - t).min(h - 1))
    });
    let ocean = |t: Option<u32>, lead: i64| {
        t.and_then(|t| {
            let t = i64::from(t);
            if lo - g > h - 1 {
                return None;
            }
            WeekWindow::new((a + g).max(lo - t - g - rho).max(lead), (hi - t - g).min(h - 1 - t))
        })
    };
    Ok(TimeRanges {
        air,
        lcl: ocean(lcl_t, 0),
        fcl: ocean(fcl_t, i64::from(inst.booking_lead_weeks)),
    })
}

/// Cheapest routes of one order in every induced network.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RouteCosts {
    pub air: Option<PricedRoute>,
    pub lcl: Option<PricedRoute>,
    /// FCL variable costs only; fixed charges are excluded.
    pub fcl: BTreeMap<EdgeId, PricedRoute>,
}

impl RouteCosts {
    pub fn is_unreachable(&self) -> bool {
        self.air.is_none() && self.lcl.is_none() && self.fcl.is_empty()
    }
}

pub fn route_costs(inst: &Instance, order: &ProductOrder) -> RouteCosts {
    let net = &inst.network;
    RouteCosts {
        air: cheapest_route(net, order, InducedNetwork::Air),
        lcl: cheapest_route(net, order, InducedNetwork::Lcl),
        fcl: net
            .fcl_edges()
            .filter_map(|e| cheapest_route(net, order, InducedNetwork::Fcl(e.id)).map(|r| (e.id, r)))
            .collect(),
    }
}

/// Savings in whole dollars of shipping FCL instead of the alternative,
/// or `None` when there are none (such orders stay out of the knapsack).
pub fn item_value(alternative_cents: Option<u64>, fcl_cents: u64) -> Option<u64> {
    let alt = alternative_cents?;
    let v = alt.checked_sub(fcl_cents)? / 100;
    (v > 0).then_some(v)
}

/// Legs of `route` when its anchor edge departs in `week`.
///
/// Legs before the anchor are chained backwards without idling. After the
/// anchor the order waits at the port just long enough to not arrive before
/// its earliest week. Returns `None` when the timing breaks availability,
/// dwell, deadline, horizon or booking-lead rules.
pub fn route_legs(inst: &Instance, order: &ProductOrder, edges: &[EdgeId], anchor: usize, week: u32) -> Option<Vec<Leg>> {
    let net = &inst.network;
    let transit = |i: usize| net.edge(edges[i]).map(|e| e.transit_weeks).unwrap_or(0);
    let pre: u32 = (0..anchor).map(transit).sum();
    let post: u32 = (anchor + 1..edges.len()).map(transit).sum();
    let mut depart = week.checked_sub(pre)?;
    if depart < order.ready_week {
        return None;
    }
    let mut legs = Vec::with_capacity(edges.len());
    for (i, &e) in edges.iter().enumerate() {
        if i == anchor + 1 {
            let arrive = week + transit(anchor);
            depart = arrive.max(order.earliest_week.saturating_sub(post));
            if depart - arrive > inst.dwell_limit_weeks {
                return None;
            }
        }
        if depart >= inst.horizon_weeks {
            return None;
        }
        let edge = net.edge(e)?;
        if edge.is_fcl() && depart < inst.booking_lead_weeks {
            return None;
        }
        legs.push(Leg { edge: e, depart_week: depart });
        depart += edge.transit_weeks;
    }
    (order.earliest_week..=order.latest_week).contains(&depart).then_some(legs)
}

/// Index of the first non-ground edge of a route.
fn anchor_of(inst: &Instance, edges: &[EdgeId]) -> usize {
    edges
        .iter()
        .position(|&e| inst.network.edge(e).is_some_and(|e| e.class() != ModeClass::Ground))
        .unwrap_or(0)
}

/// Anchor departure weeks for which [`route_legs`] succeeds.
pub fn route_window(inst: &Instance, order: &ProductOrder, edges: &[EdgeId]) -> Option<WeekWindow> {
    let anchor = anchor_of(inst, edges);
    let mut feasible = (0..inst.horizon_weeks).filter(|&t| route_legs(inst, order, edges, anchor, t).is_some());
    let first = feasible.next()?;
    let last = feasible.last().unwrap_or(first);
    Some(WeekWindow { first, last })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FallbackDeparture {
    #[default]
    Latest,
    Earliest,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct HeuristicConfig {
    pub fallback_departure: FallbackDeparture,
}

/// One knapsack instance of a batch.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct KnapsackJob {
    pub items: Vec<Item>,
    pub capacity_kg: u32,
}

/// Runs batches of independent knapsacks. Implementations must return the
/// results in job order and agree exactly with [`knapsack`].
pub trait KnapsackExecutor {
    fn solve_all(&self, jobs: &[KnapsackJob]) -> Vec<KnapsackResult>;
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Sequential;

impl KnapsackExecutor for Sequential {
    fn solve_all(&self, jobs: &[KnapsackJob]) -> Vec<KnapsackResult> {
        jobs.iter().map(|j| knapsack(&j.items, j.capacity_kg)).collect()
    }
}

/// One committed FCL booking and its contents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Commit {
    pub booking: Booking,
    pub orders: Vec<OrderId>,
    /// Knapsack value in dollars when the booking was committed.
    pub value_dollars: u64,
    /// Week of the sweep that triggered the booking.
    pub decided_at: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeuristicOutcome {
    pub plan: ShipmentPlan,
    pub cost: CostBreakdown,
    /// Orders without any feasible LCL or air alternative; left out of the plan.
    pub unservable: Vec<OrderId>,
    pub commits: Vec<Commit>,
}

struct FclCandidate {
    order: usize,
    window: WeekWindow,
    value: u64,
    route: Vec<EdgeId>,
}

struct Fallback {
    cost: u64,
    route: Vec<EdgeId>,
    window: WeekWindow,
}

struct Unit {
    edge: EdgeId,
    port: LocationId,
    key: (LocationId, LocationId, u32),
    capacity: u32,
    fixed: u64,
    candidates: Vec<FclCandidate>,
}

struct Planner<'a, E: ?Sized> {
    inst: &'a Instance,
    exec: &'a E,
    units: Vec<Unit>,
    committed: Vec<bool>,
    booked: BTreeSet<(EdgeId, u32)>,
    port_count: BTreeMap<(LocationId, u32), u32>,
    cache: BTreeMap<KnapsackJob, KnapsackResult>,
}

/// Best container of one week: (net value in cents, unit index, selection).
type Choice = (i64, usize, KnapsackResult);

impl<E: KnapsackExecutor + ?Sized> Planner<'_, E> {
    fn available(&self, u: usize, week: u32) -> bool {
        let unit = &self.units[u];
        !self.booked.contains(&(unit.edge, week))
            && self.port_count.get(&(unit.port, week)).copied().unwrap_or(0) < self.inst.bookings_per_port_week
    }

    fn job(&self, u: usize, week: u32) -> KnapsackJob {
        let unit = &self.units[u];
        let items = unit
            .candidates
            .iter()
            .filter(|c| !self.committed[c.order] && c.window.contains(week))
            .map(|c| Item { id: self.inst.orders[c.order].id, weight_kg: self.inst.orders[c.order].gross_weight_kg, value: c.value })
            .collect();
        KnapsackJob { items, capacity_kg: unit.capacity }
    }

    /// Knapsack of every available unit in `week`, in unit order.
    fn evaluate(&mut self, week: u32) -> Vec<(usize, KnapsackResult)> {
        let units: Vec<usize> = (0..self.units.len()).filter(|&u| self.available(u, week)).collect();
        let jobs: Vec<KnapsackJob> = units.iter().map(|&u| self.job(u, week)).collect();
        let missing: Vec<KnapsackJob> = jobs
            .iter()
            .filter(|j| !self.cache.contains_key(*j))
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        if !missing.is_empty() {
            let results = self.exec.solve_all(&missing);
            self.cache.extend(missing.into_iter().zip(results));
        }
        units.into_iter().zip(jobs).map(|(u, j)| (u, self.cache[&j].clone())).collect()
    }

    /// Highest adjusted net value in `week`; `penalty` returns the cents lost
    /// when a unit is chosen in this week instead of the original candidate.
    fn best(&mut self, week: u32, penalty: impl Fn(usize) -> i64) -> Option<Choice> {
        let mut best: Option<Choice> = None;
        for (u, res) in self.evaluate(week) {
            let net = res.value as i64 * 100 - self.units[u].fixed as i64 - penalty(u);
            let better = match &best {
                None => true,
                Some((bn, bu, _)) => net > *bn || (net == *bn && self.units[u].key < self.units[*bu].key),
            };
            if better {
                best = Some((net, u, res));
            }
        }
        best
    }

    fn run(&mut self, sweep_end: u32) -> Vec<(u32, u32, usize, KnapsackResult)> {
        let mut out = Vec::new();
        let mut t = self.inst.booking_lead_weeks;
        while t <= sweep_end {
            let Some((net0, u0, sel0)) = self.best(t, |_| 0) else {
                t += 1;
                continue;
            };
            if net0 <= 0 {
                t += 1;
                continue;
            }
            // Values of the week-t selection, for orders that drop out later.
            let lost: Vec<(usize, u64)> = sel0
                .selected
                .iter()
                .map(|id| {
                    let c = self.units[u0].candidates.iter().find(|c| self.inst.orders[c.order].id == *id).expect("selected candidate");
                    (c.order, c.value)
                })
                .collect();
            let (mut week, mut unit, mut sel, mut prev) = (t, u0, sel0, net0);
            let mut s = t + 1;
            while s <= sweep_end {
                let units = &self.units;
                let penalty = |u: usize| {
                    lost.iter()
                        .filter(|&&(o, _)| !units[u].candidates.iter().any(|c| c.order == o && c.window.contains(s)))
                        .map(|&(_, v)| v as i64 * 100)
                        .sum::<i64>()
                };
                let penalties: Vec<i64> = (0..units.len()).map(penalty).collect();
                match self.best(s, |u| penalties[u]) {
                    Some((net, u, res)) if net > prev => {
                        (week, unit, sel, prev) = (s, u, res, net);
                        s += 1;
                    }
                    _ => break,
                }
            }
            let edge = self.units[unit].edge;
            self.booked.insert((edge, week));
            *self.port_count.entry((self.units[unit].port, week)).or_default() += 1;
            for id in &sel.selected {
                let c = self.units[unit].candidates.iter().find(|c| self.inst.orders[c.order].id == *id).expect("selected candidate");
                self.committed[c.order] = true;
            }
            out.push((t, week, unit, sel));
        }
        out
    }
}

/// Runs the planner with default settings on one thread.
pub fn plan(inst: &Instance) -> Result<HeuristicOutcome, HeuristicError> {
    plan_with(inst, &HeuristicConfig::default(), &Sequential)
}

pub fn plan_with<E: KnapsackExecutor + ?Sized>(
    inst: &Instance,
    config: &HeuristicConfig,
    exec: &E,
) -> Result<HeuristicOutcome, HeuristicError> {
    inst.check()?;
    let net = &inst.network;
    if let Some(e) = net.edges_of(ModeClass::Ground).find(|e| e.capacity_kg.is_some()) {
        return Err(HeuristicError::CapacitatedGround(e.id));
    }

    let mut units: Vec<Unit> = net
        .fcl_edges()
        .map(|e| Unit {
            edge: e.id,
            port: e.origin,
            key: (e.origin, e.dest, e.mode.container_index.unwrap_or(0)),
            capacity: e.capacity_kg.unwrap_or(u32::MAX),
            fixed: e.fixed_cost_cents(),
            candidates: Vec::new(),
        })
        .collect();
    let unit_of: BTreeMap<EdgeId, usize> = units.iter().enumerate().map(|(i, u)| (u.edge, i)).collect();

    let mut fallbacks: Vec<Option<Fallback>> = Vec::with_capacity(inst.orders.len());
    for (oi, order) in inst.orders.iter().enumerate() {
        let rc = route_costs(inst, order);
        let feasible = |r: &Option<PricedRoute>| {
            r.as_ref().and_then(|r| route_window(inst, order, &r.edges).map(|w| Fallback { cost: r.cost_cents, route: r.edges.clone(), window: w }))
        };
        let lcl = feasible(&rc.lcl);
        let air = feasible(&rc.air);
        let best = match (lcl, air) {
            (Some(l), Some(a)) => Some(if a.cost < l.cost { a } else { l }),
            (l, a) => l.or(a),
        };
        let alt = best.as_ref().map(|f| f.cost);
        for (edge, r) in rc.fcl {
            let (Some(v), Some(w)) = (item_value(alt, r.cost_cents), route_window(inst, order, &r.edges)) else {
                continue;
            };
            if order.gross_weight_kg <= units[unit_of[&edge]].capacity {
                units[unit_of[&edge]].candidates.push(FclCandidate { order: oi, window: w, value: v, route: r.edges });
            }
        }
        fallbacks.push(best);
    }

    let min_transit = |class| net.edges_of(class).map(|e| e.transit_weeks).min();
    let sweep_end = match min_transit(ModeClass::Fcl) {
        Some(ocean) => {
            let end = inst.horizon_weeks.saturating_sub(ocean + min_transit(ModeClass::Ground).unwrap_or(0));
            end.min(inst.horizon_weeks - 1)
        }
        None => 0,
    };

    let mut planner = Planner {
        inst,
        exec,
        units,
        committed: vec![false; inst.orders.len()],
        booked: BTreeSet::new(),
        port_count: BTreeMap::new(),
        cache: BTreeMap::new(),
    };
    let decisions = if planner.units.is_empty() { Vec::new() } else { planner.run(sweep_end) };

    let mut plan = ShipmentPlan::default();
    let mut commits = Vec::new();
    for (decided_at, week, u, sel) in decisions {
        let unit = &planner.units[u];
        for id in &sel.selected {
            let c = unit.candidates.iter().find(|c| inst.orders[c.order].id == *id).expect("selected candidate");
            let order = &inst.orders[c.order];
            let legs = route_legs(inst, order, &c.route, anchor_of(inst, &c.route), week).expect("week inside window");
            plan.routes.insert(order.id, legs);
        }
        let booking = Booking { edge: unit.edge, depart_week: week };
        plan.bookings.push(booking);
        commits.push(Commit { booking, orders: sel.selected, value_dollars: sel.value, decided_at });
    }
    plan.bookings.sort();

    let mut unservable = Vec::new();
    for (oi, order) in inst.orders.iter().enumerate() {
        if planner.committed[oi] {
            continue;
        }
        match &fallbacks[oi] {
            Some(f) => {
                let week = match config.fallback_departure {
                    FallbackDeparture::Latest => f.window.last,
                    FallbackDeparture::Earliest => f.window.first,
                };
                let legs = route_legs(inst, order, &f.route, anchor_of(inst, &f.route), week).expect("week inside window");
                plan.routes.insert(order.id, legs);
            }
            None => unservable.push(order.id),
        }
    }
    let cost = plan_cost(inst, &plan)?;
    Ok(HeuristicOutcome { plan, cost, unservable, commits })
}
