//! Exhaustive comparison of validator-accepted plans against integral points
//! of the model rows, on micro instances small enough to enumerate both sides.

use std::collections::BTreeSet;

use freightplan_core::milp::{build_model, InTransitMode, ModelDescription, Sense, VarKind, VariantConfig};
use freightplan_core::model::CostSpec;
use freightplan_core::{
    validate_plan, Booking, Edge, EdgeId, Fixed4, Instance, Leg, Location, LocationId, LocationKind, Network, OrderId, ProductOrder,
    ShipmentPlan, TransportMode, SCHEMA_VERSION,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Every integral point of `model`, by branching with bound propagation over
/// the rows.
fn feasible_points(model: &ModelDescription) -> Vec<Vec<i64>> {
    let n = model.variables.len();
    let domain: Vec<(i64, i64)> = model
        .variables
        .iter()
        .map(|v| {
            assert_ne!(v.kind, VarKind::Continuous);
            (v.lower.ceil() as i64, v.upper.floor() as i64)
        })
        .collect();
    let mut rows_of: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (r, c) in model.constraints.iter().enumerate() {
        for &(j, _) in &c.coefficients {
            rows_of[j].push(r);
        }
    }
    let mut out = Vec::new();
    let all: Vec<usize> = (0..model.constraints.len()).collect();
    let mut dom = domain;
    if propagate(model, &rows_of, &mut dom, all) {
        branch(model, &rows_of, dom, &mut out);
    }
    out
}

fn branch(model: &ModelDescription, rows_of: &[Vec<usize>], dom: Vec<(i64, i64)>, out: &mut Vec<Vec<i64>>) {
    let Some(j) = dom.iter().position(|&(l, h)| l < h) else {
        out.push(dom.iter().map(|&(l, _)| l).collect());
        return;
    };
    for v in dom[j].0..=dom[j].1 {
        let mut d = dom.clone();
        d[j] = (v, v);
        if propagate(model, rows_of, &mut d, rows_of[j].clone()) {
            branch(model, rows_of, d, out);
        }
    }
}

/// Tightens `dom` against every row reachable from `queue`; false once a row
/// cannot hold.
fn propagate(model: &ModelDescription, rows_of: &[Vec<usize>], dom: &mut [(i64, i64)], queue: Vec<usize>) -> bool {
    let mut queue: std::collections::VecDeque<usize> = queue.into();
    let mut queued = vec![false; model.constraints.len()];
    for &r in &queue {
        queued[r] = true;
    }
    while let Some(r) = queue.pop_front() {
        queued[r] = false;
        let c = &model.constraints[r];
        let sides: &[f64] = match c.sense {
            Sense::Le => &[1.0],
            Sense::Ge => &[-1.0],
            Sense::Eq => &[1.0, -1.0],
        };
        for &s in sides {
            // s * row <= s * rhs
            let min_act: f64 = c.coefficients.iter().map(|&(j, a)| (s * a * dom[j].0 as f64).min(s * a * dom[j].1 as f64)).sum();
            let slack = s * c.rhs - min_act;
            if slack < -1e-9 {
                return false;
            }
            for &(j, a) in &c.coefficients {
                let a = s * a;
                let (lo, hi) = dom[j];
                let new = if a > 0.0 {
                    (lo, hi.min((lo as f64 + slack / a + 1e-9).floor() as i64))
                } else {
                    (lo.max((hi as f64 + slack / a - 1e-9).ceil() as i64), hi)
                };
                if new != dom[j] {
                    if new.0 > new.1 {
                        return false;
                    }
                    dom[j] = new;
                    for &q in &rows_of[j] {
                        if !queued[q] {
                            queued[q] = true;
                            queue.push_back(q);
                        }
                    }
                }
            }
        }
    }
    true
}

pub fn micro(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let horizon = rng.gen_range(5..=8);
    let cap = 1000;
    let loc = |id: u32, kind, label: &str| Location { id: LocationId(id), kind, label: label.into() };
    let locations = vec![
        loc(0, LocationKind::Supply, "origin"),
        loc(1, LocationKind::InTransit, "export"),
        loc(2, LocationKind::InTransit, "import"),
        loc(3, LocationKind::Demand, "plant"),
    ];
    let mut edges = Vec::new();
    let mut add = |o: u32, d: u32, mode, transit, capacity_kg, cost| {
        edges.push(Edge { id: EdgeId(edges.len() as u32), origin: LocationId(o), dest: LocationId(d), mode, transit_weeks: transit, capacity_kg, cost });
    };
    add(0, 1, TransportMode::GROUND, 1, None, CostSpec::PerKg { rate_cents_per_kg: 10 });
    add(1, 2, TransportMode::LCL, 2, None, CostSpec::Lcl { bunker_cents: 100, rate_cents_per_cbm: 500 });
    let units = rng.gen_range(1..=2);
    for k in 1..=units {
        add(1, 2, TransportMode::fcl(k), 2, Some(cap), CostSpec::Fcl { fixed_cost_cents: 5000, variable_cents_per_order: 0 });
    }
    add(2, 3, TransportMode::GROUND, 1, None, CostSpec::PerKg { rate_cents_per_kg: 5 });
    add(0, 3, TransportMode::AIR, 2, None, CostSpec::PerKg { rate_cents_per_kg: 100 });
    let n_orders = rng.gen_range(1..=3);
    let orders = (1..=n_orders)
        .map(|i| {
            let ready = rng.gen_range(0..2);
            let earliest = rng.gen_range(ready + 2..horizon);
            let kg = rng.gen_range(300..=800);
            ProductOrder {
                id: OrderId(i),
                origin: LocationId(0),
                destination: LocationId(3),
                gross_weight_kg: kg,
                volume_cbm: Fixed4::from_int(1),
                air_charge_weight_kg: Fixed4::from_int(u64::from(kg)),
                ready_week: ready,
                earliest_week: earliest,
                latest_week: earliest + rng.gen_range(0..=1),
            }
        })
        .collect();
    Instance {
        schema_version: SCHEMA_VERSION,
        network: Network { locations, edges },
        orders,
        horizon_weeks: horizon,
        dwell_limit_weeks: rng.gen_range(0..=1),
        booking_lead_weeks: rng.gen_range(1..=3),
        bookings_per_port_week: rng.gen_range(1..=2),
        manifest: None,
    }
}

pub type Point = (BTreeSet<(OrderId, EdgeId, u32)>, BTreeSet<(EdgeId, u32)>);

/// Every leg sequence along a path to the destination, with any departure weeks.
fn candidate_routes(inst: &Instance, order: &ProductOrder) -> Vec<Vec<Leg>> {
    let adj = inst.network.adjacency();
    let mut paths = Vec::new();
    let mut stack = vec![(order.origin, Vec::<EdgeId>::new())];
    while let Some((node, path)) = stack.pop() {
        for &e in &adj[node.index()] {
            let mut p = path.clone();
            p.push(e);
            let dest = inst.network.edge(e).unwrap().dest;
            if dest == order.destination {
                paths.push(p);
            } else if p.len() < 3 {
                stack.push((dest, p));
            }
        }
    }
    let mut out = Vec::new();
    for path in paths {
        let total = (inst.horizon_weeks as usize).pow(path.len() as u32);
        for code in 0..total {
            let mut c = code;
            let legs = path
                .iter()
                .map(|&edge| {
                    let w = (c % inst.horizon_weeks as usize) as u32;
                    c /= inst.horizon_weeks as usize;
                    Leg { edge, depart_week: w }
                })
                .collect();
            out.push(legs);
        }
    }
    out
}

/// Routes each order could take on its own.
fn single_routes(inst: &Instance) -> Vec<Vec<Vec<Leg>>> {
    inst
        .orders
        .iter()
        .map(|o| {
            let single = Instance { orders: vec![o.clone()], ..inst.clone() };
            candidate_routes(inst, o)
                .into_iter()
                .filter(|legs| {
                    let mut p = ShipmentPlan::default();
                    p.routes.insert(o.id, legs.clone());
                    p.bookings = legs
                        .iter()
                        .filter(|l| inst.network.edge(l.edge).unwrap().is_fcl())
                        .map(|l| Booking { edge: l.edge, depart_week: l.depart_week })
                        .collect();
                    p.bookings.sort();
                    p.bookings.dedup();
                    validate_plan(&single, &p).unwrap().is_feasible()
                })
                .collect()
        })
        .collect()
}

pub fn accepted_plans(inst: &Instance) -> BTreeSet<Point> {
    let per_order = single_routes(inst);
    let slots: Vec<Booking> = inst
        .network
        .fcl_edges()
        .flat_map(|e| (0..inst.horizon_weeks).map(move |t| Booking { edge: e.id, depart_week: t }))
        .collect();
    let mut out = BTreeSet::new();
    if per_order.iter().any(|r| r.is_empty()) {
        return out;
    }
    let mut choice = vec![0usize; per_order.len()];
    loop {
        let mut p = ShipmentPlan::default();
        for (k, o) in inst.orders.iter().enumerate() {
            p.routes.insert(o.id, per_order[k][choice[k]].clone());
        }
        // Booking rules only ever cap bookings, so an infeasible set stays
        // infeasible under any superset.
        let mut used: Vec<Booking> = p
            .routes
            .values()
            .flatten()
            .filter(|l| inst.network.edge(l.edge).unwrap().is_fcl())
            .map(|l| Booking { edge: l.edge, depart_week: l.depart_week })
            .collect();
        used.sort();
        used.dedup();
        p.bookings = used;
        extend(inst, &mut p, &slots, 0, &mut out);
        let mut k = 0;
        loop {
            if k == choice.len() {
                return out;
            }
            choice[k] += 1;
            if choice[k] < per_order[k].len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

fn extend(inst: &Instance, p: &mut ShipmentPlan, slots: &[Booking], from: usize, out: &mut BTreeSet<Point>) {
    if !validate_plan(inst, p).unwrap().is_feasible() {
        return;
    }
    let x = p.routes.iter().flat_map(|(&o, legs)| legs.iter().map(move |l| (o, l.edge, l.depart_week))).collect();
    let z = p.bookings.iter().map(|b| (b.edge, b.depart_week)).collect();
    out.insert((x, z));
    for i in from..slots.len() {
        if p.bookings.contains(&slots[i]) {
            continue;
        }
        let saved = p.bookings.clone();
        p.bookings.push(slots[i]);
        p.bookings.sort();
        extend(inst, p, slots, i + 1, out);
        p.bookings = saved;
    }
}

fn model_points(inst: &Instance, mode: InTransitMode) -> BTreeSet<Point> {
    let built = build_model(inst, &VariantConfig { in_transit: mode, elide_hopeless: false, ..Default::default() }).unwrap();
    let points = feasible_points(&built.model);
    let mut out = BTreeSet::new();
    for values in &points {
        let x = built.index.x.iter().filter(|(_, &v)| values[v] == 1).map(|(&k, _)| k).collect();
        let z = built.index.z.iter().filter(|(_, &v)| values[v] == 1).map(|(&k, _)| k).collect();
        assert!(out.insert((x, z)), "auxiliary variables are not determined by x and z");
    }
    out
}

/// Rough size of the plan set: route combinations times optional booking
/// subsets.
fn estimate(inst: &Instance) -> f64 {
    let routes: f64 = single_routes(inst).iter().map(|r| r.len() as f64).product();
    let slots = inst.network.fcl_edges().count() as i32 * (inst.horizon_weeks as i32 - inst.booking_lead_weeks as i32).max(0);
    routes * 2f64.powi(slots)
}

/// Instances above this estimate are skipped.
pub const SIZE_BUDGET: f64 = 1e6;

#[derive(Debug, Default)]
pub struct Coverage {
    pub instances: usize,
    pub three_orders: usize,
    pub eight_weeks: usize,
    pub plans: usize,
    pub mismatches: Vec<String>,
}

/// Compares both sides on the first `wanted` micro instances within budget.
pub fn compare(wanted: usize) -> Coverage {
    let mut cov = Coverage::default();
    for seed in 0.. {
        if cov.instances == wanted {
            break;
        }
        let inst = micro(seed);
        if estimate(&inst) > SIZE_BUDGET {
            continue;
        }
        let plans = accepted_plans(&inst);
        for mode in [InTransitMode::Original, InTransitMode::Inventory] {
            if model_points(&inst, mode) != plans {
                cov.mismatches.push(format!("seed {seed} {mode:?}"));
            }
        }
        cov.instances += 1;
        cov.three_orders += usize::from(inst.orders.len() == 3);
        cov.eight_weeks += usize::from(inst.horizon_weeks == 8);
        cov.plans += plans.len();
    }
    cov
}
