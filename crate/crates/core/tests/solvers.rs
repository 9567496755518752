#[path = "support/enumerate.rs"]
#[allow(dead_code)]
mod enumerate;

use freightplan_core::generator::{generate, GenConfig, Scenario};
use freightplan_core::heuristic::{self, HeuristicConfig, Sequential};
use freightplan_core::oracle::{solve_exact, ExactLimits};
use freightplan_core::{plan_cost, validate_plan, Booking, Instance, Leg, ShipmentPlan};
use proptest::prelude::*;

fn desk(seed: u64, scenario: Scenario) -> Instance {
    let cfg = GenConfig {
        seed,
        n_products: 3 + (seed % 4) as u32,
        horizon_weeks: Some(10 + (seed % 5) as u32),
        booking_lead: 2,
        scenario,
        ..Default::default()
    };
    generate(&cfg).unwrap()
}

fn to_plan(point: &enumerate::Point) -> ShipmentPlan {
    let mut plan = ShipmentPlan::default();
    for &(o, edge, depart_week) in &point.0 {
        plan.routes.entry(o).or_default().push(Leg { edge, depart_week });
    }
    for legs in plan.routes.values_mut() {
        legs.sort_by_key(|l| l.depart_week);
    }
    plan.bookings = point.1.iter().map(|&(edge, depart_week)| Booking { edge, depart_week }).collect();
    plan
}

#[test]
fn oracle_matches_brute_force_minimum() {
    let mut compared = 0;
    for seed in 0..300 {
        let inst = enumerate::micro(seed);
        if inst.orders.len() > 2 || inst.horizon_weeks > 6 {
            continue;
        }
        let exact = solve_exact(&inst, &ExactLimits::default()).unwrap();
        let served = inst.without_orders(&exact.unservable);
        let best = enumerate::accepted_plans(&served).iter().map(|p| plan_cost(&served, &to_plan(p)).unwrap().total_cents).min();
        assert_eq!(best, Some(exact.cost.total_cents), "seed {seed}");
        compared += 1;
    }
    assert!(compared >= 50);
}

#[test]
fn heuristic_never_beats_oracle() {
    for seed in 0..60 {
        let inst = desk(seed, Scenario::Baseline);
        let h = heuristic::plan(&inst).unwrap();
        let o = solve_exact(&inst, &ExactLimits::default()).unwrap();
        assert_eq!(h.unservable, o.unservable, "seed {seed}");
        let served = inst.without_orders(&h.unservable);
        assert!(validate_plan(&served, &h.plan).unwrap().is_feasible(), "seed {seed}");
        assert!(validate_plan(&served, &o.plan).unwrap().is_feasible(), "seed {seed}");
        assert!(h.cost.total_cents >= o.cost.total_cents, "seed {seed}");
    }
}

#[test]
fn no_fcl_heuristic_is_optimal() {
    for seed in 0..30 {
        let inst = desk(seed, Scenario::NoFcl);
        let h = heuristic::plan(&inst).unwrap();
        let o = solve_exact(&inst, &ExactLimits::default()).unwrap();
        assert_eq!(h.cost.total_cents, o.cost.total_cents, "seed {seed}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn heuristic_invariants(seed in 0u64..10_000, n in 1u32..40, lead in 0u32..6, cap in 1u32..3) {
        let cfg = GenConfig { seed, n_products: n, horizon_weeks: Some(26), booking_lead: lead, port_cap: cap, ..Default::default() };
        let inst = generate(&cfg).unwrap();
        let out = heuristic::plan(&inst).unwrap();
        prop_assert_eq!(&out, &heuristic::plan_with(&inst, &HeuristicConfig::default(), &Sequential).unwrap());

        let served = inst.without_orders(&out.unservable);
        prop_assert!(validate_plan(&served, &out.plan).unwrap().is_feasible());
        prop_assert_eq!(plan_cost(&served, &out.plan).unwrap(), out.cost.clone());
        prop_assert_eq!(out.plan.routes.len() + out.unservable.len(), inst.orders.len());
        prop_assert_eq!(out.commits.len(), out.plan.bookings.len());

        for c in &out.commits {
            let edge = inst.network.edge(c.booking.edge).unwrap();
            prop_assert!(c.value_dollars * 100 > edge.fixed_cost_cents());
            prop_assert!(c.booking.depart_week >= inst.booking_lead_weeks);
            prop_assert!(!c.orders.is_empty());
            let load: u64 = c.orders.iter().map(|id| u64::from(inst.order(*id).unwrap().gross_weight_kg)).sum();
            prop_assert!(load <= u64::from(edge.capacity_kg.unwrap()));
            for id in &c.orders {
                prop_assert!(out.plan.routes[id].iter().any(|l| l.edge == c.booking.edge && l.depart_week == c.booking.depart_week));
            }
        }
    }
}
