//! Cost accounting for shipment plans.

use alloc::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::model::{EdgeId, Instance, ModeClass, OrderId, ShipmentPlan};
use crate::validate::{check_references, PlanError};

/// Objective split by component, all in cents.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub fcl_fixed_cents: u64,
    pub fcl_variable_cents: u64,
    pub lcl_cents: u64,
    pub air_cents: u64,
    pub ground_cents: u64,
    pub penalty_cents: u64,
    pub total_cents: u64,
}

impl CostBreakdown {
    fn add_leg(&mut self, class: ModeClass, cents: u64) {
        match class {
            ModeClass::Ground => self.ground_cents += cents,
            ModeClass::Air => self.air_cents += cents,
            ModeClass::Lcl => self.lcl_cents += cents,
            ModeClass::Fcl => self.fcl_variable_cents += cents,
        }
    }

    fn finish(mut self) -> Self {
        self.total_cents = self.fcl_fixed_cents
            + self.fcl_variable_cents
            + self.lcl_cents
            + self.air_cents
            + self.ground_cents
            + self.penalty_cents;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CostError {
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error("order {order} ships on FCL edge {edge} in week {week} without a booking")]
    UnbookedFcl { order: OrderId, edge: EdgeId, week: u32 },
    #[error("reference cost is zero")]
    ZeroReference,
}

/// Per-leg transport costs plus one fixed charge per distinct booking.
pub fn plan_cost(instance: &Instance, plan: &ShipmentPlan) -> Result<CostBreakdown, CostError> {
    check_references(instance, plan)?;
    let net = &instance.network;
    let index = instance.order_index();
    let booked: BTreeSet<(EdgeId, u32)> = plan.bookings.iter().map(|b| (b.edge, b.depart_week)).collect();
    let mut out = CostBreakdown::default();
    for (id, legs) in &plan.routes {
        let order = &instance.orders[index[id]];
        for leg in legs {
            let edge = net.edge(leg.edge).expect("references checked");
            if edge.is_fcl() && !booked.contains(&(leg.edge, leg.depart_week)) {
                return Err(CostError::UnbookedFcl { order: *id, edge: leg.edge, week: leg.depart_week });
            }
            out.add_leg(edge.mode.class, edge.order_cost_cents(order));
        }
    }
    for (edge, _) in &booked {
        out.fcl_fixed_cents += net.edge(*edge).expect("references checked").fixed_cost_cents();
    }
    Ok(out.finish())
}

/// Relative excess of a heuristic cost over a reference cost.
pub fn heuristic_error(cost_heur: u64, cost_ref: u64) -> Result<f64, CostError> {
    if cost_ref == 0 {
        return Err(CostError::ZeroReference);
    }
    Ok((cost_heur as f64 - cost_ref as f64) / cost_ref as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::*;
    use crate::model::{Booking, Leg};
    use crate::SCHEMA_VERSION;
    use alloc::vec;

    fn leg(edge: u32, week: u32) -> Leg {
        Leg { edge: EdgeId(edge), depart_week: week }
    }

    #[test]
    fn air_example() {
        let inst = instance(vec![order(1, 10, "0.01", 0, 11, 13)]);
        let mut plan = ShipmentPlan::default();
        plan.routes.insert(OrderId(1), vec![leg(4, 9)]);
        let c = plan_cost(&inst, &plan).unwrap();
        assert_eq!(c.air_cents, 13_230);
        assert_eq!(c.total_cents, 13_230);
    }

    #[test]
    fn empty_plan_costs_nothing() {
        let c = plan_cost(&instance(vec![]), &ShipmentPlan::default()).unwrap();
        assert_eq!(c, CostBreakdown::default());
    }

    #[test]
    fn lcl_consignment() {
        // bunker $1,160 + $800/CBM * 2.5 CBM, independently: 1160 + 2000 = 3160 dollars
        let inst = instance(vec![order(1, 1000, "2.5", 0, 11, 13)]);
        let mut plan = ShipmentPlan::default();
        plan.routes.insert(OrderId(1), vec![leg(0, 0), leg(1, 2), leg(3, 9)]);
        let c = plan_cost(&inst, &plan).unwrap();
        assert_eq!(c.lcl_cents, 316_000);
        assert_eq!(c.ground_cents, 1000 * 10 + 1000 * 8);
        assert_eq!(c.total_cents, 316_000 + 18_000);
    }

    #[test]
    fn fixed_charge_once_per_booking() {
        let inst = instance(vec![order(1, 100, "0.2", 0, 11, 13), order(2, 100, "0.2", 0, 11, 13)]);
        let mut plan = ShipmentPlan { schema_version: SCHEMA_VERSION, ..Default::default() };
        for id in [1, 2] {
            plan.routes.insert(OrderId(id), vec![leg(0, 2), leg(2, 4), leg(3, 11)]);
        }
        plan.bookings.push(Booking { edge: EdgeId(2), depart_week: 4 });
        let c = plan_cost(&inst, &plan).unwrap();
        assert_eq!(c.fcl_fixed_cents, 1_253_800);
        assert_eq!(c.total_cents, 1_253_800 + 2 * (1000 + 800));

        plan.bookings.clear();
        assert!(matches!(plan_cost(&inst, &plan), Err(CostError::UnbookedFcl { .. })));
    }

    #[test]
    fn error_metric() {
        assert!((heuristic_error(110, 100).unwrap() - 0.10).abs() < 1e-12);
        assert_eq!(heuristic_error(100, 100).unwrap(), 0.0);
        assert_eq!(heuristic_error(5, 0), Err(CostError::ZeroReference));
    }
}
