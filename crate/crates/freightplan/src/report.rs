//! Solver driver, run reports, comparisons and the scenario suite.

use std::time::Instant;

use freightplan_core::generator::{generate, GenConfig, GenError, Scenario};
use freightplan_core::heuristic::{self, HeuristicConfig, HeuristicError, Sequential};
use freightplan_core::oracle::{check_limits, solve_exact, ExactLimits, OracleError};
use freightplan_core::{heuristic_error, CostBreakdown, Instance, ModeClass, OrderId, ShipmentPlan, SCHEMA_VERSION};
use serde::{Deserialize, Serialize};

use crate::parallel::Rayon;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Heuristic,
    Oracle,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Heuristic => "heuristic",
            SolverKind::Oracle => "oracle",
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SolveOptions {
    /// Knapsack worker threads; 0 or 1 runs sequentially.
    pub threads: usize,
    pub heuristic: HeuristicConfig,
    pub limits: ExactLimits,
}

#[derive(Debug, thiserror::Error)]
pub enum SolveError {
    #[error(transparent)]
    Heuristic(#[from] HeuristicError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Generator(#[from] GenError),
    #[error("thread pool: {0}")]
    Threads(String),
}

impl SolveError {
    /// The oracle declined an instance beyond its limits.
    pub fn is_refusal(&self) -> bool {
        matches!(self, SolveError::Oracle(OracleError::LimitsExceeded(_)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub solver: SolverKind,
    pub plan: ShipmentPlan,
    pub cost: CostBreakdown,
    pub unservable: Vec<OrderId>,
    pub wall_ms: u64,
}

pub fn solve(inst: &Instance, solver: SolverKind, opts: &SolveOptions) -> Result<Solution, SolveError> {
    let start = Instant::now();
    let (plan, cost, unservable) = match solver {
        SolverKind::Heuristic => {
            let out = if opts.threads > 1 {
                let pool = Rayon::new(opts.threads).map_err(|e| SolveError::Threads(e.to_string()))?;
                heuristic::plan_with(inst, &opts.heuristic, &pool)?
            } else {
                heuristic::plan_with(inst, &opts.heuristic, &Sequential)?
            };
            (out.plan, out.cost, out.unservable)
        }
        SolverKind::Oracle => {
            let out = solve_exact(inst, &opts.limits)?;
            (out.plan, out.cost, out.unservable)
        }
    };
    let wall_ms = start.elapsed().as_millis() as u64;
    Ok(Solution { solver, plan, cost, unservable, wall_ms })
}

/// Relative excess of `heuristic` over `reference`; zero when both are free.
pub fn relative_error(heuristic: u64, reference: u64) -> Option<f64> {
    match (heuristic, reference) {
        (0, 0) => Some(0.0),
        (h, r) => heuristic_error(h, r).ok(),
    }
}

/// Routed orders by the mode that carries them across the ocean.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModeCounts {
    pub air: usize,
    pub lcl: usize,
    pub fcl: usize,
    pub unservable: usize,
}

pub fn mode_counts(inst: &Instance, plan: &ShipmentPlan, unservable: &[OrderId]) -> ModeCounts {
    let mut out = ModeCounts { unservable: unservable.len(), ..Default::default() };
    for legs in plan.routes.values() {
        let classes: Vec<ModeClass> = legs.iter().filter_map(|l| inst.network.edge(l.edge)).map(|e| e.class()).collect();
        if classes.contains(&ModeClass::Fcl) {
            out.fcl += 1;
        } else if classes.contains(&ModeClass::Air) {
            out.air += 1;
        } else {
            out.lcl += 1;
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub schema_version: u32,
    pub instance_digest: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<String>,
    pub solver: SolverKind,
    pub cost: CostBreakdown,
    pub bookings: usize,
    pub orders: ModeCounts,
    pub unservable: Vec<OrderId>,
    pub wall_ms: u64,
    /// Set when the oracle also solved the instance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub heuristic_error: Option<f64>,
}

impl RunReport {
    pub fn new(inst: &Instance, instance_digest: String, sol: &Solution) -> Self {
        RunReport {
            tool: crate::TOOL_NAME.into(),
            version: crate::TOOL_VERSION.into(),
            schema_version: SCHEMA_VERSION,
            instance_digest,
            scenario: inst.manifest.as_ref().map(|m| m.scenario.clone()),
            solver: sol.solver,
            cost: sol.cost,
            bookings: sol.plan.bookings.len(),
            orders: mode_counts(inst, &sol.plan, &sol.unservable),
            unservable: sol.unservable.clone(),
            wall_ms: sol.wall_ms,
            heuristic_error: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub solver: SolverKind,
    pub total_cents: u64,
    pub fcl_units: usize,
    pub fcl_fixed_cents: u64,
    pub fcl_variable_cents: u64,
    pub lcl_cents: u64,
    pub air_cents: u64,
    pub ground_cents: u64,
    pub unservable: usize,
    pub heuristic_error: Option<f64>,
}

impl CompareRow {
    fn new(sol: &Solution) -> Self {
        let c = &sol.cost;
        CompareRow {
            solver: sol.solver,
            total_cents: c.total_cents,
            fcl_units: sol.plan.bookings.len(),
            fcl_fixed_cents: c.fcl_fixed_cents,
            fcl_variable_cents: c.fcl_variable_cents,
            lcl_cents: c.lcl_cents,
            air_cents: c.air_cents,
            ground_cents: c.ground_cents,
            unservable: sol.unservable.len(),
            heuristic_error: None,
        }
    }
}

/// Heuristic row, plus an oracle row and the heuristic's error when the
/// instance is within the oracle's limits.
pub fn compare(inst: &Instance, opts: &SolveOptions) -> Result<Vec<CompareRow>, SolveError> {
    let h = solve(inst, SolverKind::Heuristic, opts)?;
    let mut rows = vec![CompareRow::new(&h)];
    if check_limits(inst, &opts.limits).is_ok() {
        let o = solve(inst, SolverKind::Oracle, opts)?;
        rows[0].heuristic_error = relative_error(h.cost.total_cents, o.cost.total_cents);
        rows.push(CompareRow::new(&o));
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteRow {
    pub solver: SolverKind,
    pub scenario: Scenario,
    pub edges: usize,
    pub total_cents: u64,
    pub fcl_units: usize,
    pub unservable: usize,
    /// Percent over the same solver's baseline cost.
    pub cost_increase_pct: Option<f64>,
}

/// The same order book under every scenario, solved by the heuristic and,
/// when all three fit its limits, the oracle.
pub fn suite(base: &GenConfig, opts: &SolveOptions) -> Result<Vec<SuiteRow>, SolveError> {
    let instances = Scenario::ALL
        .iter()
        .map(|&scenario| Ok((scenario, generate(&GenConfig { scenario, ..base.clone() })?)))
        .collect::<Result<Vec<_>, GenError>>()?;
    let mut solvers = vec![SolverKind::Heuristic];
    if instances.iter().all(|(_, inst)| check_limits(inst, &opts.limits).is_ok()) {
        solvers.push(SolverKind::Oracle);
    }
    let mut rows = Vec::new();
    for solver in solvers {
        let mut baseline = None;
        for (scenario, inst) in &instances {
            let sol = solve(inst, solver, opts)?;
            let total = sol.cost.total_cents;
            if *scenario == Scenario::Baseline {
                baseline = Some(total);
            }
            let cost_increase_pct = baseline.filter(|&b| b > 0).map(|b| (total as f64 - b as f64) / b as f64 * 100.0);
            rows.push(SuiteRow {
                solver,
                scenario: *scenario,
                edges: inst.network.edges.len(),
                total_cents: total,
                fcl_units: sol.plan.bookings.len(),
                unservable: sol.unservable.len(),
                cost_increase_pct,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn desk(seed: u64, scenario: Scenario) -> GenConfig {
        GenConfig { seed, n_products: 4, horizon_weeks: Some(12), booking_lead: 2, scenario, ..Default::default() }
    }

    #[test]
    fn zero_orders() {
        let mut inst = generate(&desk(1, Scenario::Baseline)).unwrap();
        inst.orders.clear();
        for solver in [SolverKind::Heuristic, SolverKind::Oracle] {
            let sol = solve(&inst, solver, &SolveOptions::default()).unwrap();
            assert_eq!(sol.cost.total_cents, 0);
            assert!(sol.plan.routes.is_empty());
        }
    }

    #[test]
    fn threads_do_not_change_plans() {
        let inst = generate(&GenConfig { seed: 5, n_products: 120, ..Default::default() }).unwrap();
        let one = solve(&inst, SolverKind::Heuristic, &SolveOptions::default()).unwrap();
        let four = solve(&inst, SolverKind::Heuristic, &SolveOptions { threads: 4, ..Default::default() }).unwrap();
        assert_eq!(one.plan, four.plan);
        assert_eq!(one.cost, four.cost);
    }

    #[test]
    fn oracle_refusal() {
        let inst = generate(&GenConfig { seed: 5, n_products: 20, ..Default::default() }).unwrap();
        assert!(solve(&inst, SolverKind::Oracle, &SolveOptions::default()).unwrap_err().is_refusal());
        let rows = compare(&inst, &SolveOptions::default()).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].heuristic_error, None);
    }

    #[test]
    fn compare_and_suite_shapes() {
        let inst = generate(&desk(3, Scenario::NoFcl)).unwrap();
        let rows = compare(&inst, &SolveOptions::default()).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].heuristic_error, Some(0.0));

        let rows = suite(&desk(3, Scenario::Baseline), &SolveOptions::default()).unwrap();
        assert_eq!(rows.len(), 6);
        for solver in [SolverKind::Heuristic, SolverKind::Oracle] {
            let of: Vec<&SuiteRow> = rows.iter().filter(|r| r.solver == solver).collect();
            assert_eq!(of.len(), 3);
            assert!(of[1].edges < of[0].edges);
        }
        let oracle: Vec<&SuiteRow> = rows.iter().filter(|r| r.solver == SolverKind::Oracle).collect();
        assert!(oracle[1].total_cents >= oracle[0].total_cents);
        assert!(oracle[2].total_cents >= oracle[0].total_cents);
    }

    #[test]
    fn mode_counts_cover_every_order() {
        let inst = generate(&GenConfig { seed: 2, n_products: 40, ..Default::default() }).unwrap();
        let sol = solve(&inst, SolverKind::Heuristic, &SolveOptions::default()).unwrap();
        let c = mode_counts(&inst, &sol.plan, &sol.unservable);
        assert_eq!(c.air + c.lcl + c.fcl + c.unservable, 40);
        assert_eq!(c.fcl > 0, !sol.plan.bookings.is_empty());
    }
}
