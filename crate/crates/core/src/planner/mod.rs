//! Itinerary generation: day allocation, attraction choice, transit, detail,
//! then a validator-driven repair loop; plus minimal-edit revision.

mod alloc;
mod detail;
mod outline;
mod repair;
mod revise;

use serde::{Deserialize, Serialize};

use crate::dialogue::{IntentSlots, SlotName, TravelQuery};
use crate::kb::KnowledgeBase;
use crate::plan::{CostLedger, Plan};
use crate::validator::PlanReport;

pub use alloc::{
    allocate_days, allocation_for, cheapest_leg, leg_options, order_cost, ranked_orders, split_days, Allocation,
    CityStay, Leg, LegRole, EVENING_EARLIEST, MORNING_ARRIVE_BY, MORNING_EARLIEST,
};
pub use detail::{
    attraction_cost, build_plan, detail_plan, lodging_cost, meal_cost, rooms_for, schedule_day, transport_cost,
    SnackRule, Slot, Timed, Timeline,
};
pub use outline::{
    arrange_transit, attraction_order, is_rain, pace, plan_attractions, Outline, OutlineDay, TransitChoice, DEFAULT_PACE,
};
pub use repair::{repair, Move, RepairOutcome};
pub use revise::{dependency_days, revise_plan, slots_after, touched_constraints};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PlanError {
    #[error("missing slots: {}", .0.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", "))]
    MissingSlots(Vec<SlotName>),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("revision infeasible: {0}")]
    RevisionInfeasible(String),
    #[error("bad request: {0}")]
    BadRequest(String),
}

/// Limits on the search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    /// Plans evaluated in total, across orders and repairs.
    pub max_candidates: usize,
    /// Visiting orders explored, cheapest first.
    pub beam_width: usize,
    pub repair_rounds: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_candidates: 200, beam_width: 4, repair_rounds: 8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanOutcome {
    pub plan: Plan,
    pub report: PlanReport,
}

/// Plan a query end to end. Only missing core slots, unknown cities or too
/// few days are errors; anything else yields the best plan found, with its
/// report showing what fails.
pub fn generate_plan(query: &TravelQuery, kb: &KnowledgeBase, budget: SearchBudget) -> Result<PlanOutcome, PlanError> {
    if budget.max_candidates == 0 || budget.beam_width == 0 || budget.repair_rounds == 0 {
        return Err(PlanError::BadRequest("search budget fields must be positive".into()));
    }
    let slots = &query.slots;
    alloc::check_trip(slots, kb)?;
    let orders = match ranked_orders(slots, kb) {
        Ok(orders) => orders,
        Err(PlanError::Infeasible(_)) => {
            let mut order = slots.destination_cities.clone().expect("checked");
            order.sort();
            vec![(order, crate::money::Money::ZERO)]
        }
        Err(e) => return Err(e),
    };
    let mut best: Option<(PlanOutcome, (bool, usize, crate::money::Money))> = None;
    let mut evaluated = 0;
    for (order, cost) in orders.iter().take(budget.beam_width) {
        if evaluated >= budget.max_candidates {
            break;
        }
        let alloc = allocation_for(order, *cost, slots, kb);
        let plan = candidate(&alloc, query, kb);
        let fixed = repair(plan, slots, kb, budget.repair_rounds, budget.max_candidates - evaluated);
        evaluated += fixed.evaluated;
        let key = (!fixed.report.final_pass, fixed.report.fail_count(), CostLedger::of(&fixed.plan).total);
        if best.as_ref().is_none_or(|(_, k)| key < *k) {
            best = Some((PlanOutcome { plan: fixed.plan, report: fixed.report }, key));
        }
    }
    Ok(best.expect("at least one order").0)
}

/// Build the initial plan for an allocation, degrading instead of failing.
fn candidate(alloc: &Allocation, query: &TravelQuery, kb: &KnowledgeBase) -> Plan {
    let slots = &query.slots;
    let outline = plan_attractions(alloc, slots, kb).unwrap_or_else(|_| {
        let relaxed = IntentSlots { required_sites: None, ..slots.clone() };
        plan_attractions(alloc, &relaxed, kb).expect("only required sites can make attraction planning fail")
    });
    let transit: Vec<TransitChoice> = alloc
        .legs()
        .into_iter()
        .filter_map(|leg| {
            cheapest_leg(kb, &leg.from, &leg.to, leg.role, slots.transport())
                .map(|l| TransitChoice { day: leg.day, role: leg.role, link: l.id.clone() })
        })
        .collect();
    let outline = outline.with_transit(&transit);
    build_plan(&outline, slots, kb, &query.id, true).expect("relaxed build always succeeds")
}
