//! Minimal-edit plan revision.

use std::collections::BTreeSet;

use super::alloc::{leg_options, LegRole};
use super::detail::{
    attraction_cost, lodging_start, meal_cost, pick_restaurant, schedule_day, transport_cost, SnackRule, Slot, Timeline,
};
use super::repair::{cheapest_dining, cheapest_hotels};
use super::{PlanError, PlanOutcome};
use crate::dialogue::{Directive, IntentSlots, RevisionCategory, RevisionRequest};
use crate::kb::{KnowledgeBase, LinkId, Poi, PoiId, PoiKind, TransportLink};
use crate::plan::{Activity, ActivityKind, CostLedger, DayPlan, MealSlot, Plan};
use crate::validator::{evaluate_plan, ConstraintId};

/// Slots as they stand after the request: a budget cap replaces the budget
/// and a link change may carry a new transport preference.
pub fn slots_after(request: &RevisionRequest, slots: &IntentSlots) -> IntentSlots {
    let mut out = slots.clone();
    match &request.directive {
        Directive::CapBudget { budget } => out.budget_total = Some(*budget),
        Directive::ChangeLink { transport_pref: Some(p) } => out.transport_pref = Some(*p),
        _ => {}
    }
    out
}

/// Days a revision may touch.
pub fn dependency_days(request: &RevisionRequest, plan: &Plan) -> BTreeSet<usize> {
    match (request.category, request.target) {
        (RevisionCategory::Budget, _) | (_, None) => (0..plan.days.len()).collect(),
        (_, Some(t)) => BTreeSet::from([t.day]),
    }
}

/// Constraints whose verdict a revision of this category may change. All
/// others are guaranteed to keep their verdict.
pub fn touched_constraints(category: RevisionCategory) -> BTreeSet<ConstraintId> {
    use ConstraintId::*;
    let ids: &[ConstraintId] = match category {
        RevisionCategory::Dining => &[Budget, ActivityRepetition, PoiValidation, LocationLogic, ExcludedSites],
        RevisionCategory::Transportation => {
            &[Budget, TimeInterval, DailySchedule, ReturnJourney, LocationLogic, PoiValidation]
        }
        RevisionCategory::Weather => &[
            Budget,
            ActivityRepetition,
            TimeInterval,
            DailySchedule,
            ActivityCount,
            PoiValidation,
            LocationLogic,
            RequiredSites,
            ExcludedSites,
        ],
        RevisionCategory::Budget => &[Budget, ActivityRepetition, PoiValidation, LocationLogic, ExcludedSites, HotelType],
    };
    ids.iter().copied().collect()
}

fn infeasible(msg: impl Into<String>) -> PlanError {
    PlanError::RevisionInfeasible(msg.into())
}

fn poi_of<'kb>(kb: &'kb KnowledgeBase, a: &Activity) -> Option<&'kb Poi> {
    kb.poi(&PoiId::new(a.poi_or_link.clone()))
}

/// Apply `request` to `plan`, changing as little as possible. On error the
/// caller's plan is untouched.
pub fn revise_plan(
    plan: &Plan,
    request: &RevisionRequest,
    slots: &IntentSlots,
    kb: &KnowledgeBase,
) -> Result<PlanOutcome, PlanError> {
    let idx = request.resolve(plan, kb).map_err(PlanError::BadRequest)?;
    let slots = slots_after(request, slots);
    let revised = match request.category {
        RevisionCategory::Dining => revise_dining(plan, request, idx.expect("resolved"), &slots, kb)?,
        RevisionCategory::Weather => revise_weather(plan, request, idx.expect("resolved"), &slots, kb)?,
        RevisionCategory::Transportation => revise_transport(plan, request, idx.expect("resolved"), &slots, kb)?,
        RevisionCategory::Budget => revise_budget(plan, &slots, kb)?,
    };
    let report = evaluate_plan(&revised, &slots, kb);
    Ok(PlanOutcome { plan: revised, report })
}

fn revise_dining(
    plan: &Plan,
    request: &RevisionRequest,
    i: usize,
    slots: &IntentSlots,
    kb: &KnowledgeBase,
) -> Result<Plan, PlanError> {
    let d = request.target.expect("resolved").day;
    let day = &plan.days[d];
    let meal = &day.activities[i];
    let ActivityKind::Meal(slot) = meal.kind else { unreachable!("resolved to a meal") };
    let mut used: BTreeSet<PoiId> = plan
        .activities()
        .filter(|(_, _, a)| !a.is_transport())
        .map(|(_, _, a)| PoiId::new(a.poi_or_link.clone()))
        .collect();
    used.insert(PoiId::new(meal.poi_or_link.clone()));
    let replacement = match &request.directive {
        Directive::ReplacePoi { replacement: Some(id) } => {
            let p = kb.poi(id).ok_or_else(|| infeasible(format!("unknown restaurant `{id}`")))?;
            if p.kind() != PoiKind::Restaurant || p.city_id != meal.city_id {
                return Err(infeasible(format!("`{id}` is not a restaurant in `{}`", meal.city_id)));
            }
            if used.contains(id) || slots.excluded().contains(id) {
                return Err(infeasible(format!("`{id}` is already in the plan or excluded")));
            }
            id.clone()
        }
        _ => {
            let attraction_at = |j: usize| {
                let a = &day.activities[j];
                (a.kind == ActivityKind::Attraction).then(|| poi_of(kb, a)).flatten()
            };
            let anchor = if slot == MealSlot::Breakfast {
                None
            } else {
                (0..i).rev().find_map(attraction_at).or_else(|| (i + 1..day.activities.len()).find_map(attraction_at))
            };
            let from = anchor
                .map(|p| p.coords)
                .or_else(|| poi_of(kb, meal).map(|p| p.coords))
                .or_else(|| kb.city(&meal.city_id).map(|c| c.coords))
                .ok_or_else(|| infeasible("cannot locate the meal"))?;
            pick_restaurant(kb, slots, &meal.city_id, anchor, from, meal.start, meal.end, slot, &used)
                .ok_or_else(|| infeasible(format!("no other restaurant available on day {}", d + 1)))?
        }
    };
    let p = kb.poi(&replacement).expect("checked above");
    let mut out = plan.clone();
    let a = &mut out.days[d].activities[i];
    a.poi_or_link = replacement.to_string();
    a.cost = meal_cost(p, plan.party_size);
    Ok(out)
}

fn snack_rule(day: &DayPlan) -> SnackRule {
    if day.activities.iter().any(|a| a.kind == ActivityKind::Meal(MealSlot::Snack)) {
        SnackRule::Always
    } else {
        SnackRule::Never
    }
}

fn day_legs<'kb>(day: &DayPlan, kb: &'kb KnowledgeBase) -> (Option<&'kb TransportLink>, Option<&'kb TransportLink>) {
    let legs: Vec<(usize, &TransportLink)> = day
        .activities
        .iter()
        .enumerate()
        .filter_map(|(i, a)| a.link_id().and_then(|id| kb.link(&id)).map(|l| (i, l)))
        .collect();
    let first_meal = day.activities.iter().position(|a| a.kind.is_meal()).unwrap_or(usize::MAX);
    let arrival = legs.iter().find(|(i, _)| *i < first_meal).map(|(_, l)| *l);
    let departure = legs.iter().rev().find(|(i, _)| *i > first_meal).map(|(_, l)| *l);
    (arrival, departure)
}

/// Re-time `day` after its attractions or legs changed, keeping every meal
/// and lodging POI. Fails when the new layout loses or gains an item.
fn retime_day(
    day: &DayPlan,
    attractions: &[PoiId],
    arrival: Option<&TransportLink>,
    departure: Option<&TransportLink>,
    party: u32,
    kb: &KnowledgeBase,
) -> Result<DayPlan, PlanError> {
    let tl: Timeline = schedule_day(kb, attractions, arrival, departure, snack_rule(day));
    if !tl.dropped.is_empty() {
        return Err(infeasible("the change does not fit the day"));
    }
    let daytime: Vec<&Activity> = day.activities.iter().filter(|a| !a.is_lodging()).collect();
    if daytime.len() != tl.items.len() {
        return Err(infeasible("the change does not fit the day"));
    }
    let mut acts = Vec::with_capacity(day.activities.len());
    for t in &tl.items {
        let act = match &t.slot {
            Slot::Transport(id) => {
                let l = kb.link(id).expect("scheduled from the KB");
                Activity {
                    kind: ActivityKind::Transport,
                    poi_or_link: id.to_string(),
                    city_id: l.to_city.clone(),
                    start: t.start,
                    end: t.end,
                    cost: transport_cost(l, party),
                }
            }
            Slot::Attraction(id) => {
                let p = kb.poi(id).expect("scheduled from the KB");
                Activity {
                    kind: ActivityKind::Attraction,
                    poi_or_link: id.to_string(),
                    city_id: p.city_id.clone(),
                    start: t.start,
                    end: t.end,
                    cost: attraction_cost(p, party),
                }
            }
            Slot::Meal(slot) => {
                let old = day
                    .activities
                    .iter()
                    .find(|a| a.kind == ActivityKind::Meal(*slot))
                    .ok_or_else(|| infeasible("the change does not fit the day"))?;
                Activity { start: t.start, end: t.end, ..old.clone() }
            }
        };
        acts.push(act);
    }
    for a in day.activities.iter().filter(|a| a.is_lodging()) {
        acts.push(Activity { start: lodging_start(tl.last_end()), ..a.clone() });
    }
    Ok(DayPlan { date: day.date, city_id: day.city_id.clone(), activities: acts })
}

fn revise_weather(
    plan: &Plan,
    request: &RevisionRequest,
    i: usize,
    slots: &IntentSlots,
    kb: &KnowledgeBase,
) -> Result<Plan, PlanError> {
    let d = request.target.expect("resolved").day;
    let day = &plan.days[d];
    let current = &day.activities[i];
    let current_id = PoiId::new(current.poi_or_link.clone());
    if slots.required().contains(&current_id) {
        return Err(infeasible(format!("`{current_id}` is a required site")));
    }
    let excluded = slots.excluded();
    let in_plan: BTreeSet<String> = plan.activities().map(|(_, _, a)| a.poi_or_link.clone()).collect();
    let mut candidates: Vec<&Poi> = kb
        .pois_in(&current.city_id, PoiKind::Attraction)
        .filter(|p| p.indoor && !excluded.contains(&p.id) && !in_plan.contains(p.id.as_str()))
        .collect();
    candidates.sort_by(|a, b| b.rating.total_cmp(&a.rating).then_with(|| a.id.cmp(&b.id)));
    let (arrival, departure) = day_legs(day, kb);
    let attractions: Vec<PoiId> = day
        .activities
        .iter()
        .filter(|a| a.kind == ActivityKind::Attraction)
        .map(|a| PoiId::new(a.poi_or_link.clone()))
        .collect();
    for c in candidates {
        let swapped: Vec<PoiId> =
            attractions.iter().map(|id| if *id == current_id { c.id.clone() } else { id.clone() }).collect();
        if let Ok(new_day) = retime_day(day, &swapped, arrival, departure, plan.party_size, kb) {
            let mut out = plan.clone();
            out.days[d] = new_day;
            return Ok(out);
        }
    }
    Err(infeasible(format!("no indoor alternative fits day {} in `{}`", d + 1, current.city_id)))
}

fn revise_transport(
    plan: &Plan,
    request: &RevisionRequest,
    i: usize,
    slots: &IntentSlots,
    kb: &KnowledgeBase,
) -> Result<Plan, PlanError> {
    let d = request.target.expect("resolved").day;
    let day = &plan.days[d];
    let current_id = LinkId::new(day.activities[i].poi_or_link.clone());
    let current = kb.link(&current_id).ok_or_else(|| infeasible(format!("unknown link `{current_id}`")))?;
    let first_meal = day.activities.iter().position(|a| a.kind.is_meal()).unwrap_or(usize::MAX);
    let role = if i < first_meal {
        LegRole::Outbound
    } else if Some(&current.to_city) == slots.departure_city.as_ref() && d + 1 == plan.days.len() {
        LegRole::Return
    } else {
        LegRole::Move
    };
    let replacement = leg_options(kb, &current.from_city, &current.to_city, role, slots.transport())
        .into_iter()
        .find(|l| l.id != current_id)
        .ok_or_else(|| {
            infeasible(format!("no other {} link from `{}` to `{}`", role.as_str(), current.from_city, current.to_city))
        })?;
    let mut out = plan.clone();
    if role == LegRole::Outbound {
        let (_, departure) = day_legs(day, kb);
        let attractions: Vec<PoiId> = day
            .activities
            .iter()
            .filter(|a| a.kind == ActivityKind::Attraction)
            .map(|a| PoiId::new(a.poi_or_link.clone()))
            .collect();
        out.days[d] = retime_day(day, &attractions, Some(replacement), departure, plan.party_size, kb)?;
    } else {
        let new_day = &mut out.days[d];
        let a = &mut new_day.activities[i];
        a.poi_or_link = replacement.id.to_string();
        a.city_id = replacement.to_city.clone();
        a.start = replacement.depart;
        a.end = replacement.arrive;
        a.cost = transport_cost(replacement, plan.party_size);
        let last = new_day.activities.iter().filter(|a| !a.is_lodging()).map(|a| a.end).max().unwrap_or(0);
        for l in new_day.activities.iter_mut().filter(|a| a.is_lodging()) {
            l.start = lodging_start(last);
        }
        new_day.activities.sort_by_key(|a| a.start);
    }
    Ok(out)
}

fn revise_budget(plan: &Plan, slots: &IntentSlots, kb: &KnowledgeBase) -> Result<Plan, PlanError> {
    let cap = slots.budget_total.expect("set from the directive");
    let mut current = plan.clone();
    for step in [cheapest_dining, cheapest_hotels] {
        if CostLedger::of(&current).total <= cap {
            break;
        }
        if let Some(next) = step(&current, slots, kb) {
            current = next;
        }
    }
    if current == *plan && CostLedger::of(plan).total > cap {
        return Err(infeasible("the plan already uses the cheapest meals and hotels"));
    }
    Ok(current)
}
