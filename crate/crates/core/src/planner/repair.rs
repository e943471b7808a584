//! Targeted plan repairs, each aimed at one failing constraint.

use std::collections::{BTreeMap, BTreeSet};

use super::detail::{lodging_cost, meal_cost, pick_restaurant, GAP, LAST_MINUTE, SNACK_MIN};
use crate::dialogue::IntentSlots;
use crate::kb::{CityId, KnowledgeBase, Poi, PoiId, PoiKind};
use crate::plan::{Activity, ActivityKind, CostLedger, MealSlot, Plan};
use crate::validator::{evaluate_plan, ConstraintId, PlanReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    CheapestDining,
    CheapestHotels,
    DropPriciestAttraction,
    Respace,
    SwapHotelType,
    InsertSnack,
}

/// Moves tried for a failing constraint, in order.
pub fn moves_for(id: ConstraintId) -> &'static [Move] {
    match id {
        ConstraintId::Budget => &[Move::CheapestDining, Move::CheapestHotels, Move::DropPriciestAttraction],
        ConstraintId::TimeInterval => &[Move::Respace],
        ConstraintId::HotelType => &[Move::SwapHotelType],
        ConstraintId::ActivityCount => &[Move::InsertSnack],
        _ => &[],
    }
}

pub fn apply(mv: Move, plan: &Plan, slots: &IntentSlots, kb: &KnowledgeBase) -> Option<Plan> {
    match mv {
        Move::CheapestDining => cheapest_dining(plan, slots, kb),
        Move::CheapestHotels => cheapest_hotels(plan, slots, kb),
        Move::DropPriciestAttraction => drop_priciest_attraction(plan, slots),
        Move::Respace => respace(plan),
        Move::SwapHotelType => swap_hotel_type(plan, slots, kb),
        Move::InsertSnack => insert_snack(plan, slots, kb),
    }
}

fn poi<'kb>(kb: &'kb KnowledgeBase, a: &Activity) -> Option<&'kb Poi> {
    kb.poi(&PoiId::new(a.poi_or_link.clone()))
}

fn is_snack_shop(p: &Poi) -> bool {
    p.restaurant().is_some_and(|r| r.is_snack_shop())
}

fn meal_refs(plan: &Plan) -> BTreeSet<PoiId> {
    plan.activities().filter(|(_, _, a)| a.kind.is_meal()).map(|(_, _, a)| PoiId::new(a.poi_or_link.clone())).collect()
}

/// Replace every meal with the cheapest free restaurant of the same class in
/// its city, where that is cheaper.
pub fn cheapest_dining(plan: &Plan, slots: &IntentSlots, kb: &KnowledgeBase) -> Option<Plan> {
    let excluded = slots.excluded();
    let mut out = plan.clone();
    let mut used = meal_refs(plan);
    let mut changed = false;
    for day in &mut out.days {
        for a in &mut day.activities {
            let ActivityKind::Meal(slot) = a.kind else { continue };
            let Some(current) = poi(kb, a) else { continue };
            let snack = slot == MealSlot::Snack;
            let best = kb
                .pois_in(&a.city_id, PoiKind::Restaurant)
                .filter(|p| {
                    !used.contains(&p.id)
                        && !excluded.contains(&p.id)
                        && is_snack_shop(p) == snack
                        && p.open_window.contains(a.start, a.end)
                })
                .min_by(|x, y| x.avg_cost.cmp(&y.avg_cost).then_with(|| x.id.cmp(&y.id)));
            if let Some(best) = best {
                if best.avg_cost < current.avg_cost {
                    used.remove(&current.id);
                    used.insert(best.id.clone());
                    a.poi_or_link = best.id.to_string();
                    a.cost = meal_cost(best, plan.party_size);
                    changed = true;
                }
            }
        }
    }
    changed.then_some(out)
}

fn hotels_by_city(plan: &Plan) -> BTreeMap<CityId, BTreeSet<String>> {
    let mut out: BTreeMap<CityId, BTreeSet<String>> = BTreeMap::new();
    for (_, _, a) in plan.activities().filter(|(_, _, a)| a.is_lodging()) {
        out.entry(a.city_id.clone()).or_default().insert(a.poi_or_link.clone());
    }
    out
}

fn replace_hotel(plan: &mut Plan, city: &CityId, hotel: &Poi) {
    let party = plan.party_size;
    for day in &mut plan.days {
        for a in &mut day.activities {
            if a.is_lodging() && &a.city_id == city {
                a.poi_or_link = hotel.id.to_string();
                a.cost = lodging_cost(hotel, party);
            }
        }
    }
}

/// Use the cheapest acceptable hotel in every night city.
pub fn cheapest_hotels(plan: &Plan, slots: &IntentSlots, kb: &KnowledgeBase) -> Option<Plan> {
    let excluded = slots.excluded();
    let pref = slots.hotel_pref();
    let mut out = plan.clone();
    let mut changed = false;
    for (city, current) in hotels_by_city(plan) {
        let best = kb
            .pois_in(&city, PoiKind::Hotel)
            .filter(|p| !excluded.contains(&p.id) && p.hotel().is_some_and(|h| pref.accepts(h.hotel_type)))
            .min_by(|x, y| {
                let px = x.hotel().map(|h| h.cheapest_room());
                let py = y.hotel().map(|h| h.cheapest_room());
                px.cmp(&py).then_with(|| x.id.cmp(&y.id))
            });
        let Some(best) = best else { continue };
        let best_price = lodging_cost(best, plan.party_size);
        let current_cost =
            current.iter().filter_map(|h| kb.poi(&PoiId::new(h.clone()))).map(|p| lodging_cost(p, plan.party_size)).max();
        let worse = current.len() > 1 || current_cost.is_none_or(|c| c > best_price);
        if worse {
            replace_hotel(&mut out, &city, best);
            changed = true;
        }
    }
    changed.then_some(out)
}

fn local_count(plan: &Plan, d: usize) -> usize {
    let day = &plan.days[d];
    day.activities
        .iter()
        .filter(|a| matches!(a.kind, ActivityKind::Attraction | ActivityKind::Meal(_)) && a.city_id == day.city_id)
        .count()
}

/// Remove the costliest optional attraction from a day that keeps at least
/// four activities afterwards.
pub fn drop_priciest_attraction(plan: &Plan, slots: &IntentSlots) -> Option<Plan> {
    let required = slots.required();
    let (d, i, _) = plan
        .activities()
        .filter(|(d, _, a)| {
            a.kind == ActivityKind::Attraction
                && a.cost > crate::money::Money::ZERO
                && !required.contains(&PoiId::new(a.poi_or_link.clone()))
                && local_count(plan, *d) >= 5
        })
        .max_by(|x, y| x.2.cost.cmp(&y.2.cost).then_with(|| y.2.poi_or_link.cmp(&x.2.poi_or_link)))?;
    let mut out = plan.clone();
    out.days[d].activities.remove(i);
    Some(out)
}

/// Push activities later until every gap is at least the minimum. Transport
/// times are fixed, so a collision with a leg leaves the day unrepaired.
pub fn respace(plan: &Plan) -> Option<Plan> {
    let mut out = plan.clone();
    let mut changed = false;
    for day in &mut out.days {
        let mut prev_end: Option<u16> = None;
        for a in day.activities.iter_mut().filter(|a| !a.is_lodging()) {
            if let Some(pe) = prev_end {
                let need = pe + GAP;
                if a.start < need {
                    if a.is_transport() {
                        return None;
                    }
                    let len = a.end - a.start;
                    if need + len > LAST_MINUTE {
                        return None;
                    }
                    a.start = need;
                    a.end = need + len;
                    changed = true;
                }
            }
            prev_end = Some(a.end);
        }
        let last = day.activities.iter().filter(|a| !a.is_lodging()).map(|a| a.end).max();
        if let Some(last) = last {
            for a in day.activities.iter_mut().filter(|a| a.is_lodging()) {
                a.start = a.start.max((last + GAP).min(LAST_MINUTE));
            }
        }
        day.activities.sort_by_key(|a| a.start);
    }
    changed.then_some(out)
}

/// Move lodging to the nearest hotel of the preferred type in the same city.
pub fn swap_hotel_type(plan: &Plan, slots: &IntentSlots, kb: &KnowledgeBase) -> Option<Plan> {
    let pref = slots.hotel_pref();
    let excluded = slots.excluded();
    let mut out = plan.clone();
    let mut changed = false;
    for (city, current) in hotels_by_city(plan) {
        let fits = current.iter().all(|h| {
            kb.poi(&PoiId::new(h.clone())).and_then(|p| p.hotel()).is_some_and(|h| pref.accepts(h.hotel_type))
        });
        if fits {
            continue;
        }
        let from = current
            .iter()
            .find_map(|h| kb.poi(&PoiId::new(h.clone())))
            .map(|p| p.coords)
            .or_else(|| kb.city(&city).map(|c| c.coords))?;
        let replacement = crate::kb::rank_by_distance(kb, &city, from, PoiKind::Hotel, None, usize::MAX)
            .into_iter()
            .filter_map(|(id, _)| kb.poi(&id))
            .find(|p| !excluded.contains(&p.id) && p.hotel().is_some_and(|h| pref.accepts(h.hotel_type)));
        if let Some(h) = replacement {
            replace_hotel(&mut out, &city, h);
            changed = true;
        }
    }
    changed.then_some(out)
}

/// Add a snack to days short of four activities, in the first daytime gap
/// wide enough to keep both neighbouring gaps.
pub fn insert_snack(plan: &Plan, slots: &IntentSlots, kb: &KnowledgeBase) -> Option<Plan> {
    let mut out = plan.clone();
    let mut used = meal_refs(plan);
    let mut changed = false;
    for d in 0..out.days.len() {
        if local_count(&out, d) >= 4 {
            continue;
        }
        let day = &out.days[d];
        let daytime: Vec<(usize, &Activity)> = day.daytime().collect();
        let slot = daytime.windows(2).find_map(|w| {
            let (_, prev) = w[0];
            let (ni, next) = w[1];
            let start = prev.end + GAP;
            (start + SNACK_MIN + GAP <= next.start && prev.city_id == day.city_id).then_some((ni, start))
        });
        let Some((at, start)) = slot else { continue };
        let anchor = daytime.iter().rev().find(|(i, a)| *i < at && a.kind == ActivityKind::Attraction).and_then(|(_, a)| poi(kb, a));
        let from = anchor.map(|p| p.coords).or_else(|| kb.city(&day.city_id).map(|c| c.coords))?;
        let city = day.city_id.clone();
        let Some(id) = pick_restaurant(kb, slots, &city, anchor, from, start, start + SNACK_MIN, MealSlot::Snack, &used) else {
            continue;
        };
        let p = kb.poi(&id).expect("picked from the KB");
        used.insert(id.clone());
        out.days[d].activities.insert(
            at,
            Activity {
                kind: ActivityKind::Meal(MealSlot::Snack),
                poi_or_link: id.to_string(),
                city_id: city,
                start,
                end: start + SNACK_MIN,
                cost: meal_cost(p, plan.party_size),
            },
        );
        changed = true;
    }
    changed.then_some(out)
}

/// Ordering of candidate plans: fewer failures, then lower cost.
fn key(report: &PlanReport, plan: &Plan) -> (usize, crate::money::Money) {
    (report.fail_count(), CostLedger::of(plan).total)
}

#[derive(Debug, Clone)]
pub struct RepairOutcome {
    pub plan: Plan,
    pub report: PlanReport,
    /// Failing-constraint count before the first round and after each round.
    pub fail_counts: Vec<usize>,
    /// Plans evaluated, including the starting plan.
    pub evaluated: usize,
}

/// Apply targeted moves for failing constraints. A move is kept only when it
/// lowers (failures, cost), so failures never increase between rounds.
pub fn repair(plan: Plan, slots: &IntentSlots, kb: &KnowledgeBase, rounds: usize, max_evals: usize) -> RepairOutcome {
    let mut report = evaluate_plan(&plan, slots, kb);
    let mut plan = plan;
    let mut evaluated = 1;
    let mut fail_counts = vec![report.fail_count()];
    for _ in 0..rounds {
        if report.final_pass {
            break;
        }
        let mut improved = false;
        for id in report.failing() {
            for mv in moves_for(id) {
                if evaluated >= max_evals {
                    break;
                }
                let Some(candidate) = apply(*mv, &plan, slots, kb) else { continue };
                evaluated += 1;
                let r = evaluate_plan(&candidate, slots, kb);
                if key(&r, &candidate) < key(&report, &plan) {
                    plan = candidate;
                    report = r;
                    improved = true;
                }
            }
        }
        fail_counts.push(report.fail_count());
        if !improved {
            break;
        }
    }
    RepairOutcome { plan, report, fail_counts, evaluated }
}
