use std::collections::{BTreeMap, BTreeSet};

use super::Diagnostic;
use crate::dialogue::{HotelPref, IntentSlots};
use crate::kb::{KnowledgeBase, PoiId, TransportLink};
use crate::plan::{resolve_activity, ActivityKind, CostLedger, MealSlot, Plan};

pub(super) fn city_coverage(plan: &Plan, query: &IntentSlots) -> Vec<Diagnostic> {
    let Some(dests) = &query.destination_cities else { return Vec::new() };
    let covered: BTreeSet<_> = plan.days.iter().map(|d| &d.city_id).collect();
    dests
        .iter()
        .filter(|c| !covered.contains(c))
        .map(|c| Diagnostic::plan(format!("destination `{c}` is not assigned to any day")))
        .collect()
}

pub(super) fn activity_repetition(plan: &Plan) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut seen: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    // Hotel -> day of its most recent night.
    let mut last_night: BTreeMap<&str, usize> = BTreeMap::new();
    let mut previous_hotel: Option<(&str, usize)> = None;
    for (d, i, a) in plan.activities() {
        match a.kind {
            ActivityKind::Transport => {}
            ActivityKind::Lodging => {
                let h = a.poi_or_link.as_str();
                if let Some(&prev_day) = last_night.get(h) {
                    let consecutive = previous_hotel == Some((h, prev_day)) && prev_day + 1 == d;
                    if !consecutive {
                        out.push(Diagnostic::at(
                            d,
                            i,
                            format!("hotel `{h}` used again after day {prev_day} without consecutive nights"),
                        ));
                    }
                }
                last_night.insert(h, d);
                previous_hotel = Some((h, d));
            }
            ActivityKind::Attraction | ActivityKind::Meal(_) => {
                let r = a.poi_or_link.as_str();
                if let Some(&(pd, pi)) = seen.get(r) {
                    out.push(Diagnostic::at(d, i, format!("`{r}` already visited at day {pd} activity {pi}")));
                } else {
                    seen.insert(r, (d, i));
                }
            }
        }
    }
    out
}

pub(super) fn time_interval(plan: &Plan, min_gap: u16) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for (d, day) in plan.days.iter().enumerate() {
        let daytime: Vec<_> = day.daytime().collect();
        for pair in daytime.windows(2) {
            let ((pi, prev), (ni, next)) = (pair[0], pair[1]);
            let gap = i32::from(next.start) - i32::from(prev.end);
            if gap < i32::from(min_gap) {
                out.push(Diagnostic::at(
                    d,
                    ni,
                    format!("only {gap} min between activity {pi} and activity {ni}, need {min_gap}"),
                ));
            }
        }
    }
    out
}

pub(super) fn accommodation(plan: &Plan) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let last = plan.days.len().saturating_sub(1);
    for (d, day) in plan.days.iter().enumerate() {
        let nights = day.lodging().count();
        if d < last && nights != 1 {
            out.push(Diagnostic::on_day(d, format!("expected one night of lodging, found {nights}")));
        }
        if d == last {
            for (i, a) in day.activities.iter().enumerate() {
                if a.is_lodging() {
                    out.push(Diagnostic::at(d, i, "lodging booked on the final day"));
                }
            }
        }
    }
    out
}

pub(super) fn daily_schedule(plan: &Plan, min_window: u16) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for (d, day) in plan.days.iter().enumerate() {
        let first = day.daytime().map(|(_, a)| a.start).min();
        let last = day.daytime().map(|(_, a)| a.end).max();
        match (first, last) {
            (Some(s), Some(e)) => {
                let window = i32::from(e) - i32::from(s);
                if window < i32::from(min_window) {
                    out.push(Diagnostic::on_day(d, format!("day covers {window} min, need {min_window}")));
                }
            }
            _ => out.push(Diagnostic::on_day(d, "no activities planned")),
        }
    }
    out
}

pub(super) fn return_journey(plan: &Plan, query: &IntentSlots, kb: &KnowledgeBase) -> Vec<Diagnostic> {
    let Some(home) = &query.departure_city else { return Vec::new() };
    let Some((d, day)) = plan.days.iter().enumerate().next_back() else {
        return vec![Diagnostic::plan("plan has no days")];
    };
    let returns = day
        .activities
        .iter()
        .filter_map(|a| a.link_id())
        .filter_map(|id| kb.link(&id))
        .any(|l| &l.to_city == home);
    if returns {
        Vec::new()
    } else {
        vec![Diagnostic::on_day(d, format!("final day has no transport back to `{home}`"))]
    }
}

pub(super) fn poi_validation(plan: &Plan, kb: &KnowledgeBase) -> Vec<Diagnostic> {
    plan.activities().filter_map(|(d, i, a)| resolve_activity(kb, a).err().map(|m| Diagnostic::at(d, i, m))).collect()
}

pub(super) fn location_logic(plan: &Plan, kb: &KnowledgeBase) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for (d, day) in plan.days.iter().enumerate() {
        let legs: Vec<(usize, &TransportLink)> = day
            .activities
            .iter()
            .enumerate()
            .filter_map(|(i, a)| a.link_id().and_then(|id| kb.link(&id)).map(|l| (i, l)))
            .collect();
        if let Some((_, first)) = legs.first() {
            let mut visited = std::iter::once(&first.from_city).chain(legs.iter().map(|(_, l)| &l.to_city));
            if !visited.any(|c| *c == day.city_id) {
                out.push(Diagnostic::on_day(d, format!("assigned city `{}` is not visited that day", day.city_id)));
            }
        }
        for pair in legs.windows(2) {
            let ((_, prev), (ni, next)) = (pair[0], pair[1]);
            if next.from_city != prev.to_city {
                out.push(Diagnostic::at(
                    d,
                    ni,
                    format!("leg departs `{}` but the previous leg arrived at `{}`", next.from_city, prev.to_city),
                ));
            }
        }
        for (i, a) in day.activities.iter().enumerate() {
            if let Some(id) = a.link_id() {
                if let Some(l) = kb.link(&id) {
                    if a.city_id != l.to_city {
                        out.push(Diagnostic::at(d, i, format!("leg is tagged `{}` but arrives at `{}`", a.city_id, l.to_city)));
                    }
                }
                continue;
            }
            let Some(poi) = a.poi_id().and_then(|id| kb.poi(&id)) else { continue };
            let expected = match legs.iter().rev().find(|(li, _)| *li < i) {
                Some((_, l)) => &l.to_city,
                None => match legs.iter().find(|(li, _)| *li > i) {
                    Some((_, l)) => &l.from_city,
                    None => &day.city_id,
                },
            };
            if &poi.city_id != expected {
                out.push(Diagnostic::at(d, i, format!("`{}` is in `{}`, expected `{expected}`", poi.id, poi.city_id)));
            } else if a.city_id != poi.city_id {
                out.push(Diagnostic::at(d, i, format!("activity tagged `{}` but `{}` is in `{}`", a.city_id, poi.id, poi.city_id)));
            }
        }
    }
    out
}

pub(super) fn activity_count(plan: &Plan, min_activities: usize) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for (d, day) in plan.days.iter().enumerate() {
        let local: Vec<_> = day
            .activities
            .iter()
            .filter(|a| matches!(a.kind, ActivityKind::Attraction | ActivityKind::Meal(_)) && a.city_id == day.city_id)
            .collect();
        if local.len() < min_activities {
            out.push(Diagnostic::on_day(
                d,
                format!("{} activities in `{}`, need {min_activities}", local.len(), day.city_id),
            ));
        }
        for slot in [MealSlot::Breakfast, MealSlot::Lunch, MealSlot::Dinner] {
            let n = local.iter().filter(|a| a.kind == ActivityKind::Meal(slot)).count();
            if n != 1 {
                let name = ActivityKind::Meal(slot).as_str();
                out.push(Diagnostic::on_day(d, format!("expected one {name}, found {n}")));
            }
        }
    }
    out
}

pub(super) fn budget(plan: &Plan, query: &IntentSlots) -> Vec<Diagnostic> {
    let Some(limit) = query.budget_total else { return Vec::new() };
    let total = CostLedger::of(plan).total;
    if total > limit {
        vec![Diagnostic::plan(format!("total cost {total} exceeds budget {limit}"))]
    } else {
        Vec::new()
    }
}

pub(super) fn hotel_type(plan: &Plan, query: &IntentSlots, kb: &KnowledgeBase) -> Vec<Diagnostic> {
    let pref = match query.hotel_type {
        None | Some(HotelPref::Any) => return Vec::new(),
        Some(p) => p,
    };
    plan.activities()
        .filter(|(_, _, a)| a.is_lodging())
        .filter_map(|(d, i, a)| {
            let hotel = kb.poi(&PoiId::new(a.poi_or_link.clone()))?.hotel()?;
            (!pref.accepts(hotel.hotel_type))
                .then(|| Diagnostic::at(d, i, format!("`{}` is {:?}, wanted {pref:?}", a.poi_or_link, hotel.hotel_type)))
        })
        .collect()
}

pub(super) fn required_sites(plan: &Plan, query: &IntentSlots) -> Vec<Diagnostic> {
    let visited: BTreeSet<&str> = plan
        .activities()
        .filter(|(_, _, a)| a.kind == ActivityKind::Attraction)
        .map(|(_, _, a)| a.poi_or_link.as_str())
        .collect();
    query
        .required()
        .iter()
        .filter(|id| !visited.contains(id.as_str()))
        .map(|id| Diagnostic::plan(format!("required site `{id}` is missing")))
        .collect()
}

pub(super) fn excluded_sites(plan: &Plan, query: &IntentSlots) -> Vec<Diagnostic> {
    let excluded = query.excluded();
    if excluded.is_empty() {
        return Vec::new();
    }
    plan.activities()
        .filter(|(_, _, a)| !a.is_transport() && excluded.contains(&PoiId::new(a.poi_or_link.clone())))
        .map(|(d, i, a)| Diagnostic::at(d, i, format!("excluded site `{}` is scheduled", a.poi_or_link)))
        .collect()
}

