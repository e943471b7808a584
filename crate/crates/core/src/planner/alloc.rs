use std::collections::BTreeSet;

use chrono::{Duration, NaiveDate};
use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::PlanError;
use crate::dialogue::{IntentSlots, SlotName, TransportPref};
use crate::kb::{find_transport, CityId, KnowledgeBase, PoiKind, TransportLink};
use crate::money::Money;

/// Earliest departure of a morning leg.
pub const MORNING_EARLIEST: u16 = 6 * 60;
/// Latest arrival of a morning leg.
pub const MORNING_ARRIVE_BY: u16 = 11 * 60;
/// Earliest departure of an evening leg: dinner ends at 18:30, plus the gap.
pub const EVENING_EARLIEST: u16 = 19 * 60;

/// Which part of the trip a transport leg serves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LegRole {
    /// Home to the first city, on the morning of day one.
    Outbound,
    /// Between destinations, in the evening after dinner.
    Move,
    /// Back home on the evening of the final day.
    Return,
}

impl LegRole {
    pub fn as_str(self) -> &'static str {
        match self {
            LegRole::Outbound => "outbound",
            LegRole::Move => "move",
            LegRole::Return => "return",
        }
    }

    pub fn earliest_depart(self) -> u16 {
        match self {
            LegRole::Outbound => MORNING_EARLIEST,
            LegRole::Move | LegRole::Return => EVENING_EARLIEST,
        }
    }

    /// Whether `link` can serve this role. Overnight services never qualify.
    pub fn admits(self, link: &TransportLink) -> bool {
        link.same_day()
            && link.depart >= self.earliest_depart()
            && (self != LegRole::Outbound || link.arrive <= MORNING_ARRIVE_BY)
    }
}

/// Links usable for a leg, cheapest first (then earliest, then id).
pub fn leg_options<'kb>(
    kb: &'kb KnowledgeBase,
    from: &CityId,
    to: &CityId,
    role: LegRole,
    pref: TransportPref,
) -> Vec<&'kb TransportLink> {
    let mut out: Vec<_> = find_transport(kb, from, to, role.earliest_depart())
        .unwrap_or_default()
        .into_iter()
        .filter(|l| role.admits(l) && pref.accepts(l.mode))
        .collect();
    out.sort_by(|a, b| a.price.cmp(&b.price).then(a.depart.cmp(&b.depart)).then_with(|| a.id.cmp(&b.id)));
    out
}

pub fn cheapest_leg<'kb>(
    kb: &'kb KnowledgeBase,
    from: &CityId,
    to: &CityId,
    role: LegRole,
    pref: TransportPref,
) -> Option<&'kb TransportLink> {
    leg_options(kb, from, to, role, pref).into_iter().next()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CityStay {
    pub city: CityId,
    pub first_day: usize,
    pub days: usize,
}

/// One transport leg of an allocation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Leg {
    pub day: usize,
    pub role: LegRole,
    pub from: CityId,
    pub to: CityId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Allocation {
    pub departure: CityId,
    pub start_date: NaiveDate,
    pub num_days: usize,
    pub stays: Vec<CityStay>,
    /// Per-person price of the cheapest admissible link on every leg.
    pub leg_cost: Money,
}

impl Allocation {
    pub fn order(&self) -> Vec<CityId> {
        self.stays.iter().map(|s| s.city.clone()).collect()
    }

    pub fn date(&self, day: usize) -> NaiveDate {
        self.start_date + Duration::days(day as i64)
    }

    pub fn city_on(&self, day: usize) -> &CityId {
        let stay = self.stays.iter().rev().find(|s| s.first_day <= day).expect("allocation covers every day");
        &stay.city
    }

    /// Dates of the evening moves between destinations.
    pub fn move_dates(&self) -> Vec<NaiveDate> {
        self.legs().iter().filter(|l| l.role == LegRole::Move).map(|l| self.date(l.day)).collect()
    }

    /// City whose hotel hosts the night after `day`; `None` on the final day.
    pub fn night_city(&self, day: usize) -> Option<&CityId> {
        if day + 1 >= self.num_days {
            None
        } else {
            Some(self.city_on(day + 1))
        }
    }

    pub fn legs(&self) -> Vec<Leg> {
        let mut legs = Vec::new();
        let Some(first) = self.stays.first() else { return legs };
        legs.push(Leg { day: 0, role: LegRole::Outbound, from: self.departure.clone(), to: first.city.clone() });
        for pair in self.stays.windows(2) {
            legs.push(Leg {
                day: pair[1].first_day - 1,
                role: LegRole::Move,
                from: pair[0].city.clone(),
                to: pair[1].city.clone(),
            });
        }
        let last = self.stays.last().expect("nonempty");
        legs.push(Leg {
            day: self.num_days - 1,
            role: LegRole::Return,
            from: last.city.clone(),
            to: self.departure.clone(),
        });
        legs
    }
}

/// Cheapest per-person cost of visiting `order` from `home` and back, or the
/// first leg that has no admissible link.
pub fn order_cost(
    kb: &KnowledgeBase,
    home: &CityId,
    order: &[CityId],
    pref: TransportPref,
) -> Result<Money, (CityId, CityId, LegRole)> {
    let mut total = Money::ZERO;
    let mut stops: Vec<(&CityId, &CityId, LegRole)> = Vec::new();
    let first = order.first().expect("nonempty order");
    stops.push((home, first, LegRole::Outbound));
    for pair in order.windows(2) {
        stops.push((&pair[0], &pair[1], LegRole::Move));
    }
    stops.push((order.last().expect("nonempty"), home, LegRole::Return));
    for (from, to, role) in stops {
        match cheapest_leg(kb, from, to, role, pref) {
            Some(l) => total += l.price,
            None => return Err((from.clone(), to.clone(), role)),
        }
    }
    Ok(total)
}

pub(crate) fn require_core(slots: &IntentSlots) -> Result<(), PlanError> {
    let missing: Vec<SlotName> = SlotName::PLANNING_CORE.into_iter().filter(|s| !slots.is_filled(*s)).collect();
    if missing.is_empty() {
        Ok(())
    } else {
        Err(PlanError::MissingSlots(missing))
    }
}

/// Core slots present, cities known and distinct, enough days.
pub(crate) fn check_trip(slots: &IntentSlots, kb: &KnowledgeBase) -> Result<(), PlanError> {
    require_core(slots)?;
    let home = slots.departure_city.as_ref().expect("checked");
    let dests = slots.destination_cities.as_ref().expect("checked");
    if dests.is_empty() {
        return Err(PlanError::Infeasible("no destination cities".into()));
    }
    for c in dests.iter().chain([home]) {
        if kb.city(c).is_none() {
            return Err(PlanError::Infeasible(format!("unknown city `{c}`")));
        }
    }
    let distinct: BTreeSet<_> = dests.iter().collect();
    if distinct.len() != dests.len() || distinct.contains(home) {
        return Err(PlanError::Infeasible("destinations must be distinct and differ from the departure city".into()));
    }
    let days = slots.num_days.expect("checked") as usize;
    if days < dests.len() {
        return Err(PlanError::Infeasible(format!("{days} days cannot cover {} destinations", dests.len())));
    }
    Ok(())
}

/// Every feasible visiting order with its leg cost, cheapest first; ties keep
/// lexicographic id order. The error lists a missing leg when no order works.
pub fn ranked_orders(slots: &IntentSlots, kb: &KnowledgeBase) -> Result<Vec<(Vec<CityId>, Money)>, PlanError> {
    check_trip(slots, kb)?;
    let home = slots.departure_city.as_ref().expect("checked");
    let mut dests = slots.destination_cities.clone().expect("checked");
    dests.sort();
    let pref = slots.transport();
    let mut feasible = Vec::new();
    let mut first_gap = None;
    for order in dests.iter().cloned().permutations(dests.len()) {
        match order_cost(kb, home, &order, pref) {
            Ok(cost) => feasible.push((order, cost)),
            Err(gap) => {
                first_gap.get_or_insert(gap);
            }
        }
    }
    if feasible.is_empty() {
        let (from, to, role) = first_gap.expect("at least one order was tried");
        return Err(PlanError::Infeasible(format!("no {} link from `{from}` to `{to}`", role.as_str())));
    }
    // Stable sort keeps the lexicographic order among equal costs.
    feasible.sort_by_key(|(_, cost)| *cost);
    Ok(feasible)
}

/// Split `total` days among cities: one day each, the rest in proportion to
/// `supply` by largest remainder, remainder ties going to the earlier entry.
pub fn split_days(total: usize, supply: &[usize]) -> Vec<usize> {
    let k = supply.len();
    assert!(k > 0 && total >= k, "need at least one day per city");
    let spare = total - k;
    let weights: Vec<usize> = if supply.iter().all(|s| *s == 0) { vec![1; k] } else { supply.to_vec() };
    let sum: usize = weights.iter().sum();
    let mut days: Vec<usize> = weights.iter().map(|w| 1 + spare * w / sum).collect();
    let given: usize = days.iter().sum::<usize>() - k;
    let mut by_remainder: Vec<usize> = (0..k).collect();
    by_remainder.sort_by(|a, b| ((spare * weights[*b]) % sum).cmp(&((spare * weights[*a]) % sum)).then(a.cmp(b)));
    for i in by_remainder.into_iter().take(spare - given) {
        days[i] += 1;
    }
    days
}

fn supply(kb: &KnowledgeBase, city: &CityId, slots: &IntentSlots) -> usize {
    let excluded = slots.excluded();
    kb.pois_in(city, PoiKind::Attraction).filter(|p| !excluded.contains(&p.id)).count()
}

/// Allocation for a given visiting order.
pub fn allocation_for(order: &[CityId], leg_cost: Money, slots: &IntentSlots, kb: &KnowledgeBase) -> Allocation {
    let days = slots.num_days.expect("checked") as usize;
    let mut by_id: Vec<&CityId> = order.iter().collect();
    by_id.sort();
    let split_sorted = split_days(days, &by_id.iter().map(|c| supply(kb, c, slots)).collect::<Vec<_>>());
    let mut first_day = 0;
    let stays = order
        .iter()
        .map(|c| {
            let n = split_sorted[by_id.iter().position(|x| *x == c).expect("same set")];
            let stay = CityStay { city: c.clone(), first_day, days: n };
            first_day += n;
            stay
        })
        .collect();
    Allocation {
        departure: slots.departure_city.clone().expect("checked"),
        start_date: slots.start_date.expect("checked"),
        num_days: days,
        stays,
        leg_cost,
    }
}

/// Cheapest visiting order, days split by attraction supply.
pub fn allocate_days(slots: &IntentSlots, kb: &KnowledgeBase) -> Result<Allocation, PlanError> {
    let orders = ranked_orders(slots, kb)?;
    let (order, cost) = &orders[0];
    Ok(allocation_for(order, *cost, slots, kb))
}
