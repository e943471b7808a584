use std::collections::{BTreeMap, BTreeSet};

use super::outline::Outline;
use super::PlanError;
use crate::dialogue::{HotelPref, IntentSlots};
use crate::geo::Coords;
use crate::kb::{rank_by_distance, CityId, KnowledgeBase, LinkId, Poi, PoiId, PoiKind, TransportLink};
use crate::money::Money;
use crate::plan::{Activity, ActivityKind, DayPlan, MealSlot, Plan};

pub const DAY_START: u16 = 8 * 60;
pub const GAP: u16 = 30;
pub const BREAKFAST_MIN: u16 = 45;
pub const MEAL_MIN: u16 = 60;
pub const SNACK_MIN: u16 = 30;
pub const LUNCH_START: u16 = 11 * 60 + 30;
/// A morning attraction may delay lunch to this start at the latest.
pub const LUNCH_LATEST: u16 = 13 * 60 + 30;
pub const DINNER_START: u16 = 17 * 60 + 30;
/// Lodging runs from the evening to checkout the next morning.
pub const CHECKOUT: u16 = 7 * 60;
pub const LAST_MINUTE: u16 = 1439;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnackRule {
    /// Add a snack only when meals and attractions fall short of four.
    IfShort,
    Always,
    Never,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Slot {
    Transport(LinkId),
    Attraction(PoiId),
    Meal(MealSlot),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Timed {
    pub slot: Slot,
    pub start: u16,
    pub end: u16,
}

#[derive(Debug, Clone, Default)]
pub struct Timeline {
    pub items: Vec<Timed>,
    /// Attractions that did not fit.
    pub dropped: Vec<PoiId>,
}

impl Timeline {
    pub fn last_end(&self) -> u16 {
        self.items.iter().map(|t| t.end).max().unwrap_or(DAY_START)
    }
}

/// Lay out one day: optional morning leg, breakfast, attractions around lunch,
/// dinner at 17:30, optional evening leg. Every gap is at least [`GAP`].
pub fn schedule_day(
    kb: &KnowledgeBase,
    attractions: &[PoiId],
    arrival: Option<&TransportLink>,
    departure: Option<&TransportLink>,
    snack: SnackRule,
) -> Timeline {
    let mut tl = Timeline::default();
    let mut t = DAY_START;
    if let Some(l) = arrival {
        tl.items.push(Timed { slot: Slot::Transport(l.id.clone()), start: l.depart, end: l.arrive });
        t = t.max(l.arrive + GAP);
    }
    tl.items.push(Timed { slot: Slot::Meal(MealSlot::Breakfast), start: t, end: t + BREAKFAST_MIN });
    t += BREAKFAST_MIN + GAP;

    let mut lunch_done = false;
    let mut placed = 0;
    let lunch = |tl: &mut Timeline, t: &mut u16| {
        let s = (*t).max(LUNCH_START);
        tl.items.push(Timed { slot: Slot::Meal(MealSlot::Lunch), start: s, end: s + MEAL_MIN });
        *t = s + MEAL_MIN + GAP;
    };
    for id in attractions {
        let Some((poi, visit)) = kb.poi(id).and_then(|p| p.attraction().map(|a| (p, a.visit_minutes))) else {
            tl.dropped.push(id.clone());
            continue;
        };
        let w = poi.open_window;
        if !lunch_done {
            let s = t.max(w.open);
            let e = s + visit;
            if e <= w.close && e + GAP <= LUNCH_LATEST {
                tl.items.push(Timed { slot: Slot::Attraction(id.clone()), start: s, end: e });
                t = e + GAP;
                placed += 1;
                continue;
            }
            lunch(&mut tl, &mut t);
            lunch_done = true;
        }
        let s = t.max(w.open);
        let e = s + visit;
        if e <= w.close && e + GAP <= DINNER_START {
            tl.items.push(Timed { slot: Slot::Attraction(id.clone()), start: s, end: e });
            t = e + GAP;
            placed += 1;
        } else {
            tl.dropped.push(id.clone());
        }
    }
    if !lunch_done {
        lunch(&mut tl, &mut t);
    }
    let want_snack = match snack {
        SnackRule::Always => true,
        SnackRule::Never => false,
        SnackRule::IfShort => placed == 0,
    };
    if want_snack {
        tl.items.push(Timed { slot: Slot::Meal(MealSlot::Snack), start: t, end: t + SNACK_MIN });
        t += SNACK_MIN + GAP;
    }
    let s = t.max(DINNER_START);
    tl.items.push(Timed { slot: Slot::Meal(MealSlot::Dinner), start: s, end: s + MEAL_MIN });
    if let Some(l) = departure {
        tl.items.push(Timed { slot: Slot::Transport(l.id.clone()), start: l.depart, end: l.arrive });
    }
    tl
}

/// Start of a night's lodging given the day's other activities.
pub fn lodging_start(last_end: u16) -> u16 {
    (last_end + GAP).min(LAST_MINUTE)
}

pub fn attraction_cost(poi: &Poi, party: u32) -> Money {
    poi.attraction().map(|a| a.admission()).unwrap_or(Money::ZERO).times(party)
}

pub fn meal_cost(poi: &Poi, party: u32) -> Money {
    poi.avg_cost.times(party)
}

pub fn rooms_for(party: u32) -> u32 {
    party.div_ceil(2)
}

pub fn lodging_cost(poi: &Poi, party: u32) -> Money {
    poi.hotel().map(|h| h.cheapest_room()).unwrap_or(Money::ZERO).times(rooms_for(party))
}

pub fn transport_cost(link: &TransportLink, party: u32) -> Money {
    link.price.times(party)
}

fn cuisine_match(poi: &Poi, prefs: &[String]) -> bool {
    poi.restaurant().is_some_and(|r| r.cuisine.iter().any(|c| prefs.iter().any(|p| p.eq_ignore_ascii_case(c))))
}

fn is_snack_shop(poi: &Poi) -> bool {
    poi.restaurant().is_some_and(|r| r.is_snack_shop())
}

/// Choose a restaurant for a meal. Candidates come from the anchor
/// attraction's nearby list, then the whole city by distance from `from`;
/// within each source, matching cuisine first. Snack shops serve snacks and
/// main meals go to regular restaurants, relaxing that only as a last resort.
#[allow(clippy::too_many_arguments)]
pub fn pick_restaurant(
    kb: &KnowledgeBase,
    slots: &IntentSlots,
    city: &CityId,
    anchor: Option<&Poi>,
    from: Coords,
    start: u16,
    end: u16,
    slot: MealSlot,
    used: &BTreeSet<PoiId>,
) -> Option<PoiId> {
    let excluded = slots.excluded();
    let prefs = slots.cuisine_prefs.clone().unwrap_or_default();
    let nearby: Vec<PoiId> = anchor
        .filter(|a| &a.city_id == city)
        .and_then(|a| a.attraction())
        .map(|d| d.nearby_restaurants.iter().map(|n| n.poi.clone()).collect())
        .unwrap_or_default();
    let citywide: Vec<PoiId> =
        rank_by_distance(kb, city, from, PoiKind::Restaurant, None, usize::MAX).into_iter().map(|(id, _)| id).collect();
    let usable = |id: &PoiId| -> Option<&Poi> {
        let p = kb.poi(id)?;
        (p.kind() == PoiKind::Restaurant
            && &p.city_id == city
            && !used.contains(id)
            && !excluded.contains(id)
            && p.open_window.contains(start, end))
        .then_some(p)
    };
    let want_snack = slot == MealSlot::Snack;
    for strict_class in [true, false] {
        for source in [&nearby, &citywide] {
            let pool: Vec<&Poi> = source
                .iter()
                .filter_map(&usable)
                .filter(|p| !strict_class || is_snack_shop(p) == want_snack)
                .collect();
            if let Some(p) = pool.iter().find(|p| cuisine_match(p, &prefs)).or(pool.first()) {
                return Some(p.id.clone());
            }
        }
    }
    None
}

/// Choose a hotel near `anchor` matching `pref`; with `relax`, fall back to
/// the nearest hotel of any type.
pub fn pick_hotel(
    kb: &KnowledgeBase,
    slots: &IntentSlots,
    city: &CityId,
    anchor: Option<&Poi>,
    from: Coords,
    pref: HotelPref,
    relax: bool,
) -> Option<PoiId> {
    let excluded = slots.excluded();
    let fits = |id: &PoiId, pref: HotelPref| {
        kb.poi(id).is_some_and(|p| {
            &p.city_id == city && !excluded.contains(id) && p.hotel().is_some_and(|h| pref.accepts(h.hotel_type))
        })
    };
    let nearby: Vec<PoiId> = anchor
        .filter(|a| &a.city_id == city)
        .and_then(|a| a.attraction())
        .map(|d| d.nearby_hotels.iter().map(|n| n.poi.clone()).collect())
        .unwrap_or_default();
    let citywide: Vec<PoiId> =
        rank_by_distance(kb, city, from, PoiKind::Hotel, None, usize::MAX).into_iter().map(|(id, _)| id).collect();
    let prefs: &[HotelPref] = if relax { &[pref, HotelPref::Any] } else { &[pref] };
    for p in prefs {
        if let Some(id) = nearby.iter().chain(&citywide).find(|id| fits(id, *p)) {
            return Some(id.clone());
        }
    }
    None
}

fn city_coords(kb: &KnowledgeBase, city: &CityId) -> Coords {
    kb.city(city).map(|c| c.coords).unwrap_or(Coords::new(0.0, 0.0))
}

/// Hotels per night city, each near the first attraction visited there.
pub fn choose_hotels(
    outline: &Outline,
    timelines: &[Timeline],
    slots: &IntentSlots,
    kb: &KnowledgeBase,
    relax: bool,
) -> Result<BTreeMap<CityId, PoiId>, PlanError> {
    let mut out = BTreeMap::new();
    let night_cities: BTreeSet<&CityId> = outline.days.iter().filter_map(|d| d.night_city.as_ref()).collect();
    for city in night_cities {
        let anchor = outline
            .days
            .iter()
            .zip(timelines)
            .filter(|(d, _)| &d.city == city)
            .flat_map(|(_, tl)| tl.items.iter())
            .find_map(|t| match &t.slot {
                Slot::Attraction(id) => kb.poi(id),
                _ => None,
            });
        let from = anchor.map(|a| a.coords).unwrap_or_else(|| city_coords(kb, city));
        let hotel = pick_hotel(kb, slots, city, anchor, from, slots.hotel_pref(), relax).ok_or_else(|| {
            PlanError::Infeasible(format!("no {} hotel available in `{city}`", slots.hotel_pref().as_str()))
        })?;
        out.insert(city.clone(), hotel);
    }
    Ok(out)
}

/// Turn one day's timeline into activities, choosing restaurants.
#[allow(clippy::too_many_arguments)]
pub fn realize_day(
    kb: &KnowledgeBase,
    slots: &IntentSlots,
    city: &CityId,
    tl: &Timeline,
    previous_hotel: Option<&PoiId>,
    night_hotel: Option<&PoiId>,
    used: &mut BTreeSet<PoiId>,
) -> Vec<Activity> {
    let party = slots.party();
    let attractions: Vec<(usize, &Poi)> = tl
        .items
        .iter()
        .enumerate()
        .filter_map(|(i, t)| match &t.slot {
            Slot::Attraction(id) => kb.poi(id).map(|p| (i, p)),
            _ => None,
        })
        .collect();
    let centre = city_coords(kb, city);
    let mut acts = Vec::new();
    for (i, t) in tl.items.iter().enumerate() {
        match &t.slot {
            Slot::Transport(id) => {
                if let Some(l) = kb.link(id) {
                    acts.push(Activity {
                        kind: ActivityKind::Transport,
                        poi_or_link: id.to_string(),
                        city_id: l.to_city.clone(),
                        start: t.start,
                        end: t.end,
                        cost: transport_cost(l, party),
                    });
                }
            }
            Slot::Attraction(id) => {
                if let Some(p) = kb.poi(id) {
                    acts.push(Activity {
                        kind: ActivityKind::Attraction,
                        poi_or_link: id.to_string(),
                        city_id: p.city_id.clone(),
                        start: t.start,
                        end: t.end,
                        cost: attraction_cost(p, party),
                    });
                }
            }
            Slot::Meal(slot) => {
                let before = attractions.iter().rev().find(|(j, _)| *j < i).map(|(_, p)| *p);
                let after = attractions.iter().find(|(j, _)| *j > i).map(|(_, p)| *p);
                let anchor = match slot {
                    MealSlot::Breakfast => None,
                    _ => before.or(after),
                };
                let from = match slot {
                    MealSlot::Breakfast => previous_hotel
                        .and_then(|h| kb.poi(h))
                        .filter(|h| &h.city_id == city)
                        .map(|h| h.coords)
                        .or(after.map(|p| p.coords))
                        .unwrap_or(centre),
                    _ => anchor.map(|p| p.coords).unwrap_or(centre),
                };
                if let Some(id) = pick_restaurant(kb, slots, city, anchor, from, t.start, t.end, *slot, used) {
                    let p = kb.poi(&id).expect("picked from the KB");
                    used.insert(id.clone());
                    acts.push(Activity {
                        kind: ActivityKind::Meal(*slot),
                        poi_or_link: id.to_string(),
                        city_id: p.city_id.clone(),
                        start: t.start,
                        end: t.end,
                        cost: meal_cost(p, party),
                    });
                }
            }
        }
    }
    if let Some(h) = night_hotel.and_then(|h| kb.poi(h)) {
        acts.push(Activity {
            kind: ActivityKind::Lodging,
            poi_or_link: h.id.to_string(),
            city_id: h.city_id.clone(),
            start: lodging_start(tl.last_end()),
            end: CHECKOUT,
            cost: lodging_cost(h, party),
        });
    }
    acts
}

/// Schedule every outline day and attach restaurants and hotels. With
/// `relax`, a missing hotel type falls back to any hotel instead of failing.
pub fn build_plan(
    outline: &Outline,
    slots: &IntentSlots,
    kb: &KnowledgeBase,
    query_id: &str,
    relax: bool,
) -> Result<Plan, PlanError> {
    let timelines: Vec<Timeline> = outline
        .days
        .iter()
        .map(|d| {
            let arrival = d.arrival.as_ref().and_then(|id| kb.link(id));
            let departure = d.departure.as_ref().and_then(|id| kb.link(id));
            schedule_day(kb, &d.attractions, arrival, departure, SnackRule::IfShort)
        })
        .collect();
    let hotels = choose_hotels(outline, &timelines, slots, kb, relax)?;
    let mut used = BTreeSet::new();
    let mut days = Vec::with_capacity(outline.days.len());
    let mut previous_hotel: Option<&PoiId> = None;
    for (d, tl) in outline.days.iter().zip(&timelines) {
        let night = d.night_city.as_ref().and_then(|c| hotels.get(c));
        let activities = realize_day(kb, slots, &d.city, tl, previous_hotel, night, &mut used);
        days.push(DayPlan { date: d.date, city_id: d.city.clone(), activities });
        previous_hotel = night;
    }
    Ok(Plan { query_id: query_id.to_string(), party_size: slots.party(), days })
}

/// Detailed plan from a transit-annotated outline. Fails when no hotel of the
/// requested type exists in a night city.
pub fn detail_plan(outline: &Outline, slots: &IntentSlots, kb: &KnowledgeBase, query_id: &str) -> Result<Plan, PlanError> {
    build_plan(outline, slots, kb, query_id, false)
}
