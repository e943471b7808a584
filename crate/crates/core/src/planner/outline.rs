use std::collections::BTreeSet;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::alloc::{cheapest_leg, Allocation, LegRole};
use super::PlanError;
use crate::dialogue::IntentSlots;
use crate::kb::{weather_on, CityId, KnowledgeBase, LinkId, Poi, PoiId, PoiKind, WeatherCondition};

pub const DEFAULT_PACE: u32 = 2;
pub const MAX_PACE: u32 = 4;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutlineDay {
    pub date: NaiveDate,
    pub city: CityId,
    pub attractions: Vec<PoiId>,
    /// Morning leg into `city`.
    pub arrival: Option<LinkId>,
    /// Evening leg out of `city`.
    pub departure: Option<LinkId>,
    /// Where the night is spent; `None` on the final day.
    pub night_city: Option<CityId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outline {
    pub days: Vec<OutlineDay>,
}

/// A chosen link for one leg.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitChoice {
    pub day: usize,
    pub role: LegRole,
    pub link: LinkId,
}

pub fn pace(slots: &IntentSlots) -> usize {
    slots.pace.unwrap_or(DEFAULT_PACE).clamp(1, MAX_PACE) as usize
}

pub fn is_rain(kb: &KnowledgeBase, city: &CityId, date: NaiveDate) -> bool {
    weather_on(kb, city, date).condition == WeatherCondition::Rain
}

/// Selection order on a given day: indoor before outdoor when it rains, then
/// rating (higher first), then id.
pub fn attraction_order(a: &Poi, b: &Poi, rain: bool) -> std::cmp::Ordering {
    let outdoor_penalty = |p: &Poi| rain && !p.indoor;
    outdoor_penalty(a)
        .cmp(&outdoor_penalty(b))
        .then(b.rating.total_cmp(&a.rating))
        .then_with(|| a.id.cmp(&b.id))
}

/// Greedy attraction choice per day: required sites first, then the best
/// remaining candidates by [`attraction_order`], at most `pace` per day.
pub fn plan_attractions(alloc: &Allocation, slots: &IntentSlots, kb: &KnowledgeBase) -> Result<Outline, PlanError> {
    let pace = pace(slots);
    let excluded = slots.excluded();
    let order = alloc.order();
    let mut per_day: Vec<Vec<PoiId>> = vec![Vec::new(); alloc.num_days];
    let mut used: BTreeSet<PoiId> = BTreeSet::new();

    for id in slots.required() {
        if excluded.contains(&id) {
            return Err(PlanError::Infeasible(format!("required site `{id}` is also excluded")));
        }
        let poi = kb
            .poi(&id)
            .filter(|p| p.kind() == PoiKind::Attraction)
            .ok_or_else(|| PlanError::Infeasible(format!("required site `{id}` is not a known attraction")))?;
        let stay = alloc
            .stays
            .iter()
            .find(|s| s.city == poi.city_id)
            .ok_or_else(|| PlanError::Infeasible(format!("required site `{id}` is not in any planned city")))?;
        // Prefer full days over the arrival morning of the whole trip.
        let days: Vec<usize> = (stay.first_day..stay.first_day + stay.days).collect();
        let slot = days
            .iter()
            .copied()
            .filter(|d| *d != 0)
            .chain(days.iter().copied().filter(|d| *d == 0))
            .find(|d| per_day[*d].len() < pace)
            .ok_or_else(|| PlanError::Infeasible(format!("too many required sites in `{}`", poi.city_id)))?;
        per_day[slot].push(id.clone());
        used.insert(id);
    }

    // Rain days choose first so indoor sites are not spent on dry days.
    let rain: Vec<bool> = (0..alloc.num_days).map(|d| is_rain(kb, alloc.city_on(d), alloc.date(d))).collect();
    let mut fill_order: Vec<usize> = (0..alloc.num_days).collect();
    fill_order.sort_by_key(|d| !rain[*d]);
    for d in fill_order {
        let city = alloc.city_on(d);
        let picks = &mut per_day[d];
        let mut candidates: Vec<&Poi> = kb
            .pois_in(city, PoiKind::Attraction)
            .filter(|p| !excluded.contains(&p.id) && !used.contains(&p.id))
            .collect();
        candidates.sort_by(|a, b| attraction_order(a, b, rain[d]));
        for p in candidates {
            if picks.len() >= pace {
                break;
            }
            picks.push(p.id.clone());
            used.insert(p.id.clone());
        }
    }
    let days: Vec<OutlineDay> = per_day
        .into_iter()
        .enumerate()
        .map(|(d, attractions)| OutlineDay {
            date: alloc.date(d),
            city: alloc.city_on(d).clone(),
            attractions,
            arrival: None,
            departure: None,
            night_city: alloc.night_city(d).cloned(),
        })
        .collect();
    debug_assert!(order.iter().all(|c| days.iter().any(|d| &d.city == c)));
    Ok(Outline { days })
}

/// Cheapest admissible link for every leg of the allocation.
pub fn arrange_transit(alloc: &Allocation, slots: &IntentSlots, kb: &KnowledgeBase) -> Result<Vec<TransitChoice>, PlanError> {
    let pref = slots.transport();
    alloc
        .legs()
        .into_iter()
        .map(|leg| {
            cheapest_leg(kb, &leg.from, &leg.to, leg.role, pref)
                .map(|l| TransitChoice { day: leg.day, role: leg.role, link: l.id.clone() })
                .ok_or_else(|| {
                    PlanError::Infeasible(format!(
                        "no {} link from `{}` to `{}` on {}",
                        leg.role.as_str(),
                        leg.from,
                        leg.to,
                        alloc.date(leg.day)
                    ))
                })
        })
        .collect()
}

impl Outline {
    pub fn with_transit(mut self, transit: &[TransitChoice]) -> Outline {
        for t in transit {
            let day = &mut self.days[t.day];
            match t.role {
                LegRole::Outbound => day.arrival = Some(t.link.clone()),
                LegRole::Move | LegRole::Return => day.departure = Some(t.link.clone()),
            }
        }
        self
    }
}
