//! Tourism knowledge base: cities, points of interest, transport and weather.
//!
//! A [`KnowledgeBase`] is immutable once built. Both ingestion
//! ([`load_kb`]) and the synthetic generator ([`synth_kb`]) funnel their
//! records through [`KnowledgeBase::build`], which enforces referential
//! integrity and the nearby-linkage bounds and reports every record it had
//! to drop.

mod load;
mod synth;
mod types;

use std::collections::{BTreeMap, BTreeSet};

use chrono::NaiveDate;
use serde::Serialize;

use crate::geo::{self, Coords};

pub use load::{load_kb, load_kb_dir, write_kb_dir, KbSources, KB_FILES};
pub use synth::{synth_kb, synth_kb_with, SynthConfig};
pub use types::*;

/// Linkage bounds for attractions after ingestion.
pub const MIN_NEARBY: usize = 3;
pub const MAX_NEARBY: usize = 5;

#[derive(Debug, thiserror::Error)]
pub enum KbError {
    #[error("cannot read {source_name}: {error}")]
    Unreadable {
        source_name: String,
        #[source]
        error: std::io::Error,
    },
    #[error("unknown city `{0}`")]
    UnknownCity(CityId),
    #[error("unknown point of interest `{0}`")]
    UnknownPoi(PoiId),
    #[error("`{0}` is not an attraction")]
    NotAnAttraction(PoiId),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Which record stream a record came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Cities,
    Attractions,
    Restaurants,
    Hotels,
    Transport,
    Weather,
}

impl Domain {
    pub const ALL: [Domain; 6] = [
        Domain::Cities,
        Domain::Attractions,
        Domain::Restaurants,
        Domain::Hotels,
        Domain::Transport,
        Domain::Weather,
    ];

    pub fn file_name(self) -> &'static str {
        match self {
            Domain::Cities => "cities.jsonl",
            Domain::Attractions => "attractions.jsonl",
            Domain::Restaurants => "restaurants.jsonl",
            Domain::Hotels => "hotels.jsonl",
            Domain::Transport => "transport.jsonl",
            Domain::Weather => "weather.jsonl",
        }
    }

    pub(crate) fn poi_kind(self) -> Option<PoiKind> {
        match self {
            Domain::Attractions => Some(PoiKind::Attraction),
            Domain::Restaurants => Some(PoiKind::Restaurant),
            Domain::Hotels => Some(PoiKind::Hotel),
            _ => None,
        }
    }
}

/// One dropped record and why.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Rejection {
    pub domain: Domain,
    /// 1-based line within the stream, 0 for records that did not come
    /// from a stream.
    pub line: usize,
    pub id: Option<String>,
    pub reason: String,
}

/// Records dropped or repaired while building a knowledge base.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RejectionReport {
    pub rejected: Vec<Rejection>,
    /// Non-fatal fixes, e.g. nearby lists trimmed to the five closest.
    pub repaired: Vec<Rejection>,
}

impl RejectionReport {
    pub fn is_clean(&self) -> bool {
        self.rejected.is_empty() && self.repaired.is_empty()
    }

    pub(crate) fn reject(&mut self, domain: Domain, line: usize, id: Option<String>, reason: impl Into<String>) {
        self.rejected.push(Rejection { domain, line, id, reason: reason.into() });
    }

    fn repair(&mut self, domain: Domain, line: usize, id: Option<String>, reason: impl Into<String>) {
        self.repaired.push(Rejection { domain, line, id, reason: reason.into() });
    }

    pub fn render(&self) -> String {
        let mut out = format!("{} record(s) rejected, {} repaired\n", self.rejected.len(), self.repaired.len());
        for (tag, list) in [("rejected", &self.rejected), ("repaired", &self.repaired)] {
            for r in list {
                out.push_str(&format!(
                    "{tag}\t{}:{}\t{}\t{}\n",
                    r.domain.file_name(),
                    r.line,
                    r.id.as_deref().unwrap_or("-"),
                    r.reason
                ));
            }
        }
        out
    }
}

/// A record paired with the line it came from.
#[derive(Debug, Clone)]
pub struct Sourced<T> {
    pub line: usize,
    pub record: T,
}

impl<T> Sourced<T> {
    pub fn detached(record: T) -> Self {
        Sourced { line: 0, record }
    }
}

/// Typed records awaiting integrity checks.
#[derive(Debug, Clone, Default)]
pub struct KbParts {
    pub cities: Vec<Sourced<City>>,
    pub pois: Vec<(Domain, Sourced<Poi>)>,
    pub links: Vec<Sourced<TransportLink>>,
    pub weather: Vec<Sourced<WeatherRecord>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KnowledgeBase {
    cities: BTreeMap<CityId, City>,
    pois: BTreeMap<PoiId, Poi>,
    links: BTreeMap<LinkId, TransportLink>,
    weather: BTreeMap<(CityId, NaiveDate), WeatherRecord>,
    pois_by_city: BTreeMap<(CityId, PoiKind), Vec<PoiId>>,
    links_by_pair: BTreeMap<(CityId, CityId), Vec<LinkId>>,
}

impl KnowledgeBase {
    /// Validate records and assemble the store. Invalid records are
    /// dropped and listed in the returned report; nothing here is fatal.
    pub fn build(parts: KbParts) -> (KnowledgeBase, RejectionReport) {
        let mut report = RejectionReport::default();

        let mut cities = BTreeMap::new();
        for Sourced { line, record } in parts.cities {
            let id = Some(record.id.0.clone());
            if record.name.trim().is_empty() {
                report.reject(Domain::Cities, line, id, "missing key field: name");
            } else if !record.coords.is_valid() {
                report.reject(Domain::Cities, line, id, "coordinates out of range");
            } else if cities.contains_key(&record.id) {
                report.reject(Domain::Cities, line, id, "duplicate id");
            } else {
                cities.insert(record.id.clone(), record);
            }
        }

        // First pass: per-record invariants. Attractions are held back until
        // every restaurant and hotel is known so their links can be checked.
        let mut pois: BTreeMap<PoiId, Poi> = BTreeMap::new();
        let mut attractions = Vec::new();
        let mut seen_ids = BTreeSet::new();
        for (domain, Sourced { line, record }) in parts.pois {
            let id = Some(record.id.0.clone());
            if let Some(reason) = poi_defect(&record, &cities) {
                report.reject(domain, line, id, reason);
            } else if !seen_ids.insert(record.id.clone()) {
                report.reject(domain, line, id, "duplicate id");
            } else if record.kind() == PoiKind::Attraction {
                attractions.push((domain, line, record));
            } else {
                pois.insert(record.id.clone(), record);
            }
        }

        for (domain, line, mut poi) in attractions {
            let id = Some(poi.id.0.clone());
            let PoiDetail::Attraction(detail) = &mut poi.detail else { unreachable!() };
            let mut rejected = None;
            for (list, kind) in [
                (&mut detail.nearby_restaurants, PoiKind::Restaurant),
                (&mut detail.nearby_hotels, PoiKind::Hotel),
            ] {
                let before = list.len();
                list.retain(|n| pois.get(&n.poi).is_some_and(|p| p.kind() == kind));
                let dangling = before - list.len();
                list.sort_by(|a, b| a.distance_km.total_cmp(&b.distance_km).then_with(|| a.poi.cmp(&b.poi)));
                let mut seen = BTreeSet::new();
                list.retain(|n| seen.insert(n.poi.clone()));
                if dangling > 0 {
                    report.repair(domain, line, id.clone(), format!("dropped {dangling} dangling nearby {} link(s)", kind.as_str()));
                }
                if list.len() > MAX_NEARBY {
                    report.repair(domain, line, id.clone(), format!("kept the {MAX_NEARBY} closest of {} nearby {}s", list.len(), kind.as_str()));
                    list.truncate(MAX_NEARBY);
                }
                if list.len() < MIN_NEARBY && rejected.is_none() {
                    rejected = Some(format!("only {} resolvable nearby {}s (need {MIN_NEARBY})", list.len(), kind.as_str()));
                }
            }
            match rejected {
                Some(reason) => report.reject(domain, line, id, reason),
                None => {
                    pois.insert(poi.id.clone(), poi);
                }
            }
        }

        let mut links = BTreeMap::new();
        for Sourced { line, record } in parts.links {
            let id = Some(record.id.0.clone());
            let reason = if !cities.contains_key(&record.from_city) {
                Some(format!("dangling reference: from_city {}", record.from_city))
            } else if !cities.contains_key(&record.to_city) {
                Some(format!("dangling reference: to_city {}", record.to_city))
            } else if record.from_city == record.to_city {
                Some("link starts and ends in the same city".to_string())
            } else if record.price.is_negative() {
                Some("negative price".to_string())
            } else if !record.timing_consistent() {
                Some("arrival does not match departure plus duration".to_string())
            } else if links.contains_key(&record.id) {
                Some("duplicate id".to_string())
            } else {
                None
            };
            match reason {
                Some(r) => report.reject(Domain::Transport, line, id, r),
                None => {
                    links.insert(record.id.clone(), record);
                }
            }
        }

        let mut weather = BTreeMap::new();
        for Sourced { line, record } in parts.weather {
            let id = Some(format!("{}@{}", record.city_id, record.date));
            let key = (record.city_id.clone(), record.date);
            if !cities.contains_key(&record.city_id) {
                report.reject(Domain::Weather, line, id, format!("dangling reference: city_id {}", record.city_id));
            } else if record.low_c > record.high_c {
                report.reject(Domain::Weather, line, id, "low temperature above high");
            } else if record.condition == WeatherCondition::Unknown {
                report.reject(Domain::Weather, line, id, "condition `unknown` is reserved for missing records");
            } else if let std::collections::btree_map::Entry::Vacant(slot) = weather.entry(key) {
                slot.insert(record);
            } else {
                report.reject(Domain::Weather, line, id, "duplicate city/date");
            }
        }

        let mut pois_by_city: BTreeMap<(CityId, PoiKind), Vec<PoiId>> = BTreeMap::new();
        for poi in pois.values() {
            pois_by_city.entry((poi.city_id.clone(), poi.kind())).or_default().push(poi.id.clone());
        }
        let mut links_by_pair: BTreeMap<(CityId, CityId), Vec<LinkId>> = BTreeMap::new();
        for link in links.values() {
            links_by_pair.entry((link.from_city.clone(), link.to_city.clone())).or_default().push(link.id.clone());
        }
        for ids in links_by_pair.values_mut() {
            ids.sort_by(|a, b| {
                let (la, lb) = (&links[a], &links[b]);
                (la.depart, la.price, &la.id).cmp(&(lb.depart, lb.price, &lb.id))
            });
        }

        let kb = KnowledgeBase { cities, pois, links, weather, pois_by_city, links_by_pair };
        (kb, report)
    }

    pub fn cities(&self) -> impl Iterator<Item = &City> {
        self.cities.values()
    }

    pub fn pois(&self) -> impl Iterator<Item = &Poi> {
        self.pois.values()
    }

    pub fn links(&self) -> impl Iterator<Item = &TransportLink> {
        self.links.values()
    }

    pub fn weather_records(&self) -> impl Iterator<Item = &WeatherRecord> {
        self.weather.values()
    }

    pub fn city(&self, id: &CityId) -> Option<&City> {
        self.cities.get(id)
    }

    pub fn poi(&self, id: &PoiId) -> Option<&Poi> {
        self.pois.get(id)
    }

    pub fn link(&self, id: &LinkId) -> Option<&TransportLink> {
        self.links.get(id)
    }

    pub fn city_by_name(&self, name: &str) -> Option<&City> {
        self.cities.values().find(|c| c.name.eq_ignore_ascii_case(name))
    }

    pub fn poi_by_name(&self, name: &str) -> Option<&Poi> {
        self.pois.values().find(|p| p.name.eq_ignore_ascii_case(name))
    }

    /// POIs of `kind` located in `city`, ordered by id.
    pub fn pois_in(&self, city: &CityId, kind: PoiKind) -> impl Iterator<Item = &Poi> {
        self.pois_by_city
            .get(&(city.clone(), kind))
            .into_iter()
            .flatten()
            .map(|id| &self.pois[id])
    }

    /// All links between two cities ordered by departure, then price.
    pub fn links_between(&self, from: &CityId, to: &CityId) -> impl Iterator<Item = &TransportLink> {
        self.links_by_pair
            .get(&(from.clone(), to.clone()))
            .into_iter()
            .flatten()
            .map(|id| &self.links[id])
    }

    pub fn is_empty(&self) -> bool {
        self.cities.is_empty()
    }

    /// Every record back out as typed parts, in id order.
    pub fn to_parts(&self) -> KbParts {
        KbParts {
            cities: self.cities.values().cloned().map(Sourced::detached).collect(),
            pois: self
                .pois
                .values()
                .map(|p| {
                    let domain = match p.kind() {
                        PoiKind::Attraction => Domain::Attractions,
                        PoiKind::Restaurant => Domain::Restaurants,
                        PoiKind::Hotel => Domain::Hotels,
                    };
                    (domain, Sourced::detached(p.clone()))
                })
                .collect(),
            links: self.links.values().cloned().map(Sourced::detached).collect(),
            weather: self.weather.values().cloned().map(Sourced::detached).collect(),
        }
    }

    /// Full scan confirming every reference resolves.
    pub fn check_integrity(&self) -> Vec<String> {
        let mut problems = Vec::new();
        for poi in self.pois.values() {
            if !self.cities.contains_key(&poi.city_id) {
                problems.push(format!("{}: city {} missing", poi.id, poi.city_id));
            }
            if let Some(a) = poi.attraction() {
                for (list, kind) in [(&a.nearby_restaurants, PoiKind::Restaurant), (&a.nearby_hotels, PoiKind::Hotel)] {
                    if !(MIN_NEARBY..=MAX_NEARBY).contains(&list.len()) {
                        problems.push(format!("{}: {} nearby {}s", poi.id, list.len(), kind.as_str()));
                    }
                    for n in list {
                        if self.pois.get(&n.poi).map(Poi::kind) != Some(kind) {
                            problems.push(format!("{}: nearby {} does not resolve", poi.id, n.poi));
                        }
                    }
                }
            }
        }
        for link in self.links.values() {
            for c in [&link.from_city, &link.to_city] {
                if !self.cities.contains_key(c) {
                    problems.push(format!("{}: city {c} missing", link.id));
                }
            }
        }
        for w in self.weather.values() {
            if !self.cities.contains_key(&w.city_id) {
                problems.push(format!("weather {}@{}: city missing", w.city_id, w.date));
            }
        }
        problems
    }
}

fn poi_defect(poi: &Poi, cities: &BTreeMap<CityId, City>) -> Option<String> {
    if poi.name.trim().is_empty() {
        return Some("missing key field: name".into());
    }
    if !cities.contains_key(&poi.city_id) {
        return Some(format!("dangling reference: city_id {}", poi.city_id));
    }
    if !poi.coords.is_valid() {
        return Some("coordinates out of range".into());
    }
    if !poi.open_window.is_valid() {
        return Some("invalid opening hours".into());
    }
    if !(0.0..=5.0).contains(&poi.rating) {
        return Some("rating outside 0-5".into());
    }
    if poi.avg_cost.is_negative() {
        return Some("negative average cost".into());
    }
    match &poi.detail {
        PoiDetail::Attraction(a) => {
            if a.tickets.is_empty() {
                return Some("attraction without tickets".into());
            }
            if a.tickets.iter().any(|t| t.price.is_negative()) {
                return Some("negative ticket price".into());
            }
            if a.visit_minutes == 0 {
                return Some("zero visit duration".into());
            }
            if a.nearby_restaurants.iter().chain(&a.nearby_hotels).any(|n| n.distance_km.is_nan() || n.distance_km < 0.0) {
                return Some("negative nearby distance".into());
            }
        }
        PoiDetail::Hotel(h) => {
            if h.rooms.is_empty() {
                return Some("hotel without rooms".into());
            }
            if h.rooms.iter().any(|r| r.nightly_price <= crate::money::Money::ZERO) {
                return Some("non-positive room price".into());
            }
        }
        PoiDetail::Restaurant(_) => {}
    }
    None
}

/// POIs of `kind` in the attraction's city ranked by straight-line distance
/// (rounded to 10 m), ties broken by id, truncated to `limit`.
pub fn nearby_pois(kb: &KnowledgeBase, attraction: &PoiId, kind: PoiKind, limit: usize) -> Result<Vec<(PoiId, f64)>, KbError> {
    let anchor = kb.poi(attraction).ok_or_else(|| KbError::UnknownPoi(attraction.clone()))?;
    if anchor.kind() != PoiKind::Attraction {
        return Err(KbError::NotAnAttraction(attraction.clone()));
    }
    Ok(rank_by_distance(kb, &anchor.city_id, anchor.coords, kind, Some(&anchor.id), limit))
}

/// Ranking used by [`nearby_pois`] around an arbitrary point.
pub fn rank_by_distance(
    kb: &KnowledgeBase,
    city: &CityId,
    from: Coords,
    kind: PoiKind,
    skip: Option<&PoiId>,
    limit: usize,
) -> Vec<(PoiId, f64)> {
    if limit == 0 {
        return Vec::new();
    }
    let mut ranked: Vec<(PoiId, f64)> = kb
        .pois_in(city, kind)
        .filter(|p| Some(&p.id) != skip)
        .map(|p| (p.id.clone(), geo::rounded_km(from, p.coords)))
        .collect();
    ranked.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(limit);
    ranked
}

/// Links from `from` to `to` departing at or after `earliest_depart`,
/// ordered by departure then price.
pub fn find_transport<'kb>(
    kb: &'kb KnowledgeBase,
    from: &CityId,
    to: &CityId,
    earliest_depart: u16,
) -> Result<Vec<&'kb TransportLink>, KbError> {
    for c in [from, to] {
        if kb.city(c).is_none() {
            return Err(KbError::UnknownCity(c.clone()));
        }
    }
    Ok(kb.links_between(from, to).filter(|l| l.depart >= earliest_depart).collect())
}

/// The weather record for a city and date, or the `unknown` sentinel.
pub fn weather_on(kb: &KnowledgeBase, city: &CityId, date: NaiveDate) -> WeatherRecord {
    kb.weather
        .get(&(city.clone(), date))
        .cloned()
        .unwrap_or_else(|| WeatherRecord::unknown(city.clone(), date))
}
