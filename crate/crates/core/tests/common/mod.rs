//! Helpers shared by the integration tests: fixture loading, an independent
//! re-implementation of every plan checker, and a plan/query fuzzer.
#![allow(dead_code)]

pub mod golden;

use std::path::PathBuf;

use itinera_core::dialogue::{HotelPref, IntentSlots, SlotName, TransportPref, TravelQuery};
use itinera_core::kb::{load_kb_dir, synth_kb, CityId, HotelType, KnowledgeBase, PoiId, PoiKind, TransportLink, TransportMode};
use itinera_core::planner::LegRole;
use itinera_core::money::Money;
use itinera_core::plan::{Activity, ActivityKind, MealSlot, Plan};
use itinera_core::validator::{ConstraintId, ConstraintResult, Diagnostic, PlanReport};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/appendix_kb")
}

pub fn appendix_kb() -> KnowledgeBase {
    load_kb_dir(&fixture_dir()).expect("fixture loads").0
}

/// The desk-scale KB most tests plan against.
pub fn desk_kb() -> KnowledgeBase {
    synth_kb(5, 8, 10).expect("synthetic KB")
}

// ---------------------------------------------------------------------------
// Oracle: each rule written straight from its one-line definition, by
// brute force over positions, sharing no code with the validator.

fn kind_is(a: &Activity, s: &str) -> bool {
    a.kind.as_str() == s
}

fn is_sight_or_meal(a: &Activity) -> bool {
    matches!(a.kind.as_str(), "attraction" | "breakfast" | "lunch" | "dinner" | "snack")
}

pub fn oracle(id: ConstraintId, plan: &Plan, q: &IntentSlots, kb: &KnowledgeBase) -> bool {
    match id {
        ConstraintId::CityCoverage => match &q.destination_cities {
            None => true,
            Some(dests) => dests.iter().all(|c| plan.days.iter().any(|d| &d.city_id == c)),
        },
        ConstraintId::ActivityRepetition => {
            let flat: Vec<(usize, &Activity)> =
                plan.days.iter().enumerate().flat_map(|(d, day)| day.activities.iter().map(move |a| (d, a))).collect();
            for x in 0..flat.len() {
                for y in x + 1..flat.len() {
                    let (a, b) = (flat[x].1, flat[y].1);
                    if is_sight_or_meal(a) && is_sight_or_meal(b) && a.poi_or_link == b.poi_or_link {
                        return false;
                    }
                }
            }
            let nights: Vec<(usize, &str)> =
                flat.iter().filter(|(_, a)| kind_is(a, "lodging")).map(|(d, a)| (*d, a.poi_or_link.as_str())).collect();
            for x in 0..nights.len() {
                for y in x + 1..nights.len() {
                    if nights[x].1 != nights[y].1 {
                        continue;
                    }
                    // Every stay between the two must be the same hotel on
                    // back-to-back days.
                    for k in x..y {
                        if nights[k + 1].1 != nights[x].1 || nights[k + 1].0 != nights[k].0 + 1 {
                            return false;
                        }
                    }
                }
            }
            true
        }
        ConstraintId::TimeInterval => plan.days.iter().all(|day| {
            let times: Vec<(i64, i64)> = day
                .activities
                .iter()
                .filter(|a| !kind_is(a, "lodging"))
                .map(|a| (a.start as i64, a.end as i64))
                .collect();
            (1..times.len()).all(|k| times[k].0 - times[k - 1].1 >= 30)
        }),
        ConstraintId::Accommodation => {
            let n = plan.days.len();
            plan.days.iter().enumerate().all(|(d, day)| {
                let c = day.activities.iter().filter(|a| kind_is(a, "lodging")).count();
                if d + 1 == n {
                    c == 0
                } else {
                    c == 1
                }
            })
        }
        ConstraintId::DailySchedule => plan.days.iter().all(|day| {
            let day_acts: Vec<&Activity> = day.activities.iter().filter(|a| !kind_is(a, "lodging")).collect();
            if day_acts.is_empty() {
                return false;
            }
            let first = day_acts.iter().map(|a| a.start as i64).min().unwrap();
            let last = day_acts.iter().map(|a| a.end as i64).max().unwrap();
            last - first >= 8 * 60
        }),
        ConstraintId::ReturnJourney => {
            let Some(home) = &q.departure_city else { return true };
            let Some(last) = plan.days.last() else { return false };
            last.activities.iter().any(|a| {
                kind_is(a, "transport") && kb.links().any(|l| l.id.as_str() == a.poi_or_link && &l.to_city == home)
            })
        }
        ConstraintId::PoiValidation => plan.days.iter().flat_map(|d| &d.activities).all(|a| {
            let want = match a.kind.as_str() {
                "transport" => return kb.links().any(|l| l.id.as_str() == a.poi_or_link),
                "attraction" => PoiKind::Attraction,
                "lodging" => PoiKind::Hotel,
                _ => PoiKind::Restaurant,
            };
            kb.pois().any(|p| p.id.as_str() == a.poi_or_link && p.kind() == want)
        }),
        ConstraintId::LocationLogic => plan.days.iter().all(|day| location_ok(day, kb)),
        ConstraintId::ActivityCount => plan.days.iter().all(|day| {
            let here: Vec<&Activity> =
                day.activities.iter().filter(|a| is_sight_or_meal(a) && a.city_id == day.city_id).collect();
            here.len() >= 4
                && ["breakfast", "lunch", "dinner"].iter().all(|m| here.iter().filter(|a| kind_is(a, m)).count() == 1)
        }),
        ConstraintId::Budget => match q.budget_total {
            None => true,
            Some(b) => {
                let fen: i64 = plan.days.iter().flat_map(|d| &d.activities).map(|a| a.cost.fen()).sum();
                fen <= b.fen()
            }
        },
        ConstraintId::HotelType => {
            let want = match q.hotel_type {
                None | Some(HotelPref::Any) => return true,
                Some(HotelPref::Chain) => HotelType::Chain,
                Some(HotelPref::Upscale) => HotelType::Upscale,
            };
            plan.days.iter().flat_map(|d| &d.activities).filter(|a| kind_is(a, "lodging")).all(|a| {
                match kb.pois().find(|p| p.id.as_str() == a.poi_or_link).and_then(|p| p.hotel()) {
                    Some(h) => h.hotel_type == want,
                    None => true,
                }
            })
        }
        ConstraintId::RequiredSites => q.required_sites.iter().flatten().all(|r| {
            plan.days.iter().flat_map(|d| &d.activities).any(|a| kind_is(a, "attraction") && a.poi_or_link == r.as_str())
        }),
        ConstraintId::ExcludedSites => q.excluded_sites.iter().flatten().all(|x| {
            plan.days.iter().flat_map(|d| &d.activities).all(|a| kind_is(a, "transport") || a.poi_or_link != x.as_str())
        }),
    }
}

fn location_ok(day: &itinera_core::plan::DayPlan, kb: &KnowledgeBase) -> bool {
    let find_link = |id: &str| kb.links().find(|l| l.id.as_str() == id);
    let mut legs = Vec::new();
    for (i, a) in day.activities.iter().enumerate() {
        if kind_is(a, "transport") {
            if let Some(l) = find_link(&a.poi_or_link) {
                legs.push((i, l));
            }
        }
    }
    if !legs.is_empty() {
        let mut visited = vec![&legs[0].1.from_city];
        for (_, l) in &legs {
            visited.push(&l.to_city);
        }
        if !visited.contains(&&day.city_id) {
            return false;
        }
        for k in 1..legs.len() {
            if legs[k].1.from_city != legs[k - 1].1.to_city {
                return false;
            }
        }
    }
    for (i, a) in day.activities.iter().enumerate() {
        if kind_is(a, "transport") {
            if let Some(l) = find_link(&a.poi_or_link) {
                if a.city_id != l.to_city {
                    return false;
                }
            }
            continue;
        }
        let Some(poi) = kb.pois().find(|p| p.id.as_str() == a.poi_or_link) else { continue };
        let before = legs.iter().filter(|(li, _)| *li < i).count();
        let expected: &CityId = if before > 0 {
            &legs[before - 1].1.to_city
        } else if let Some((_, l)) = legs.first() {
            &l.from_city
        } else {
            &day.city_id
        };
        if &poi.city_id != expected || a.city_id != poi.city_id {
            return false;
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Fuzzer: start from planner output and apply random damage.

fn random_poi(kb: &KnowledgeBase, kind: Option<PoiKind>, rng: &mut ChaCha8Rng) -> String {
    let ids: Vec<&str> =
        kb.pois().filter(|p| kind.is_none_or(|k| p.kind() == k)).map(|p| p.id.as_str()).collect();
    ids.choose(rng).expect("KB has POIs").to_string()
}

fn random_city(kb: &KnowledgeBase, rng: &mut ChaCha8Rng) -> CityId {
    let ids: Vec<&CityId> = kb.cities().map(|c| &c.id).collect();
    (*ids.choose(rng).unwrap()).clone()
}

fn pick(plan: &Plan, rng: &mut ChaCha8Rng) -> Option<(usize, usize)> {
    let spots: Vec<(usize, usize)> = plan.activities().map(|(d, i, _)| (d, i)).collect();
    spots.choose(rng).copied()
}

pub fn mutate_plan(plan: &mut Plan, kb: &KnowledgeBase, rng: &mut ChaCha8Rng) {
    let Some((d, i)) = pick(plan, rng) else { return };
    match rng.gen_range(0..16) {
        0 => {
            plan.days[d].activities.remove(i);
        }
        1 => {
            let a = &mut plan.days[d].activities[i];
            let delta: i32 = rng.gen_range(-60..=60);
            let s = (a.start as i32 + delta).clamp(0, 1380) as u16;
            let len = a.end.saturating_sub(a.start).max(1);
            a.start = s;
            if a.kind != ActivityKind::Lodging {
                a.end = (s + len).min(1440);
            }
        }
        2 => {
            let a = &mut plan.days[d].activities[i];
            if let Some(k) = a.kind.poi_kind() {
                a.poi_or_link = random_poi(kb, Some(k), rng);
            }
        }
        3 => {
            let a = &mut plan.days[d].activities[i];
            a.poi_or_link = random_poi(kb, None, rng);
        }
        4 => plan.days[d].activities[i].poi_or_link = "no-such-id".into(),
        5 => {
            // Copy an activity from elsewhere into this day.
            if let Some((d2, i2)) = pick(plan, rng) {
                let a = plan.days[d2].activities[i2].clone();
                plan.days[d].activities.push(a);
            }
        }
        6 => plan.days[d].city_id = random_city(kb, rng),
        7 => {
            let last = plan.days.len() - 1;
            let day = if rng.gen_bool(0.5) { d } else { last };
            if let Some(pos) = plan.days[day].activities.iter().position(|a| a.is_lodging()) {
                plan.days[day].activities.remove(pos);
            } else {
                let hotel = random_poi(kb, Some(PoiKind::Hotel), rng);
                let city = kb.pois().find(|p| p.id.as_str() == hotel).unwrap().city_id.clone();
                plan.days[day].activities.push(Activity {
                    kind: ActivityKind::Lodging,
                    poi_or_link: hotel,
                    city_id: city,
                    start: 1300,
                    end: 420,
                    cost: Money::from_yuan(200),
                });
            }
        }
        8 => {
            // Reuse one night's hotel on another night.
            let nights: Vec<(usize, usize)> =
                plan.activities().filter(|(_, _, a)| a.is_lodging()).map(|(d, i, _)| (d, i)).collect();
            if let (Some(&(d1, i1)), Some(&(d2, i2))) = (nights.choose(rng), nights.choose(rng)) {
                let h = plan.days[d1].activities[i1].poi_or_link.clone();
                plan.days[d2].activities[i2].poi_or_link = h;
            }
        }
        9 => {
            let links: Vec<&str> = kb.links().map(|l| l.id.as_str()).collect();
            let a = &mut plan.days[d].activities[i];
            if a.is_transport() {
                a.poi_or_link = links.choose(rng).unwrap().to_string();
            }
        }
        10 => plan.days[d].activities[i].city_id = random_city(kb, rng),
        11 => plan.days[d].activities[i].cost = Money::from_fen(rng.gen_range(0..200_000)),
        12 => {
            let a = &mut plan.days[d].activities[i];
            if a.kind.is_meal() {
                a.kind = *[
                    ActivityKind::Meal(MealSlot::Breakfast),
                    ActivityKind::Meal(MealSlot::Lunch),
                    ActivityKind::Meal(MealSlot::Dinner),
                    ActivityKind::Meal(MealSlot::Snack),
                ]
                .choose(rng)
                .unwrap();
            }
        }
        13 => {
            let last = plan.days.len() - 1;
            plan.days[last].activities.retain(|a| !a.is_transport());
        }
        14 => {
            // Shrink the day window.
            let a = &mut plan.days[d].activities[i];
            if !a.is_lodging() {
                a.end = a.start + 1;
            }
        }
        _ => {
            // Swap two activities' POIs, possibly across cities.
            if let Some((d2, i2)) = pick(plan, rng) {
                let x = plan.days[d].activities[i].poi_or_link.clone();
                let y = std::mem::replace(&mut plan.days[d2].activities[i2].poi_or_link, x);
                plan.days[d].activities[i].poi_or_link = y;
            }
        }
    }
    for day in &mut plan.days {
        day.activities.sort_by_key(|a| a.start);
    }
    if plan.days.iter().all(|d| d.activities.is_empty()) {
        plan.days.truncate(1);
    }
}

pub fn mutate_query(q: &mut IntentSlots, plan: &Plan, kb: &KnowledgeBase, rng: &mut ChaCha8Rng) {
    let total: i64 = plan.activities().map(|(_, _, a)| a.cost.fen()).sum();
    match rng.gen_range(0..9) {
        0 => q.budget_total = Some(Money::from_fen((total + rng.gen_range(-total / 10..=total / 10)).max(0))),
        1 => q.budget_total = None,
        2 => q.hotel_type = Some(*[HotelPref::Chain, HotelPref::Upscale, HotelPref::Any].choose(rng).unwrap()),
        3 => {
            let extra = random_poi(kb, Some(PoiKind::Attraction), rng);
            q.required_sites.get_or_insert_with(Default::default).insert(PoiId::new(extra));
        }
        4 => {
            let used: Vec<String> = plan.activities().filter(|(_, _, a)| !a.is_transport()).map(|(_, _, a)| a.poi_or_link.clone()).collect();
            if let Some(u) = used.choose(rng) {
                q.excluded_sites.get_or_insert_with(Default::default).insert(PoiId::new(u.clone()));
            }
        }
        5 => q.departure_city = Some(random_city(kb, rng)),
        6 => {
            let mut d = q.destination_cities.clone().unwrap_or_default();
            d.push(random_city(kb, rng));
            d.truncate(4);
            q.destination_cities = Some(d);
        }
        7 => {
            let slot = *SlotName::ALL.choose(rng).unwrap();
            q.unfill(slot);
        }
        _ => {}
    }
}

/// `count` (plan, query) pairs: planner output for sampled queries, each
/// damaged by 0-3 plan mutations and 0-2 query mutations.
pub fn fuzz_pairs(kb: &KnowledgeBase, bases: &[(TravelQuery, Plan)], count: usize, rng: &mut ChaCha8Rng) -> Vec<(Plan, IntentSlots)> {
    (0..count)
        .map(|_| {
            let (q, p) = bases.choose(rng).unwrap();
            let mut plan = p.clone();
            let mut slots = q.slots.clone();
            for _ in 0..rng.gen_range(0..=3) {
                mutate_plan(&mut plan, kb, rng);
            }
            for _ in 0..rng.gen_range(0..=2) {
                mutate_query(&mut slots, &plan, kb, rng);
            }
            (plan, slots)
        })
        .collect()
}

/// Planner output for `n` sampled explicit queries.
pub fn base_plans(kb: &KnowledgeBase, n: u64) -> Vec<(TravelQuery, Plan)> {
    use itinera_core::dataset::sample_explicit;
    use itinera_core::planner::{generate_plan, SearchBudget};
    (0..n)
        .map(|s| {
            let q = sample_explicit(kb, format!("b{s:03}"), s, SearchBudget::default()).expect("sample").query;
            let p = generate_plan(&q, kb, SearchBudget::default()).expect("plan").plan;
            (q, p)
        })
        .collect()
}

pub fn mini_kb() -> KnowledgeBase {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/mini_kb");
    load_kb_dir(&dir).expect("mini fixture loads").0
}

/// Hand-built plan and query that satisfy every rule on [`mini_kb`].
pub fn all_pass_fixture() -> (Plan, TravelQuery) {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/plans");
    let plan = itinera_core::plan::parse_plan(&std::fs::read(dir.join("all_pass.json")).unwrap()).unwrap();
    let query: TravelQuery = serde_json::from_slice(&std::fs::read(dir.join("all_pass_query.json")).unwrap()).unwrap();
    (plan, query)
}

// ---------------------------------------------------------------------------
// Metric fixtures.

/// Report with exactly `fails` failing.
pub fn report_failing(fails: &[ConstraintId]) -> PlanReport {
    PlanReport::from_results(
        ConstraintId::ALL
            .into_iter()
            .map(|id| {
                let diags = if fails.contains(&id) { vec![Diagnostic::plan("x")] } else { vec![] };
                ConstraintResult::from_diagnostics(id, diags)
            })
            .collect(),
    )
}

/// Pearson r written out from its definition.
pub fn closed_form(x: &[bool], y: &[bool]) -> f64 {
    let n = x.len() as f64;
    let xs: Vec<f64> = x.iter().map(|&b| f64::from(u8::from(b))).collect();
    let ys: Vec<f64> = y.iter().map(|&b| f64::from(u8::from(b))).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let cov: f64 = xs.iter().zip(&ys).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = xs.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ys.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

/// Four plans on the mini KB: all-pass, over budget, 20-minute gap, and
/// 20-minute gap plus a missing required site.
pub fn four_plan_corpus() -> (Vec<TravelQuery>, Vec<Plan>) {
    let (plan, query) = all_pass_fixture();
    let mut queries = Vec::new();
    let mut plans = Vec::new();
    for k in 0..4 {
        let mut q = query.clone();
        let mut p = plan.clone();
        q.id = format!("p{k}");
        p.query_id = q.id.clone();
        if k == 1 {
            q.slots.budget_total = Some(Money::from_yuan(1500));
        }
        if k >= 2 {
            p.days[0].activities[1].start = 555;
            p.days[0].activities[1].end = 600;
            p.days[0].activities[2].start = 620;
        }
        if k == 3 {
            q.slots.excluded_sites = Some(Default::default());
            q.slots.required_sites.as_mut().unwrap().insert(PoiId::new("sh-tower"));
        }
        queries.push(q);
        plans.push(p);
    }
    (queries, plans)
}

// ---------------------------------------------------------------------------
// Visiting-order oracle.

// Independent leg rules: same-day services only; the morning leg departs at
// 06:00 or later and lands by 11:00; evening legs depart at 19:00 or later.
pub fn admissible(l: &TransportLink, role: LegRole, pref: TransportPref) -> bool {
    let mode_ok = match pref {
        TransportPref::Any => true,
        TransportPref::RailAny => l.mode != TransportMode::TransferChain,
        TransportPref::HighSpeedOnly => l.mode == TransportMode::HighSpeedRail,
    };
    let time_ok = match role {
        LegRole::Outbound => l.depart >= 360 && l.arrive <= 660,
        LegRole::Move | LegRole::Return => l.depart >= 1140,
    };
    mode_ok && time_ok && l.day_offset == 0 && l.arrive >= l.depart
}

pub fn brute_leg(kb: &KnowledgeBase, from: &CityId, to: &CityId, role: LegRole, pref: TransportPref) -> Option<Money> {
    kb.links().filter(|l| &l.from_city == from && &l.to_city == to && admissible(l, role, pref)).map(|l| l.price).min()
}

pub fn permutations(items: &[CityId]) -> Vec<Vec<CityId>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head.clone());
            out.push(tail);
        }
    }
    out
}

/// Cheapest order by exhaustive enumeration; the first of equal-cost orders
/// in lexicographic order wins.
pub fn brute_order(kb: &KnowledgeBase, slots: &IntentSlots) -> Option<(Vec<CityId>, Money)> {
    let home = slots.departure_city.clone().unwrap();
    let mut dests = slots.destination_cities.clone().unwrap();
    dests.sort();
    let pref = slots.transport_pref.unwrap_or(TransportPref::Any);
    let mut best: Option<(Vec<CityId>, Money)> = None;
    for order in permutations(&dests) {
        let mut stops = vec![home.clone()];
        stops.extend(order.iter().cloned());
        stops.push(home.clone());
        let mut total = Some(Money::ZERO);
        for (i, w) in stops.windows(2).enumerate() {
            let role = if i == 0 {
                LegRole::Outbound
            } else if i == stops.len() - 2 {
                LegRole::Return
            } else {
                LegRole::Move
            };
            total = total.and_then(|t| brute_leg(kb, &w[0], &w[1], role, pref).map(|p| t + p));
        }
        if let Some(t) = total {
            if best.as_ref().is_none_or(|(_, b)| t < *b) {
                best = Some((order, t));
            }
        }
    }
    best
}
