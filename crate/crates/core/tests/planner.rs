mod common;

use std::collections::BTreeSet;

use chrono::NaiveDate;
use common::{appendix_kb, brute_leg, brute_order, desk_kb, mini_kb, oracle};
use itinera_core::dataset::sample_explicit;
use itinera_core::dialogue::{IntentSlots, RevisionRequest, TransportPref, TravelQuery};
use itinera_core::kb::{
    synth_kb, weather_on, CityId, KnowledgeBase, PoiId, PoiKind, TransportLink, TransportMode,
    WeatherCondition,
};
use itinera_core::money::Money;
use itinera_core::plan::{serialize_plan, ActivityKind, Plan};
use itinera_core::planner::{
    allocate_days, allocation_for, arrange_transit, cheapest_leg, detail_plan, generate_plan, leg_options,
    plan_attractions, ranked_orders, repair, revise_plan, LegRole, Outline, OutlineDay, PlanError, SearchBudget,
};
use itinera_core::validator::ConstraintId;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn city(s: &str) -> CityId {
    CityId::new(s)
}

fn trip(kb: &KnowledgeBase, home: &str, dests: &[&str], days: u32) -> IntentSlots {
    let date = kb.weather_records().map(|w| w.date).min().unwrap_or(NaiveDate::from_ymd_opt(2024, 4, 3).unwrap());
    IntentSlots {
        departure_city: Some(city(home)),
        destination_cities: Some(dests.iter().map(|c| city(c)).collect()),
        start_date: Some(date),
        num_days: Some(days),
        party_size: Some(2),
        ..Default::default()
    }
}

fn query(id: &str, slots: IntentSlots) -> TravelQuery {
    TravelQuery { id: id.to_string(), slots }
}

fn sampled(kb: &KnowledgeBase, seed: u64) -> TravelQuery {
    sample_explicit(kb, format!("q{seed:03}"), seed, SearchBudget::default()).expect("sample").query
}

fn without_links(kb: &KnowledgeBase, drop: impl Fn(&TransportLink) -> bool) -> KnowledgeBase {
    let mut parts = kb.to_parts();
    parts.links.retain(|l| !drop(&l.record));
    KnowledgeBase::build(parts).0
}

#[test]
fn two_cities_equal_supply_split_evenly() {
    let kb = synth_kb(11, 3, 6).unwrap();
    let cities: Vec<String> = kb.cities().map(|c| c.id.to_string()).collect();
    let slots = trip(&kb, &cities[0], &[&cities[1], &cities[2]], 4);
    let alloc = allocate_days(&slots, &kb).unwrap();
    let days: Vec<usize> = alloc.stays.iter().map(|s| s.days).collect();
    assert_eq!(days, vec![2, 2]);
    assert_eq!(alloc.stays[0].first_day, 0);
    assert_eq!(alloc.stays[1].first_day, 2);
    let order: BTreeSet<_> = alloc.order().into_iter().collect();
    assert_eq!(order, slots.destination_cities.clone().unwrap().into_iter().collect());
}

#[test]
fn ordering_without_a_link_is_excluded() {
    let kb = synth_kb(4, 4, 6).unwrap();
    let ids: Vec<CityId> = kb.cities().map(|c| c.id.clone()).collect();
    let (b, c) = (ids[1].clone(), ids[2].clone());
    let cut = without_links(&kb, |l| l.from_city == b && l.to_city == c);
    let slots = trip(&cut, ids[0].as_str(), &[b.as_str(), c.as_str(), ids[3].as_str()], 5);
    let orders = ranked_orders(&slots, &cut).unwrap();
    assert!(!orders.is_empty());
    for (order, _) in &orders {
        assert!(!order.windows(2).any(|w| w[0] == b && w[1] == c), "{order:?} uses a missing leg");
    }
    // Exactly the orders with b immediately before c are gone.
    assert_eq!(orders.len(), 6 - 2);
    let (best, cost) = brute_order(&cut, &slots).unwrap();
    assert_eq!(orders[0], (best, cost));
}

#[test]
fn no_feasible_order_names_the_missing_leg() {
    let kb = synth_kb(4, 3, 6).unwrap();
    let ids: Vec<CityId> = kb.cities().map(|c| c.id.clone()).collect();
    let home = ids[0].clone();
    let cut = without_links(&kb, |l| l.from_city == home);
    let slots = trip(&cut, home.as_str(), &[ids[1].as_str()], 2);
    match allocate_days(&slots, &cut) {
        Err(PlanError::Infeasible(msg)) => {
            assert!(msg.contains("outbound"), "{msg}");
            assert!(msg.contains(home.as_str()), "{msg}");
        }
        other => panic!("expected infeasible, got {other:?}"),
    }
}

#[test]
fn chosen_order_is_the_exhaustive_argmin() {
    let kb = desk_kb();
    for seed in 0..60 {
        let q = sampled(&kb, seed);
        let alloc = allocate_days(&q.slots, &kb).unwrap();
        let (order, cost) = brute_order(&kb, &q.slots).expect("sampled queries are routable");
        assert_eq!(alloc.order(), order, "seed {seed}");
        assert_eq!(alloc.leg_cost, cost, "seed {seed}");
    }
}

#[test]
fn allocation_partitions_the_trip() {
    let kb = desk_kb();
    for seed in 0..40 {
        let q = sampled(&kb, seed);
        let alloc = allocate_days(&q.slots, &kb).unwrap();
        let mut next = 0;
        for stay in &alloc.stays {
            assert_eq!(stay.first_day, next);
            assert!(stay.days >= 1);
            next += stay.days;
        }
        assert_eq!(next as u32, q.slots.num_days.unwrap());
    }
}

#[test]
fn required_site_lands_on_its_city() {
    let kb = desk_kb();
    let mut slots = trip(&kb, "c01", &["c02", "c03"], 4);
    let target = kb.pois_in(&city("c03"), PoiKind::Attraction).min_by(|a, b| a.rating.total_cmp(&b.rating)).unwrap();
    slots.required_sites = Some(BTreeSet::from([target.id.clone()]));
    let alloc = allocate_days(&slots, &kb).unwrap();
    let outline = plan_attractions(&alloc, &slots, &kb).unwrap();
    let day = outline.days.iter().find(|d| d.attractions.contains(&target.id)).expect("placed");
    assert_eq!(day.city, city("c03"));
}

#[test]
fn required_site_outside_the_trip_is_named() {
    let kb = desk_kb();
    let mut slots = trip(&kb, "c01", &["c02"], 2);
    let stray = kb.pois_in(&city("c04"), PoiKind::Attraction).next().unwrap().id.clone();
    slots.required_sites = Some(BTreeSet::from([stray.clone()]));
    let alloc = allocate_days(&slots, &kb).unwrap();
    match plan_attractions(&alloc, &slots, &kb) {
        Err(PlanError::Infeasible(msg)) => assert!(msg.contains(stray.as_str()), "{msg}"),
        other => panic!("expected infeasible, got {other:?}"),
    }
}

#[test]
fn rain_prefers_indoor_over_higher_rated_outdoor() {
    let kb = mini_kb();
    // Make the only indoor site the lowest rated so rating alone would skip it.
    let mut parts = kb.to_parts();
    for (_, p) in &mut parts.pois {
        match p.record.id.as_str() {
            "sh-museum" => p.record.rating = 3.0,
            "sh-tower" => p.record.indoor = false,
            _ => {}
        }
    }
    let kb = KnowledgeBase::build(parts).0;
    let mut slots = trip(&kb, "hangzhou", &["shanghai"], 1);
    slots.pace = Some(1);
    let rainy = NaiveDate::from_ymd_opt(2024, 4, 4).unwrap();
    assert_eq!(weather_on(&kb, &city("shanghai"), rainy).condition, WeatherCondition::Rain);
    slots.start_date = Some(rainy);
    let alloc = allocate_days(&slots, &kb).unwrap();
    let outline = plan_attractions(&alloc, &slots, &kb).unwrap();
    assert_eq!(outline.days[0].attractions, vec![PoiId::new("sh-museum")]);

    let sunny = NaiveDate::from_ymd_opt(2024, 4, 3).unwrap();
    slots.start_date = Some(sunny);
    let alloc = allocate_days(&slots, &kb).unwrap();
    let outline = plan_attractions(&alloc, &slots, &kb).unwrap();
    assert_eq!(outline.days[0].attractions, vec![PoiId::new("sh-bund")]);
}

/// Day score used by both sides: rating, plus a bonus that lifts an indoor
/// site on a rain day above every outdoor one.
fn day_score(rating: f64, indoor: bool, rain: bool) -> f64 {
    if rain && indoor {
        rating + 5.0
    } else {
        rating
    }
}

/// Best total score over every assignment of attractions to days (or to no
/// day), at most `pace` per day, with required sites placed.
fn best_assignment(pool: &[(PoiId, f64, bool)], rain: &[bool], pace: usize, required: &BTreeSet<PoiId>) -> f64 {
    fn go(i: usize, pool: &[(PoiId, f64, bool)], rain: &[bool], load: &mut [usize], pace: usize, req: &BTreeSet<PoiId>) -> f64 {
        if i == pool.len() {
            return 0.0;
        }
        let (id, rating, indoor) = &pool[i];
        let mut best = if req.contains(id) { f64::NEG_INFINITY } else { go(i + 1, pool, rain, load, pace, req) };
        for d in 0..rain.len() {
            if load[d] < pace {
                load[d] += 1;
                best = best.max(day_score(*rating, *indoor, rain[d]) + go(i + 1, pool, rain, load, pace, req));
                load[d] -= 1;
            }
        }
        best
    }
    go(0, pool, rain, &mut vec![0; rain.len()], pace, required)
}

#[test]
fn greedy_score_close_to_exhaustive_optimum() {
    for seed in 0..30u64 {
        let kb = synth_kb(100 + seed, 4, 4 + (seed % 3) as usize).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut slots = trip(&kb, "c01", &["c02", "c03"], rng.gen_range(2..=5));
        slots.start_date = Some(NaiveDate::from_ymd_opt(2024, 1, 1).unwrap() + chrono::Days::new(rng.gen_range(0..300)));
        slots.pace = Some(rng.gen_range(1..=3));
        let c2: Vec<PoiId> = kb.pois_in(&city("c02"), PoiKind::Attraction).map(|p| p.id.clone()).collect();
        slots.excluded_sites = Some(BTreeSet::from([c2[0].clone()]));
        slots.required_sites = Some(BTreeSet::from([c2[c2.len() - 1].clone()]));
        let alloc = allocate_days(&slots, &kb).unwrap();
        let outline = plan_attractions(&alloc, &slots, &kb).unwrap();

        let excluded = slots.excluded_sites.clone().unwrap();
        let required = slots.required_sites.clone().unwrap();
        let pace = slots.pace.unwrap() as usize;
        let mut greedy = 0.0;
        let mut optimum = 0.0;
        for stay in &alloc.stays {
            let days: Vec<&OutlineDay> = outline.days.iter().filter(|d| d.city == stay.city).collect();
            let rain: Vec<bool> =
                days.iter().map(|d| weather_on(&kb, &d.city, d.date).condition == WeatherCondition::Rain).collect();
            for (day, wet) in days.iter().zip(&rain) {
                assert!(day.attractions.len() <= pace);
                for id in &day.attractions {
                    let p = kb.poi(id).unwrap();
                    greedy += day_score(p.rating, p.indoor, *wet);
                }
            }
            let pool: Vec<(PoiId, f64, bool)> = kb
                .pois_in(&stay.city, PoiKind::Attraction)
                .filter(|p| !excluded.contains(&p.id))
                .map(|p| (p.id.clone(), p.rating, p.indoor))
                .collect();
            optimum += best_assignment(&pool, &rain, pace, &required);
        }
        assert!(greedy >= 0.9 * optimum - 1e-9, "seed {seed}: greedy {greedy} vs optimum {optimum}");
        let all: Vec<&PoiId> = outline.days.iter().flat_map(|d| &d.attractions).collect();
        let distinct: BTreeSet<_> = all.iter().collect();
        assert_eq!(all.len(), distinct.len(), "seed {seed}: attraction reused");
        assert!(all.iter().all(|id| !excluded.contains(*id)));
        assert!(required.iter().all(|r| all.contains(&r)));
    }
}

#[test]
fn evening_move_takes_g7382_not_the_overnight_train() {
    let kb = appendix_kb();
    let link = cheapest_leg(&kb, &city("hangzhou"), &city("shanghai"), LegRole::Move, TransportPref::Any).unwrap();
    assert_eq!(link.number, "G7382");
    assert_eq!(link.depart, 22 * 60 + 30);
    assert_eq!(link.price, Money::from_yuan(60));
    // K1806 is cheaper but arrives the next day; G7310 leaves in the morning.
    let ids: Vec<&str> = leg_options(&kb, &city("hangzhou"), &city("shanghai"), LegRole::Move, TransportPref::Any)
        .iter()
        .map(|l| l.number.as_str())
        .collect();
    assert_eq!(ids, vec!["G7382"]);
    let morning = cheapest_leg(&kb, &city("hangzhou"), &city("shanghai"), LegRole::Outbound, TransportPref::Any).unwrap();
    assert_eq!(morning.number, "G7310");
}

#[test]
fn high_speed_only_filters_other_modes() {
    let kb = desk_kb();
    let mut checked = 0;
    for from in kb.cities() {
        for to in kb.cities() {
            if from.id == to.id {
                continue;
            }
            for role in [LegRole::Outbound, LegRole::Move, LegRole::Return] {
                let fast = leg_options(&kb, &from.id, &to.id, role, TransportPref::HighSpeedOnly);
                assert!(fast.iter().all(|l| l.mode == TransportMode::HighSpeedRail));
                assert!(fast.iter().all(|l| l.number.starts_with('G') || l.number.starts_with('D')));
                checked += fast.len();
            }
        }
    }
    assert!(checked > 0);
}

#[test]
fn leg_choice_is_the_filtered_argmin() {
    let kb = desk_kb();
    let prefs = [TransportPref::Any, TransportPref::RailAny, TransportPref::HighSpeedOnly];
    for from in kb.cities() {
        for to in kb.cities() {
            for role in [LegRole::Outbound, LegRole::Move, LegRole::Return] {
                for pref in prefs {
                    let got = cheapest_leg(&kb, &from.id, &to.id, role, pref).map(|l| l.price);
                    assert_eq!(got, brute_leg(&kb, &from.id, &to.id, role, pref), "{} {} {role:?} {pref:?}", from.id, to.id);
                }
            }
        }
    }
}

#[test]
fn arranged_transit_returns_home_on_the_last_day() {
    let kb = desk_kb();
    for seed in 0..20 {
        let q = sampled(&kb, seed);
        let alloc = allocate_days(&q.slots, &kb).unwrap();
        let legs = arrange_transit(&alloc, &q.slots, &kb).unwrap();
        let last = legs.last().unwrap();
        assert_eq!(last.role, LegRole::Return);
        assert_eq!(last.day, alloc.num_days - 1);
        assert_eq!(kb.link(&last.link).unwrap().to_city, alloc.departure);
        assert_eq!(legs.len(), alloc.stays.len() + 1);
    }
}

#[test]
fn missing_move_link_reports_the_date() {
    let kb = appendix_kb();
    let cut = without_links(&kb, |l| l.number == "G7382");
    let mut slots = trip(&cut, "wuhan", &["hangzhou", "shanghai"], 2);
    slots.start_date = NaiveDate::from_ymd_opt(2024, 4, 3);
    let alloc = allocation_for(&[city("hangzhou"), city("shanghai")], Money::ZERO, &slots, &cut);
    match arrange_transit(&alloc, &slots, &cut) {
        Err(PlanError::Infeasible(msg)) => assert!(msg.contains("2024-04-03"), "{msg}"),
        other => panic!("expected infeasible, got {other:?}"),
    }
}

#[test]
fn jiufeng_lunch_comes_from_its_nearby_list() {
    let kb = appendix_kb();
    let zoo = kb.poi(&PoiId::new("wuhan-jiufeng-zoo")).unwrap();
    let nearby: BTreeSet<PoiId> =
        zoo.attraction().unwrap().nearby_restaurants.iter().map(|n| n.poi.clone()).collect();
    assert!((3..=5).contains(&nearby.len()));
    let outline = Outline {
        days: vec![OutlineDay {
            date: NaiveDate::from_ymd_opt(2024, 1, 1).unwrap(),
            city: city("wuhan"),
            attractions: vec![zoo.id.clone()],
            arrival: None,
            departure: None,
            night_city: None,
        }],
    };
    let slots = trip(&kb, "beijing", &["wuhan"], 1);
    let plan = detail_plan(&outline, &slots, &kb, "jiufeng").unwrap();
    let lunch = plan.days[0].activities.iter().find(|a| a.kind == ActivityKind::Meal(itinera_core::plan::MealSlot::Lunch));
    let lunch = lunch.expect("lunch scheduled");
    assert!(nearby.contains(&PoiId::new(lunch.poi_or_link.clone())), "{}", lunch.poi_or_link);
}

#[test]
fn single_day_trip_has_no_lodging() {
    let kb = desk_kb();
    let q = query("one-day", trip(&kb, "c01", &["c02"], 1));
    let out = generate_plan(&q, &kb, SearchBudget::default()).unwrap();
    assert_eq!(out.plan.days.len(), 1);
    assert_eq!(out.plan.days[0].lodging().count(), 0);
}

#[test]
fn generation_is_deterministic() {
    let kb = desk_kb();
    for seed in [0, 7, 19] {
        let q = sampled(&kb, seed);
        let a = generate_plan(&q, &kb, SearchBudget::default()).unwrap();
        let b = generate_plan(&q, &kb, SearchBudget::default()).unwrap();
        assert_eq!(serialize_plan(&a.plan), serialize_plan(&b.plan));
        assert_eq!(a.report, b.report);
    }
}

#[test]
fn fixture_query_reaches_final_pass() {
    let kb = mini_kb();
    let (_, q) = common::all_pass_fixture();
    let out = generate_plan(&q, &kb, SearchBudget::default()).unwrap();
    assert!(out.report.final_pass, "{:?}", out.report.failing());
}

#[test]
fn zero_budget_is_best_effort() {
    let kb = desk_kb();
    let mut q = sampled(&kb, 3);
    q.slots.budget_total = Some(Money::ZERO);
    let out = generate_plan(&q, &kb, SearchBudget::default()).unwrap();
    assert!(!out.report.final_pass);
    assert!(!out.report.passed(ConstraintId::Budget));
    assert!(!out.plan.days.is_empty());
}

#[test]
fn missing_core_slot_is_an_error() {
    let kb = desk_kb();
    let mut q = sampled(&kb, 1);
    q.slots.start_date = None;
    assert!(matches!(generate_plan(&q, &kb, SearchBudget::default()), Err(PlanError::MissingSlots(_))));
    let zero = SearchBudget { max_candidates: 0, ..SearchBudget::default() };
    assert!(matches!(generate_plan(&sampled(&kb, 1), &kb, zero), Err(PlanError::BadRequest(_))));
}

#[test]
fn passing_plans_pass_the_independent_oracle() {
    let kb = desk_kb();
    let mut passed = 0;
    for seed in 0..40 {
        let q = sampled(&kb, seed);
        let out = generate_plan(&q, &kb, SearchBudget::default()).unwrap();
        for id in ConstraintId::ALL {
            assert_eq!(out.report.passed(id), oracle(id, &out.plan, &q.slots, &kb), "seed {seed} {id:?}");
        }
        if out.report.final_pass {
            passed += 1;
        }
    }
    assert!(passed >= 38, "{passed}/40");
}

#[test]
fn required_and_excluded_are_respected() {
    let kb = desk_kb();
    for seed in 0..40 {
        let q = sampled(&kb, seed);
        let out = generate_plan(&q, &kb, SearchBudget::default()).unwrap();
        let visited: BTreeSet<String> = out
            .plan
            .activities()
            .filter(|(_, _, a)| a.kind == ActivityKind::Attraction)
            .map(|(_, _, a)| a.poi_or_link.clone())
            .collect();
        let used: BTreeSet<String> =
            out.plan.activities().filter(|(_, _, a)| !a.is_transport()).map(|(_, _, a)| a.poi_or_link.clone()).collect();
        if out.report.passed(ConstraintId::RequiredSites) {
            for r in q.slots.required_sites.iter().flatten() {
                assert!(visited.contains(r.as_str()), "seed {seed}: {r} missing");
            }
        }
        if out.report.passed(ConstraintId::ExcludedSites) {
            for x in q.slots.excluded_sites.iter().flatten() {
                assert!(!used.contains(x.as_str()), "seed {seed}: {x} scheduled");
            }
        }
    }
}

/// Push every start back so activities collide, then let repair work.
fn crowd(plan: &Plan) -> Plan {
    let mut out = plan.clone();
    for day in &mut out.days {
        for a in &mut day.activities {
            if a.kind != ActivityKind::Lodging && a.kind != ActivityKind::Transport {
                a.start = a.start.saturating_sub(25);
            }
        }
    }
    out
}

#[test]
fn repair_never_increases_failures() {
    let kb = desk_kb();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut improved = 0;
    for seed in 0..30 {
        let mut q = sampled(&kb, seed);
        let base = generate_plan(&q, &kb, SearchBudget::default()).unwrap().plan;
        let cost = itinera_core::plan::CostLedger::of(&base).total;
        q.slots.budget_total = Some(cost.scaled(rng.gen_range(70..100), 100));
        let damaged = crowd(&base);
        let out = repair(damaged, &q.slots, &kb, 8, 200);
        assert!(out.fail_counts.windows(2).all(|w| w[1] <= w[0]), "seed {seed}: {:?}", out.fail_counts);
        assert_eq!(*out.fail_counts.last().unwrap(), out.report.fail_count());
        if out.fail_counts.last() < out.fail_counts.first() {
            improved += 1;
        }
    }
    assert!(improved > 0);
}

fn day_bytes(plan: &Plan, d: usize) -> String {
    serde_json::to_string(&plan.days[d]).unwrap()
}

#[test]
fn dining_revision_changes_one_meal_on_the_day() {
    let kb = desk_kb();
    let mut done = 0;
    for seed in 0..20 {
        let q = sampled(&kb, seed);
        let base = generate_plan(&q, &kb, SearchBudget::default()).unwrap().plan;
        if base.days.len() < 2 {
            continue;
        }
        let Ok(revised) = revise_plan(&base, &RevisionRequest::dining(1), &q.slots, &kb) else { continue };
        for d in 0..base.days.len() {
            if d != 1 {
                assert_eq!(day_bytes(&base, d), day_bytes(&revised.plan, d), "seed {seed} day {d}");
            }
        }
        let (old, new) = (&base.days[1].activities, &revised.plan.days[1].activities);
        assert_eq!(old.len(), new.len());
        let changed: Vec<usize> = (0..old.len()).filter(|i| old[*i] != new[*i]).collect();
        assert_eq!(changed.len(), 1, "seed {seed}");
        assert!(old[changed[0]].kind.is_meal());
        assert_ne!(old[changed[0]].poi_or_link, new[changed[0]].poi_or_link);
        done += 1;
    }
    assert!(done >= 10, "{done}");
}

#[test]
fn weather_revision_swaps_outdoor_for_indoor_on_a_rain_day() {
    let kb = desk_kb();
    let mut done = 0;
    for seed in 0..200 {
        let q = sampled(&kb, seed);
        let base = generate_plan(&q, &kb, SearchBudget::default()).unwrap().plan;
        for (d, day) in base.days.iter().enumerate() {
            if weather_on(&kb, &day.city_id, day.date).condition != WeatherCondition::Rain {
                continue;
            }
            let outdoor_before: Vec<String> = day
                .activities
                .iter()
                .filter(|a| a.kind == ActivityKind::Attraction && !kb.poi(&PoiId::new(a.poi_or_link.clone())).unwrap().indoor)
                .map(|a| a.poi_or_link.clone())
                .collect();
            if outdoor_before.is_empty() {
                continue;
            }
            let Ok(out) = revise_plan(&base, &RevisionRequest::weather(d), &q.slots, &kb) else { continue };
            let after: Vec<&String> = out.plan.days[d]
                .activities
                .iter()
                .filter(|a| a.kind == ActivityKind::Attraction)
                .map(|a| &a.poi_or_link)
                .collect();
            assert!(!after.contains(&&outdoor_before[0]), "seed {seed} day {d}");
            let added: Vec<&&String> =
                after.iter().filter(|id| !day.activities.iter().any(|a| &&a.poi_or_link == *id)).collect();
            assert_eq!(added.len(), 1);
            assert!(kb.poi(&PoiId::new((**added[0]).clone())).unwrap().indoor);
            for other in 0..base.days.len() {
                if other != d {
                    assert_eq!(day_bytes(&base, other), day_bytes(&out.plan, other));
                }
            }
            done += 1;
        }
        if done >= 5 {
            break;
        }
    }
    assert!(done >= 1, "no rain day with an outdoor attraction found");
}

#[test]
fn infeasible_revision_leaves_plan_untouched() {
    let kb = appendix_kb();
    let plan = common::all_pass_fixture().0;
    let before = serialize_plan(&plan);
    let slots = trip(&kb, "hangzhou", &["shanghai"], 2);
    assert!(revise_plan(&plan, &RevisionRequest::dining(9), &slots, &kb).is_err());
    assert_eq!(before, serialize_plan(&plan));
}
