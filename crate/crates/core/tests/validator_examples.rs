mod common;

use common::{all_pass_fixture, mini_kb, oracle};
use itinera_core::dialogue::IntentSlots;
use itinera_core::kb::CityId;
use itinera_core::money::Money;
use itinera_core::plan::{Activity, ActivityKind, CostLedger, DayPlan, Plan};
use itinera_core::validator::{check, evaluate_plan, evaluate_plan_with, ConstraintId, ValidatorConfig};

#[test]
fn all_pass_fixture_passes_everything() {
    let kb = mini_kb();
    let (plan, q) = all_pass_fixture();
    let r = evaluate_plan(&plan, &q.slots, &kb);
    assert!(r.final_pass, "{:?}", r.failing());
    for id in ConstraintId::ALL {
        assert!(oracle(id, &plan, &q.slots, &kb), "{id:?}");
    }
    assert_eq!(CostLedger::of(&plan).total, Money::from_yuan(1802));
}

#[test]
fn only_budget_fails_under_a_tighter_cap() {
    let kb = mini_kb();
    let (plan, mut q) = all_pass_fixture();
    q.slots.budget_total = Some(Money::from_yuan(1800));
    let r = evaluate_plan(&plan, &q.slots, &kb);
    assert_eq!(r.failing(), vec![ConstraintId::Budget]);
    assert!(r.commonsense_pass);
    assert!(!r.preference_pass);
    assert!(!r.final_pass);
}

#[test]
fn twenty_minute_gap_fails_time_interval_at_the_pair() {
    let kb = mini_kb();
    let (mut plan, q) = all_pass_fixture();
    // breakfast ends 10:00, the Bund starts 10:20
    plan.days[0].activities[1].start = 555;
    plan.days[0].activities[1].end = 600;
    plan.days[0].activities[2].start = 620;
    let r = check(&plan, &q.slots, &kb, ConstraintId::TimeInterval);
    assert!(!r.passed);
    assert_eq!(r.diagnostics.len(), 1);
    assert_eq!((r.diagnostics[0].day, r.diagnostics[0].activity), (Some(0), Some(2)));
    assert!(r.diagnostics[0].message.contains("activity 1 and activity 2"), "{}", r.diagnostics[0].message);
}

#[test]
fn time_interval_and_required_sites_fail_both_categories() {
    let kb = mini_kb();
    let (mut plan, q) = all_pass_fixture();
    plan.days[0].activities[2].start = 590;
    plan.days[1].activities.retain(|a| a.poi_or_link != "sh-museum");
    let r = evaluate_plan(&plan, &q.slots, &kb);
    assert!(!r.passed(ConstraintId::TimeInterval));
    assert!(!r.passed(ConstraintId::RequiredSites));
    assert!(!r.commonsense_pass && !r.preference_pass && !r.final_pass);
}

fn bare_day(date: &str, city: &str, lodging: bool) -> DayPlan {
    let mut activities = vec![Activity {
        kind: ActivityKind::Attraction,
        poi_or_link: "x".into(),
        city_id: CityId::new(city),
        start: 540,
        end: 600,
        cost: Money::ZERO,
    }];
    if lodging {
        activities.push(Activity {
            kind: ActivityKind::Lodging,
            poi_or_link: format!("h-{date}"),
            city_id: CityId::new(city),
            start: 1200,
            end: 420,
            cost: Money::ZERO,
        });
    }
    DayPlan { date: date.parse().unwrap(), city_id: CityId::new(city), activities }
}

#[test]
fn accommodation_needs_every_night_but_the_last() {
    let kb = mini_kb();
    let q = IntentSlots::default();
    let ok = Plan {
        query_id: "a".into(),
        party_size: 1,
        days: vec![bare_day("2024-04-03", "hangzhou", true), bare_day("2024-04-04", "shanghai", true), bare_day("2024-04-05", "shanghai", false)],
    };
    assert!(check(&ok, &q, &kb, ConstraintId::Accommodation).passed);
    let mut missing = ok.clone();
    missing.days[1].activities.retain(|a| !a.is_lodging());
    let r = check(&missing, &q, &kb, ConstraintId::Accommodation);
    assert!(!r.passed);
    assert_eq!(r.diagnostics[0].day, Some(1));
    let mut extra = ok.clone();
    extra.days[2] = bare_day("2024-04-05", "shanghai", true);
    assert!(!check(&extra, &q, &kb, ConstraintId::Accommodation).passed);
}

#[test]
fn dangling_reference_is_a_poi_validation_failure() {
    let kb = mini_kb();
    let (mut plan, q) = all_pass_fixture();
    plan.days[0].activities[2].poi_or_link = "sh-nowhere".into();
    plan.days[1].activities[4].poi_or_link = "no-train".into();
    let r = evaluate_plan(&plan, &q.slots, &kb);
    let poi = r.result(ConstraintId::PoiValidation).unwrap();
    assert!(!poi.passed);
    assert_eq!(poi.diagnostics.len(), 2, "every violation is reported");
    assert!(!r.passed(ConstraintId::ReturnJourney));
}

#[test]
fn wrong_kind_reference_fails_poi_validation() {
    let kb = mini_kb();
    let (mut plan, q) = all_pass_fixture();
    plan.days[0].activities[1].poi_or_link = "sh-h2".into();
    assert!(!check(&plan, &q.slots, &kb, ConstraintId::PoiValidation).passed);
}

#[test]
fn unstated_preferences_pass_vacuously() {
    let kb = mini_kb();
    let (plan, _) = all_pass_fixture();
    let r = evaluate_plan(&plan, &IntentSlots::default(), &kb);
    assert!(r.preference_pass);
    assert!(r.passed(ConstraintId::CityCoverage));
    assert!(r.passed(ConstraintId::ReturnJourney));
}

#[test]
fn hotel_any_passes_and_upscale_fails_on_a_chain_hotel() {
    let kb = mini_kb();
    let (plan, mut q) = all_pass_fixture();
    q.slots.hotel_type = Some(itinera_core::dialogue::HotelPref::Any);
    assert!(check(&plan, &q.slots, &kb, ConstraintId::HotelType).passed);
    q.slots.hotel_type = Some(itinera_core::dialogue::HotelPref::Upscale);
    assert!(!check(&plan, &q.slots, &kb, ConstraintId::HotelType).passed);
}

#[test]
fn consecutive_nights_may_reuse_a_hotel_but_a_gap_may_not() {
    let kb = mini_kb();
    let q = IntentSlots::default();
    let mut plan = Plan {
        query_id: "r".into(),
        party_size: 1,
        days: vec![
            bare_day("2024-04-03", "shanghai", true),
            bare_day("2024-04-04", "shanghai", true),
            bare_day("2024-04-05", "shanghai", true),
            bare_day("2024-04-06", "shanghai", false),
        ],
    };
    for (d, day) in plan.days.iter_mut().enumerate() {
        day.activities[0].poi_or_link = format!("sight-{d}");
    }
    for d in 0..3 {
        plan.days[d].activities[1].poi_or_link = "sh-h1".into();
    }
    assert!(check(&plan, &q, &kb, ConstraintId::ActivityRepetition).passed);
    plan.days[1].activities[1].poi_or_link = "sh-h2".into();
    assert!(!check(&plan, &q, &kb, ConstraintId::ActivityRepetition).passed);
}

#[test]
fn snack_counts_toward_four_but_not_as_a_meal() {
    let kb = mini_kb();
    let (mut plan, q) = all_pass_fixture();
    // Day 1 has exactly breakfast, museum, lunch, dinner: turn lunch into a snack.
    plan.days[1].activities[2].kind = ActivityKind::Meal(itinera_core::plan::MealSlot::Snack);
    let r = check(&plan, &q.slots, &kb, ConstraintId::ActivityCount);
    assert!(!r.passed);
    assert!(r.diagnostics.iter().any(|d| d.message.contains("lunch")));
    assert!(!r.diagnostics.iter().any(|d| d.message.contains("activities in")));
}

#[test]
fn daily_window_threshold_is_configurable() {
    let kb = mini_kb();
    let (plan, q) = all_pass_fixture();
    let strict = ValidatorConfig { min_daily_window: 12 * 60, ..ValidatorConfig::default() };
    let r = evaluate_plan_with(&strict, &plan, &q.slots, &kb);
    assert!(!r.passed(ConstraintId::DailySchedule));
    assert!(evaluate_plan(&plan, &q.slots, &kb).passed(ConstraintId::DailySchedule));
}

#[test]
fn pois_must_sit_on_the_right_side_of_a_transfer() {
    let kb = mini_kb();
    let (mut plan, q) = all_pass_fixture();
    // Dinner moved after the return train: it would have to be in Hangzhou.
    let dinner = plan.days[1].activities.remove(3);
    plan.days[1].activities.push(Activity { start: 1260, end: 1320, ..dinner });
    let r = check(&plan, &q.slots, &kb, ConstraintId::LocationLogic);
    assert!(!r.passed);
    assert_eq!(r.diagnostics[0].activity, Some(4));
}

#[test]
fn removing_a_flagged_activity_never_adds_violations() {
    let kb = common::desk_kb();
    let bases = common::base_plans(&kb, 6);
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(11);
    let local = [
        ConstraintId::ActivityRepetition,
        ConstraintId::TimeInterval,
        ConstraintId::PoiValidation,
        ConstraintId::HotelType,
        ConstraintId::ExcludedSites,
    ];
    let mut exercised = 0;
    for (plan, q) in common::fuzz_pairs(&kb, &bases, 600, &mut rng) {
        for id in local {
            let before = check(&plan, &q, &kb, id);
            for d in &before.diagnostics {
                let (Some(day), Some(i)) = (d.day, d.activity) else { continue };
                let mut trimmed = plan.clone();
                trimmed.days[day].activities.remove(i);
                let after = check(&trimmed, &q, &kb, id);
                assert!(after.diagnostics.len() <= before.diagnostics.len(), "{id:?}: {:?} -> {:?}", before.diagnostics, after.diagnostics);
                exercised += 1;
            }
        }
    }
    assert!(exercised > 50, "only {exercised} removals exercised");
}
