//! Constraint checkers, per-plan reports and corpus metrics.

mod checks;
mod metrics;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dialogue::IntentSlots;
use crate::kb::KnowledgeBase;
use crate::plan::Plan;

pub use metrics::{aggregate, correlate, pearson, BenchmarkReport, CategoryRates, Correlation, MetricsError, Tally};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Commonsense,
    Preference,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintId {
    CityCoverage,
    ActivityRepetition,
    TimeInterval,
    Accommodation,
    DailySchedule,
    ReturnJourney,
    PoiValidation,
    LocationLogic,
    ActivityCount,
    Budget,
    HotelType,
    RequiredSites,
    ExcludedSites,
}

impl ConstraintId {
    pub const ALL: [ConstraintId; 13] = [
        ConstraintId::CityCoverage,
        ConstraintId::ActivityRepetition,
        ConstraintId::TimeInterval,
        ConstraintId::Accommodation,
        ConstraintId::DailySchedule,
        ConstraintId::ReturnJourney,
        ConstraintId::PoiValidation,
        ConstraintId::LocationLogic,
        ConstraintId::ActivityCount,
        ConstraintId::Budget,
        ConstraintId::HotelType,
        ConstraintId::RequiredSites,
        ConstraintId::ExcludedSites,
    ];

    pub fn category(self) -> Category {
        match self {
            ConstraintId::Budget | ConstraintId::HotelType | ConstraintId::RequiredSites | ConstraintId::ExcludedSites => {
                Category::Preference
            }
            _ => Category::Commonsense,
        }
    }

    pub fn in_category(category: Category) -> impl Iterator<Item = ConstraintId> {
        ConstraintId::ALL.into_iter().filter(move |c| c.category() == category)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ConstraintId::CityCoverage => "city_coverage",
            ConstraintId::ActivityRepetition => "activity_repetition",
            ConstraintId::TimeInterval => "time_interval",
            ConstraintId::Accommodation => "accommodation",
            ConstraintId::DailySchedule => "daily_schedule",
            ConstraintId::ReturnJourney => "return_journey",
            ConstraintId::PoiValidation => "poi_validation",
            ConstraintId::LocationLogic => "location_logic",
            ConstraintId::ActivityCount => "activity_count",
            ConstraintId::Budget => "budget",
            ConstraintId::HotelType => "hotel_type",
            ConstraintId::RequiredSites => "required_sites",
            ConstraintId::ExcludedSites => "excluded_sites",
        }
    }

    /// Human label used in tables.
    pub fn label(self) -> &'static str {
        match self {
            ConstraintId::CityCoverage => "City Coverage",
            ConstraintId::ActivityRepetition => "Activity Repetition",
            ConstraintId::TimeInterval => "Time Interval",
            ConstraintId::Accommodation => "Accommodation",
            ConstraintId::DailySchedule => "Daily Schedule",
            ConstraintId::ReturnJourney => "Return Journey",
            ConstraintId::PoiValidation => "POI Validation",
            ConstraintId::LocationLogic => "Location Logic",
            ConstraintId::ActivityCount => "Activity Count",
            ConstraintId::Budget => "Budget",
            ConstraintId::HotelType => "Hotel Type",
            ConstraintId::RequiredSites => "Required Sites",
            ConstraintId::ExcludedSites => "Excluded Sites",
        }
    }
}

impl fmt::Display for ConstraintId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ConstraintId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ConstraintId::ALL.into_iter().find(|c| c.as_str() == s).ok_or_else(|| format!("unknown constraint `{s}`"))
    }
}

/// Tunable thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidatorConfig {
    /// Minimum minutes between consecutive non-lodging activities.
    pub min_gap: u16,
    /// Minimum minutes from a day's first start to its last end.
    pub min_daily_window: u16,
    /// Minimum activities in the assigned city per day.
    pub min_activities: usize,
}

impl Default for ValidatorConfig {
    fn default() -> Self {
        ValidatorConfig { min_gap: 30, min_daily_window: 480, min_activities: 4 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Diagnostic {
    pub day: Option<usize>,
    pub activity: Option<usize>,
    pub message: String,
}

impl Diagnostic {
    pub fn at(day: usize, activity: usize, message: impl Into<String>) -> Self {
        Diagnostic { day: Some(day), activity: Some(activity), message: message.into() }
    }

    pub fn on_day(day: usize, message: impl Into<String>) -> Self {
        Diagnostic { day: Some(day), activity: None, message: message.into() }
    }

    pub fn plan(message: impl Into<String>) -> Self {
        Diagnostic { day: None, activity: None, message: message.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintResult {
    pub id: ConstraintId,
    pub passed: bool,
    pub diagnostics: Vec<Diagnostic>,
}

impl ConstraintResult {
    pub fn from_diagnostics(id: ConstraintId, diagnostics: Vec<Diagnostic>) -> Self {
        ConstraintResult { id, passed: diagnostics.is_empty(), diagnostics }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanReport {
    pub results: Vec<ConstraintResult>,
    pub commonsense_pass: bool,
    pub preference_pass: bool,
    pub final_pass: bool,
}

impl PlanReport {
    pub fn from_results(results: Vec<ConstraintResult>) -> Self {
        let all = |cat: Category| results.iter().filter(|r| r.id.category() == cat).all(|r| r.passed);
        let commonsense_pass = all(Category::Commonsense);
        let preference_pass = all(Category::Preference);
        PlanReport { commonsense_pass, preference_pass, final_pass: commonsense_pass && preference_pass, results }
    }

    pub fn result(&self, id: ConstraintId) -> Option<&ConstraintResult> {
        self.results.iter().find(|r| r.id == id)
    }

    pub fn passed(&self, id: ConstraintId) -> bool {
        self.result(id).is_some_and(|r| r.passed)
    }

    pub fn failing(&self) -> Vec<ConstraintId> {
        self.results.iter().filter(|r| !r.passed).map(|r| r.id).collect()
    }

    pub fn fail_count(&self) -> usize {
        self.results.iter().filter(|r| !r.passed).count()
    }

    pub fn category_pass(&self, category: Category) -> bool {
        match category {
            Category::Commonsense => self.commonsense_pass,
            Category::Preference => self.preference_pass,
        }
    }
}

pub fn check(plan: &Plan, query: &IntentSlots, kb: &KnowledgeBase, id: ConstraintId) -> ConstraintResult {
    check_with(&ValidatorConfig::default(), plan, query, kb, id)
}

pub fn check_with(
    cfg: &ValidatorConfig,
    plan: &Plan,
    query: &IntentSlots,
    kb: &KnowledgeBase,
    id: ConstraintId,
) -> ConstraintResult {
    let diags = match id {
        ConstraintId::CityCoverage => checks::city_coverage(plan, query),
        ConstraintId::ActivityRepetition => checks::activity_repetition(plan),
        ConstraintId::TimeInterval => checks::time_interval(plan, cfg.min_gap),
        ConstraintId::Accommodation => checks::accommodation(plan),
        ConstraintId::DailySchedule => checks::daily_schedule(plan, cfg.min_daily_window),
        ConstraintId::ReturnJourney => checks::return_journey(plan, query, kb),
        ConstraintId::PoiValidation => checks::poi_validation(plan, kb),
        ConstraintId::LocationLogic => checks::location_logic(plan, kb),
        ConstraintId::ActivityCount => checks::activity_count(plan, cfg.min_activities),
        ConstraintId::Budget => checks::budget(plan, query),
        ConstraintId::HotelType => checks::hotel_type(plan, query, kb),
        ConstraintId::RequiredSites => checks::required_sites(plan, query),
        ConstraintId::ExcludedSites => checks::excluded_sites(plan, query),
    };
    ConstraintResult::from_diagnostics(id, diags)
}

pub fn evaluate_plan(plan: &Plan, query: &IntentSlots, kb: &KnowledgeBase) -> PlanReport {
    evaluate_plan_with(&ValidatorConfig::default(), plan, query, kb)
}

pub fn evaluate_plan_with(cfg: &ValidatorConfig, plan: &Plan, query: &IntentSlots, kb: &KnowledgeBase) -> PlanReport {
    PlanReport::from_results(ConstraintId::ALL.into_iter().map(|id| check_with(cfg, plan, query, kb, id)).collect())
}
