//! Itinerary data model, cost ledger and canonical plan codec.

mod codec;

use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::kb::{CityId, KnowledgeBase, LinkId, PoiId, PoiKind};
use crate::money::Money;

pub use codec::{parse_plan, serialize_plan, PlanParseError};

/// Minutes in a day; the largest legal time value.
pub const DAY_MINUTES: u16 = 1440;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MealSlot {
    Breakfast,
    Lunch,
    Dinner,
    Snack,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ActivityKind {
    Transport,
    Attraction,
    Meal(MealSlot),
    Lodging,
}

impl ActivityKind {
    pub const ALL: [ActivityKind; 7] = [
        ActivityKind::Transport,
        ActivityKind::Attraction,
        ActivityKind::Meal(MealSlot::Breakfast),
        ActivityKind::Meal(MealSlot::Lunch),
        ActivityKind::Meal(MealSlot::Dinner),
        ActivityKind::Meal(MealSlot::Snack),
        ActivityKind::Lodging,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ActivityKind::Transport => "transport",
            ActivityKind::Attraction => "attraction",
            ActivityKind::Meal(MealSlot::Breakfast) => "breakfast",
            ActivityKind::Meal(MealSlot::Lunch) => "lunch",
            ActivityKind::Meal(MealSlot::Dinner) => "dinner",
            ActivityKind::Meal(MealSlot::Snack) => "snack",
            ActivityKind::Lodging => "lodging",
        }
    }

    /// The KB kind a POI-backed activity must reference. `None` for transport.
    pub fn poi_kind(self) -> Option<PoiKind> {
        match self {
            ActivityKind::Transport => None,
            ActivityKind::Attraction => Some(PoiKind::Attraction),
            ActivityKind::Meal(_) => Some(PoiKind::Restaurant),
            ActivityKind::Lodging => Some(PoiKind::Hotel),
        }
    }

    pub fn is_meal(self) -> bool {
        matches!(self, ActivityKind::Meal(_))
    }
}

impl fmt::Display for ActivityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ActivityKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ActivityKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown activity kind `{s}`"))
    }
}

impl Serialize for ActivityKind {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for ActivityKind {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Activity {
    pub kind: ActivityKind,
    /// POI id, or transport link id when `kind` is transport.
    pub poi_or_link: String,
    /// Where the activity happens; the arrival city for transport.
    pub city_id: CityId,
    pub start: u16,
    /// For lodging this is the checkout time on the following morning.
    pub end: u16,
    /// Party total.
    pub cost: Money,
}

impl Activity {
    pub fn poi_id(&self) -> Option<PoiId> {
        (self.kind != ActivityKind::Transport).then(|| PoiId::new(self.poi_or_link.clone()))
    }

    pub fn link_id(&self) -> Option<LinkId> {
        (self.kind == ActivityKind::Transport).then(|| LinkId::new(self.poi_or_link.clone()))
    }

    pub fn is_lodging(&self) -> bool {
        self.kind == ActivityKind::Lodging
    }

    pub fn is_transport(&self) -> bool {
        self.kind == ActivityKind::Transport
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DayPlan {
    pub date: NaiveDate,
    /// The city this day is assigned to.
    pub city_id: CityId,
    pub activities: Vec<Activity>,
}

impl DayPlan {
    pub fn lodging(&self) -> impl Iterator<Item = &Activity> {
        self.activities.iter().filter(|a| a.is_lodging())
    }

    /// Activities other than lodging, in order, with their indices.
    pub fn daytime(&self) -> impl Iterator<Item = (usize, &Activity)> {
        self.activities.iter().enumerate().filter(|(_, a)| !a.is_lodging())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Plan {
    pub query_id: String,
    pub party_size: u32,
    pub days: Vec<DayPlan>,
}

impl Plan {
    /// Every activity with its (day, activity) position.
    pub fn activities(&self) -> impl Iterator<Item = (usize, usize, &Activity)> {
        self.days
            .iter()
            .enumerate()
            .flat_map(|(d, day)| day.activities.iter().enumerate().map(move |(i, a)| (d, i, a)))
    }

    /// Structural problems that make a plan unusable: empty, unordered days or
    /// activities, out-of-range times, zero party, negative costs.
    pub fn structural_problems(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        if self.days.is_empty() {
            out.push(("days".to_string(), "plan has no days".to_string()));
        }
        if self.party_size == 0 {
            out.push(("party_size".to_string(), "party size must be at least 1".to_string()));
        }
        for (d, pair) in self.days.windows(2).enumerate() {
            if pair[1].date <= pair[0].date {
                out.push((format!("days[{}].date", d + 1), "dates must be strictly increasing".to_string()));
            }
        }
        for (d, day) in self.days.iter().enumerate() {
            for (i, a) in day.activities.iter().enumerate() {
                let path = format!("days[{d}].activities[{i}]");
                if a.start > DAY_MINUTES || a.end > DAY_MINUTES {
                    out.push((path.clone(), "time beyond 1440 minutes".to_string()));
                }
                if !a.is_lodging() && a.start >= a.end {
                    out.push((path.clone(), "start must precede end".to_string()));
                }
                if a.cost.is_negative() {
                    out.push((format!("{path}.cost"), "negative cost".to_string()));
                }
                if i > 0 && day.activities[i - 1].start > a.start {
                    out.push((format!("{path}.start"), "activities must be sorted by start".to_string()));
                }
            }
        }
        out
    }
}

/// Cost subtotals by activity family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CostLedger {
    pub transport: Money,
    pub tickets: Money,
    pub meals: Money,
    pub lodging: Money,
    pub total: Money,
}

impl CostLedger {
    /// Sum activity costs without consulting the KB.
    pub fn of(plan: &Plan) -> CostLedger {
        let mut l = CostLedger::default();
        for (_, _, a) in plan.activities() {
            let bucket = match a.kind {
                ActivityKind::Transport => &mut l.transport,
                ActivityKind::Attraction => &mut l.tickets,
                ActivityKind::Meal(_) => &mut l.meals,
                ActivityKind::Lodging => &mut l.lodging,
            };
            *bucket += a.cost;
        }
        l.total = l.transport + l.tickets + l.meals + l.lodging;
        l
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("day {day} activity {activity}: {message}")]
pub struct DanglingRef {
    pub day: usize,
    pub activity: usize,
    pub message: String,
}

/// Whether `a` resolves in the KB with the kind its activity type demands.
pub fn resolve_activity(kb: &KnowledgeBase, a: &Activity) -> Result<(), String> {
    match a.kind.poi_kind() {
        None => match kb.link(&LinkId::new(a.poi_or_link.clone())) {
            Some(_) => Ok(()),
            None => Err(format!("unknown transport link `{}`", a.poi_or_link)),
        },
        Some(kind) => match kb.poi(&PoiId::new(a.poi_or_link.clone())) {
            None => Err(format!("unknown POI `{}`", a.poi_or_link)),
            Some(p) if p.kind() != kind => {
                Err(format!("`{}` is a {}, not a {}", a.poi_or_link, p.kind().as_str(), kind.as_str()))
            }
            Some(_) => Ok(()),
        },
    }
}

/// Cost ledger for a plan whose references all resolve in `kb`.
pub fn total_cost(plan: &Plan, kb: &KnowledgeBase) -> Result<CostLedger, DanglingRef> {
    for (day, activity, a) in plan.activities() {
        resolve_activity(kb, a).map_err(|message| DanglingRef { day, activity, message })?;
    }
    Ok(CostLedger::of(plan))
}

/// `HH:MM` rendering of a minute offset.
pub fn hhmm(minutes: u16) -> String {
    format!("{:02}:{:02}", minutes / 60, minutes % 60)
}
