use serde::{Deserialize, Serialize};

use super::TransportPref;
use crate::kb::{KnowledgeBase, PoiId};
use crate::money::Money;
use crate::plan::{ActivityKind, Plan};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RevisionCategory {
    Dining,
    Transportation,
    Budget,
    Weather,
}

impl RevisionCategory {
    pub const ALL: [RevisionCategory; 4] =
        [RevisionCategory::Dining, RevisionCategory::Transportation, RevisionCategory::Budget, RevisionCategory::Weather];
}

/// A day of the plan and optionally one activity on it. With no activity the
/// planner picks the natural one for the category (the day's lunch, its first
/// transport leg, its first outdoor attraction).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RevisionTarget {
    pub day: usize,
    #[serde(default)]
    pub activity: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Directive {
    ReplacePoi {
        #[serde(default)]
        replacement: Option<PoiId>,
    },
    ChangeLink {
        #[serde(default)]
        transport_pref: Option<TransportPref>,
    },
    CapBudget {
        budget: Money,
    },
    SwapOutdoorForIndoor,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RevisionRequest {
    pub category: RevisionCategory,
    /// Absent for budget revisions, which act on the whole plan.
    #[serde(default)]
    pub target: Option<RevisionTarget>,
    pub directive: Directive,
}

impl RevisionRequest {
    pub fn dining(day: usize) -> Self {
        RevisionRequest {
            category: RevisionCategory::Dining,
            target: Some(RevisionTarget { day, activity: None }),
            directive: Directive::ReplacePoi { replacement: None },
        }
    }

    pub fn transportation(day: usize) -> Self {
        RevisionRequest {
            category: RevisionCategory::Transportation,
            target: Some(RevisionTarget { day, activity: None }),
            directive: Directive::ChangeLink { transport_pref: None },
        }
    }

    pub fn weather(day: usize) -> Self {
        RevisionRequest {
            category: RevisionCategory::Weather,
            target: Some(RevisionTarget { day, activity: None }),
            directive: Directive::SwapOutdoorForIndoor,
        }
    }

    pub fn budget(cap: Money) -> Self {
        RevisionRequest { category: RevisionCategory::Budget, target: None, directive: Directive::CapBudget { budget: cap } }
    }

    /// Check that the directive fits the category and the target exists in
    /// `plan`. Returns the resolved activity index, if the category has one.
    pub fn resolve(&self, plan: &Plan, kb: &KnowledgeBase) -> Result<Option<usize>, String> {
        let fits = matches!(
            (self.category, &self.directive),
            (RevisionCategory::Dining, Directive::ReplacePoi { .. })
                | (RevisionCategory::Transportation, Directive::ChangeLink { .. })
                | (RevisionCategory::Budget, Directive::CapBudget { .. })
                | (RevisionCategory::Weather, Directive::SwapOutdoorForIndoor)
        );
        if !fits {
            return Err(format!("directive does not match category {:?}", self.category));
        }
        if self.category == RevisionCategory::Budget {
            return Ok(None);
        }
        let target = self.target.ok_or("revision needs a target day")?;
        let day = plan.days.get(target.day).ok_or_else(|| format!("plan has no day {}", target.day + 1))?;
        let wanted = |kind: ActivityKind, idx: usize| -> bool {
            let a = &day.activities[idx];
            match self.category {
                RevisionCategory::Dining => kind.is_meal(),
                RevisionCategory::Transportation => kind == ActivityKind::Transport,
                RevisionCategory::Weather => {
                    kind == ActivityKind::Attraction
                        && kb.poi(&PoiId::new(a.poi_or_link.clone())).is_some_and(|p| !p.indoor)
                }
                RevisionCategory::Budget => false,
            }
        };
        match target.activity {
            Some(i) => {
                let a = day.activities.get(i).ok_or_else(|| format!("day {} has no activity {i}", target.day + 1))?;
                if wanted(a.kind, i) {
                    Ok(Some(i))
                } else {
                    Err(format!("activity {i} on day {} cannot take a {:?} revision", target.day + 1, self.category))
                }
            }
            None => {
                let preferred = if self.category == RevisionCategory::Dining {
                    day.activities.iter().position(|a| a.kind == ActivityKind::Meal(crate::plan::MealSlot::Lunch))
                } else {
                    None
                };
                preferred
                    .or_else(|| (0..day.activities.len()).find(|&i| wanted(day.activities[i].kind, i)))
                    .map(Some)
                    .ok_or_else(|| format!("day {} has nothing to revise for {:?}", target.day + 1, self.category))
            }
        }
    }
}
