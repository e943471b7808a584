use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{IntentSlots, RevisionRequest};
use crate::kb::{CityId, PoiId, PoiKind, WeatherCondition};
use crate::money::Money;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    User,
    Assistant,
}

/// Most reviews and images a recommendation carries.
pub const MAX_SNIPPETS: usize = 2;
pub const MAX_IMAGES: usize = 1;
/// Most slots one assistant turn may ask about.
pub const MAX_ASKS: usize = 2;

/// Structured dialogue act. Slot names are plain strings so that a peer
/// naming an unknown slot can be reported rather than rejected at decode time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "act", rename_all = "snake_case", deny_unknown_fields)]
pub enum Act {
    Ask {
        slot: String,
    },
    Inform {
        slot: String,
        value: Value,
    },
    Recommend {
        poi: PoiId,
        name: String,
        kind: PoiKind,
        city_id: CityId,
        rating: f64,
        avg_cost: Money,
        reviews: Vec<String>,
        image_refs: Vec<String>,
    },
    Forecast {
        city_id: CityId,
        date: NaiveDate,
        condition: WeatherCondition,
        high_c: f64,
        low_c: f64,
    },
    /// Assistant: summary of the requirement. User: agreement.
    Confirm {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        slots: Option<IntentSlots>,
    },
    Revise {
        request: RevisionRequest,
    },
    Accept {
        poi: PoiId,
    },
    Reject {
        poi: PoiId,
    },
    PresentPlan {
        final_pass: bool,
        total_cost: Money,
    },
    Diagnostic {
        message: String,
    },
}

impl Act {
    pub fn ask(slot: super::SlotName) -> Act {
        Act::Ask { slot: slot.as_str().to_string() }
    }

    pub fn is_ask(&self) -> bool {
        matches!(self, Act::Ask { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DialogueTurn {
    pub role: Role,
    pub acts: Vec<Act>,
    #[serde(default)]
    pub text: String,
}

impl DialogueTurn {
    pub fn asks(&self) -> usize {
        self.acts.iter().filter(|a| a.is_ask()).count()
    }
}
