//! The twelve-field travel intent.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::kb::{CityId, HotelType, PoiId, TransportMode};
use crate::money::Money;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlotName {
    DepartureCity,
    DestinationCities,
    StartDate,
    NumDays,
    PartySize,
    BudgetTotal,
    HotelType,
    RequiredSites,
    ExcludedSites,
    CuisinePrefs,
    TransportPref,
    Pace,
}

impl SlotName {
    pub const ALL: [SlotName; 12] = [
        SlotName::DepartureCity,
        SlotName::DestinationCities,
        SlotName::StartDate,
        SlotName::NumDays,
        SlotName::PartySize,
        SlotName::BudgetTotal,
        SlotName::HotelType,
        SlotName::RequiredSites,
        SlotName::ExcludedSites,
        SlotName::CuisinePrefs,
        SlotName::TransportPref,
        SlotName::Pace,
    ];

    /// Slots gathered in the basic-information round.
    pub const BASIC: [SlotName; 5] =
        [SlotName::DepartureCity, SlotName::StartDate, SlotName::NumDays, SlotName::PartySize, SlotName::BudgetTotal];

    /// Slots without which no plan can be laid out.
    pub const PLANNING_CORE: [SlotName; 4] =
        [SlotName::DepartureCity, SlotName::DestinationCities, SlotName::StartDate, SlotName::NumDays];

    pub fn as_str(self) -> &'static str {
        match self {
            SlotName::DepartureCity => "departure_city",
            SlotName::DestinationCities => "destination_cities",
            SlotName::StartDate => "start_date",
            SlotName::NumDays => "num_days",
            SlotName::PartySize => "party_size",
            SlotName::BudgetTotal => "budget_total",
            SlotName::HotelType => "hotel_type",
            SlotName::RequiredSites => "required_sites",
            SlotName::ExcludedSites => "excluded_sites",
            SlotName::CuisinePrefs => "cuisine_prefs",
            SlotName::TransportPref => "transport_pref",
            SlotName::Pace => "pace",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SlotName::DepartureCity => "where you are leaving from",
            SlotName::DestinationCities => "which cities you want to visit",
            SlotName::StartDate => "your start date",
            SlotName::NumDays => "how many days you have",
            SlotName::PartySize => "how many people are travelling",
            SlotName::BudgetTotal => "your total budget",
            SlotName::HotelType => "what kind of hotel you prefer",
            SlotName::RequiredSites => "any must-see attractions",
            SlotName::ExcludedSites => "places you would rather skip",
            SlotName::CuisinePrefs => "what food you enjoy",
            SlotName::TransportPref => "how you like to travel between cities",
            SlotName::Pace => "how many sights per day suits you",
        }
    }
}

impl fmt::Display for SlotName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SlotName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SlotName::ALL.into_iter().find(|n| n.as_str() == s).ok_or_else(|| format!("unknown slot `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HotelPref {
    Chain,
    Upscale,
    Any,
}

impl HotelPref {
    pub fn as_str(self) -> &'static str {
        match self {
            HotelPref::Chain => "chain",
            HotelPref::Upscale => "upscale",
            HotelPref::Any => "any",
        }
    }

    /// Whether a hotel of `kind` satisfies this preference.
    pub fn accepts(self, kind: HotelType) -> bool {
        match self {
            HotelPref::Any => true,
            HotelPref::Chain => kind == HotelType::Chain,
            HotelPref::Upscale => kind == HotelType::Upscale,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransportPref {
    RailAny,
    HighSpeedOnly,
    Any,
}

impl TransportPref {
    pub fn as_str(self) -> &'static str {
        match self {
            TransportPref::RailAny => "rail_any",
            TransportPref::HighSpeedOnly => "high_speed_only",
            TransportPref::Any => "any",
        }
    }

    pub fn accepts(self, mode: TransportMode) -> bool {
        match self {
            TransportPref::Any => true,
            TransportPref::RailAny => matches!(mode, TransportMode::HighSpeedRail | TransportMode::Rail),
            TransportPref::HighSpeedOnly => mode == TransportMode::HighSpeedRail,
        }
    }
}

/// Structured travel requirement. Every field is either filled or not;
/// unfilled fields serialize as `null` so all twelve keys are always present.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntentSlots {
    pub departure_city: Option<CityId>,
    pub destination_cities: Option<Vec<CityId>>,
    pub start_date: Option<NaiveDate>,
    pub num_days: Option<u32>,
    pub party_size: Option<u32>,
    pub budget_total: Option<Money>,
    pub hotel_type: Option<HotelPref>,
    pub required_sites: Option<BTreeSet<PoiId>>,
    pub excluded_sites: Option<BTreeSet<PoiId>>,
    pub cuisine_prefs: Option<Vec<String>>,
    pub transport_pref: Option<TransportPref>,
    pub pace: Option<u32>,
}

impl IntentSlots {
    pub fn is_filled(&self, slot: SlotName) -> bool {
        match slot {
            SlotName::DepartureCity => self.departure_city.is_some(),
            SlotName::DestinationCities => self.destination_cities.is_some(),
            SlotName::StartDate => self.start_date.is_some(),
            SlotName::NumDays => self.num_days.is_some(),
            SlotName::PartySize => self.party_size.is_some(),
            SlotName::BudgetTotal => self.budget_total.is_some(),
            SlotName::HotelType => self.hotel_type.is_some(),
            SlotName::RequiredSites => self.required_sites.is_some(),
            SlotName::ExcludedSites => self.excluded_sites.is_some(),
            SlotName::CuisinePrefs => self.cuisine_prefs.is_some(),
            SlotName::TransportPref => self.transport_pref.is_some(),
            SlotName::Pace => self.pace.is_some(),
        }
    }

    pub fn unfill(&mut self, slot: SlotName) {
        match slot {
            SlotName::DepartureCity => self.departure_city = None,
            SlotName::DestinationCities => self.destination_cities = None,
            SlotName::StartDate => self.start_date = None,
            SlotName::NumDays => self.num_days = None,
            SlotName::PartySize => self.party_size = None,
            SlotName::BudgetTotal => self.budget_total = None,
            SlotName::HotelType => self.hotel_type = None,
            SlotName::RequiredSites => self.required_sites = None,
            SlotName::ExcludedSites => self.excluded_sites = None,
            SlotName::CuisinePrefs => self.cuisine_prefs = None,
            SlotName::TransportPref => self.transport_pref = None,
            SlotName::Pace => self.pace = None,
        }
    }

    pub fn filled(&self) -> BTreeSet<SlotName> {
        SlotName::ALL.into_iter().filter(|s| self.is_filled(*s)).collect()
    }

    pub fn unfilled(&self) -> Vec<SlotName> {
        SlotName::ALL.into_iter().filter(|s| !self.is_filled(*s)).collect()
    }

    /// JSON image of one slot (`null` when unfilled).
    pub fn value_of(&self, slot: SlotName) -> Value {
        let v = serde_json::to_value(self).expect("slots serialize");
        v.get(slot.as_str()).cloned().unwrap_or(Value::Null)
    }

    /// Fill one slot from its JSON image. `null` is rejected: slots are only
    /// ever cleared explicitly.
    pub fn set_value(&mut self, slot: SlotName, value: &Value) -> Result<(), String> {
        fn parse<T: serde::de::DeserializeOwned>(slot: SlotName, v: &Value) -> Result<T, String> {
            serde_json::from_value(v.clone()).map_err(|e| format!("bad value for {slot}: {e}"))
        }
        if value.is_null() {
            return Err(format!("null value for {slot}"));
        }
        match slot {
            SlotName::DepartureCity => self.departure_city = Some(parse(slot, value)?),
            SlotName::DestinationCities => {
                let cities: Vec<CityId> = parse(slot, value)?;
                if cities.is_empty() || cities.len() > 4 {
                    return Err(format!("destination_cities needs 1-4 entries, got {}", cities.len()));
                }
                self.destination_cities = Some(cities)
            }
            SlotName::StartDate => self.start_date = Some(parse(slot, value)?),
            SlotName::NumDays => self.num_days = Some(positive(slot, parse(slot, value)?)?),
            SlotName::PartySize => self.party_size = Some(positive(slot, parse(slot, value)?)?),
            SlotName::BudgetTotal => {
                let m: Money = parse(slot, value)?;
                if m.is_negative() {
                    return Err("budget_total must not be negative".into());
                }
                self.budget_total = Some(m)
            }
            SlotName::HotelType => self.hotel_type = Some(parse(slot, value)?),
            SlotName::RequiredSites => self.required_sites = Some(parse(slot, value)?),
            SlotName::ExcludedSites => self.excluded_sites = Some(parse(slot, value)?),
            SlotName::CuisinePrefs => self.cuisine_prefs = Some(parse(slot, value)?),
            SlotName::TransportPref => self.transport_pref = Some(parse(slot, value)?),
            SlotName::Pace => self.pace = Some(positive(slot, parse(slot, value)?)?),
        }
        Ok(())
    }

    /// Copy a single slot's value from `other`.
    pub fn copy_slot(&mut self, other: &IntentSlots, slot: SlotName) {
        let v = other.value_of(slot);
        if v.is_null() {
            self.unfill(slot);
        } else {
            self.set_value(slot, &v).expect("value taken from valid slots");
        }
    }

    /// Structural problems: destination count, days versus cities and
    /// departure listed as a destination.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Some(dests) = &self.destination_cities {
            if !(2..=4).contains(&dests.len()) {
                out.push(format!("destination_cities has {} entries, expected 2-4", dests.len()));
            }
            let unique: BTreeSet<_> = dests.iter().collect();
            if unique.len() != dests.len() {
                out.push("destination_cities repeats a city".into());
            }
            if let Some(dep) = &self.departure_city {
                if dests.contains(dep) {
                    out.push("departure_city is also a destination".into());
                }
            }
            if let Some(days) = self.num_days {
                if (days as usize) < dests.len() {
                    out.push(format!("num_days {days} is fewer than the {} destinations", dests.len()));
                }
            }
        }
        out
    }

    pub fn party(&self) -> u32 {
        self.party_size.unwrap_or(1).max(1)
    }

    pub fn hotel_pref(&self) -> HotelPref {
        self.hotel_type.unwrap_or(HotelPref::Any)
    }

    pub fn transport(&self) -> TransportPref {
        self.transport_pref.unwrap_or(TransportPref::Any)
    }

    pub fn required(&self) -> BTreeSet<PoiId> {
        self.required_sites.clone().unwrap_or_default()
    }

    pub fn excluded(&self) -> BTreeSet<PoiId> {
        self.excluded_sites.clone().unwrap_or_default()
    }
}

fn positive(slot: SlotName, n: u32) -> Result<u32, String> {
    if n == 0 {
        Err(format!("{slot} must be positive"))
    } else {
        Ok(n)
    }
}

/// A query as exchanged by the CLI and bench: an id plus its slots.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TravelQuery {
    pub id: String,
    pub slots: IntentSlots,
}
