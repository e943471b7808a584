//! Terminal command grammar mapped onto user acts.
//!
//! ```text
//! set budget 5000
//! set destinations Hangzhou, Shanghai
//! require "Jiufeng Forest Zoo"
//! exclude "Some Place"
//! accept "Name" | reject "Name"
//! confirm
//! revise dining 2 | revise weather 2 | revise transport 1 | revise budget 4000
//! ```
//! Day numbers in commands count from 1.

use serde_json::{json, Value};

use super::acts::Act;
use super::revision::RevisionRequest;
use super::{IntentSlots, SlotName};
use crate::kb::{KnowledgeBase, PoiId, PoiKind};
use crate::money::Money;

fn slot_alias(word: &str) -> Option<SlotName> {
    let slot = match word {
        "from" | "departure" => SlotName::DepartureCity,
        "to" | "destinations" | "cities" => SlotName::DestinationCities,
        "start" | "date" => SlotName::StartDate,
        "days" => SlotName::NumDays,
        "party" | "people" => SlotName::PartySize,
        "budget" => SlotName::BudgetTotal,
        "hotel" => SlotName::HotelType,
        "cuisine" | "food" => SlotName::CuisinePrefs,
        "transport" => SlotName::TransportPref,
        "pace" => SlotName::Pace,
        other => return other.parse().ok(),
    };
    Some(slot)
}

fn quoted(rest: &str) -> Result<&str, String> {
    let rest = rest.trim();
    rest.strip_prefix('"')
        .and_then(|r| r.strip_suffix('"'))
        .or((!rest.is_empty()).then_some(rest))
        .ok_or_else(|| "expected a quoted name".to_string())
}

fn city_value(kb: &KnowledgeBase, text: &str) -> Result<Value, String> {
    let t = text.trim();
    kb.city_by_name(t)
        .map(|c| c.id.clone())
        .or_else(|| kb.city(&t.into()).map(|c| c.id.clone()))
        .map(|id| json!(id))
        .ok_or_else(|| format!("unknown city `{t}`"))
}

fn attraction(kb: &KnowledgeBase, text: &str) -> Result<PoiId, String> {
    let t = text.trim();
    kb.poi_by_name(t)
        .or_else(|| kb.poi(&PoiId::new(t)))
        .filter(|p| p.kind() == PoiKind::Attraction)
        .map(|p| p.id.clone())
        .ok_or_else(|| format!("unknown attraction `{t}`"))
}

fn poi(kb: &KnowledgeBase, text: &str) -> Result<PoiId, String> {
    let t = text.trim();
    kb.poi_by_name(t).or_else(|| kb.poi(&PoiId::new(t))).map(|p| p.id.clone()).ok_or_else(|| format!("unknown place `{t}`"))
}

fn day_number(word: Option<&str>) -> Result<usize, String> {
    let n: usize = word.ok_or("missing day number")?.parse().map_err(|_| "day must be a number".to_string())?;
    n.checked_sub(1).ok_or_else(|| "days count from 1".to_string())
}

/// Parse one command line into user acts. `current` supplies the existing
/// site sets that `require` and `exclude` extend.
pub fn parse_command(line: &str, kb: &KnowledgeBase, current: &IntentSlots) -> Result<Vec<Act>, String> {
    let line = line.trim();
    let (verb, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
    match verb {
        "set" => {
            let (key, value) = rest.trim().split_once(char::is_whitespace).ok_or("usage: set <slot> <value>")?;
            let slot = slot_alias(key).ok_or_else(|| format!("unknown slot `{key}`"))?;
            let value = value.trim();
            let json = match slot {
                SlotName::DepartureCity => city_value(kb, value)?,
                SlotName::DestinationCities => {
                    Value::Array(value.split(',').map(|c| city_value(kb, c)).collect::<Result<_, _>>()?)
                }
                SlotName::NumDays | SlotName::PartySize | SlotName::Pace => {
                    json!(value.parse::<u32>().map_err(|_| format!("`{value}` is not a whole number"))?)
                }
                SlotName::BudgetTotal => json!(value.parse::<Money>().map_err(|e| e.to_string())?),
                SlotName::CuisinePrefs => json!(value.split(',').map(|s| s.trim().to_string()).collect::<Vec<_>>()),
                SlotName::RequiredSites | SlotName::ExcludedSites => {
                    json!(value.split(',').map(|s| attraction(kb, s)).collect::<Result<Vec<_>, _>>()?)
                }
                _ => json!(value),
            };
            let mut probe = IntentSlots::default();
            probe.set_value(slot, &json)?;
            Ok(vec![Act::Inform { slot: slot.as_str().to_string(), value: json }])
        }
        "require" | "exclude" => {
            let id = attraction(kb, quoted(rest)?)?;
            let (slot, mut set) = if verb == "require" {
                (SlotName::RequiredSites, current.required())
            } else {
                (SlotName::ExcludedSites, current.excluded())
            };
            set.insert(id);
            Ok(vec![Act::Inform { slot: slot.as_str().to_string(), value: json!(set) }])
        }
        "accept" => Ok(vec![Act::Accept { poi: poi(kb, quoted(rest)?)? }]),
        "reject" => Ok(vec![Act::Reject { poi: poi(kb, quoted(rest)?)? }]),
        "confirm" | "yes" | "ok" => Ok(vec![Act::Confirm { slots: None }]),
        "revise" => {
            let mut words = rest.split_whitespace();
            let what = words.next().ok_or("usage: revise <dining|weather|transport|budget> <day|amount>")?;
            let request = match what {
                "dining" => RevisionRequest::dining(day_number(words.next())?),
                "weather" => RevisionRequest::weather(day_number(words.next())?),
                "transport" => RevisionRequest::transportation(day_number(words.next())?),
                "budget" => RevisionRequest::budget(
                    words.next().ok_or("missing amount")?.parse::<Money>().map_err(|e| e.to_string())?,
                ),
                other => return Err(format!("unknown revision `{other}`")),
            };
            Ok(vec![Act::Revise { request }])
        }
        "" => Err("empty command".into()),
        other => Err(format!("unknown command `{other}`")),
    }
}
