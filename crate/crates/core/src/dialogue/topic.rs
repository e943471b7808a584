use serde::{Deserialize, Serialize};

use super::{DialogueSession, IntentSlots, SlotName};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TopicState {
    Greeting,
    BasicInfo,
    DestinationTopic,
    AttractionTopic,
    RestaurantTopic,
    HotelTopic,
    TransportWeather,
    ConfirmRevise,
}

impl TopicState {
    pub const ALL: [TopicState; 8] = [
        TopicState::Greeting,
        TopicState::BasicInfo,
        TopicState::DestinationTopic,
        TopicState::AttractionTopic,
        TopicState::RestaurantTopic,
        TopicState::HotelTopic,
        TopicState::TransportWeather,
        TopicState::ConfirmRevise,
    ];

    /// Slots this topic gathers.
    pub fn slots(self) -> &'static [SlotName] {
        match self {
            TopicState::Greeting | TopicState::ConfirmRevise => &[],
            TopicState::BasicInfo => &SlotName::BASIC,
            TopicState::DestinationTopic => &[SlotName::DestinationCities],
            TopicState::AttractionTopic => &[SlotName::RequiredSites, SlotName::ExcludedSites, SlotName::Pace],
            TopicState::RestaurantTopic => &[SlotName::CuisinePrefs],
            TopicState::HotelTopic => &[SlotName::HotelType],
            TopicState::TransportWeather => &[SlotName::TransportPref],
        }
    }

    /// States reachable in one step. Greeting is only ever the starting state;
    /// every other state can move to any non-greeting state.
    pub fn successors(self) -> Vec<TopicState> {
        TopicState::ALL.into_iter().filter(|s| *s != TopicState::Greeting).collect()
    }

    /// Topic responsible for a slot.
    pub fn owning(slot: SlotName) -> TopicState {
        TopicState::ALL.into_iter().find(|t| t.slots().contains(&slot)).expect("every slot has a topic")
    }
}

/// Chooses the next topic. The default is [`PriorityPolicy`]; a model-backed
/// selector can stand in behind the same trait.
pub trait TopicPolicy {
    fn next_topic(&self, session: &DialogueSession) -> TopicState;
}

/// Basics first, then destinations, then the preference topics in a fixed
/// order, then confirmation.
#[derive(Debug, Clone, Copy, Default)]
pub struct PriorityPolicy;

impl PriorityPolicy {
    pub fn for_slots(slots: &IntentSlots) -> TopicState {
        const ORDER: [TopicState; 6] = [
            TopicState::BasicInfo,
            TopicState::DestinationTopic,
            TopicState::AttractionTopic,
            TopicState::RestaurantTopic,
            TopicState::HotelTopic,
            TopicState::TransportWeather,
        ];
        ORDER
            .into_iter()
            .find(|t| t.slots().iter().any(|s| !slots.is_filled(*s)))
            .unwrap_or(TopicState::ConfirmRevise)
    }
}

impl TopicPolicy for PriorityPolicy {
    fn next_topic(&self, session: &DialogueSession) -> TopicState {
        PriorityPolicy::for_slots(&session.slots)
    }
}

/// Topic chosen by the default policy for `slots`.
pub fn next_topic(session: &DialogueSession) -> TopicState {
    PriorityPolicy.next_topic(session)
}
