//! Clarification dialogue: slots, topic states, acts, simulator.

mod acts;
mod command;
mod implicit;
mod revision;
mod session;
mod simulator;
mod slots;
mod topic;

pub use acts::{Act, DialogueTurn, Role, MAX_ASKS, MAX_IMAGES, MAX_SNIPPETS};
pub use command::parse_command;
pub use implicit::{make_implicit, make_implicit_sampled, sample_hidden, ImplicitError};
pub use revision::{Directive, RevisionCategory, RevisionRequest, RevisionTarget};
pub use session::{
    extract_intent, fold_act, recommendations, render_assistant, render_user, ActFold, DialogueSession, Extraction,
    IntentExtractor, SessionError, RECOMMENDATIONS_PER_CITY,
};
pub use simulator::{
    simulate_session, simulate_to_confirm, Persona, ProtocolError, RevisionScript, SimulationError, UserSimulator,
    MAX_CLARIFY_TURNS,
};
pub use slots::{HotelPref, IntentSlots, SlotName, TransportPref, TravelQuery};
pub use topic::{next_topic, PriorityPolicy, TopicPolicy, TopicState};
