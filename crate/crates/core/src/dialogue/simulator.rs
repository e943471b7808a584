use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::acts::{Act, DialogueTurn, Role};
use super::revision::{RevisionCategory, RevisionRequest};
use super::session::{fold_act, render_user, DialogueSession, SessionError};
use super::topic::{PriorityPolicy, TopicState};
use super::{IntentSlots, SlotName};
use crate::kb::{KnowledgeBase, PoiId};
use crate::money::Money;
use crate::planner::SearchBudget;

/// One scripted post-plan change. `day` is a 0-based plan day; budget
/// revisions use `budget_cap` instead.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RevisionScript {
    pub category: RevisionCategory,
    #[serde(default)]
    pub day: usize,
    #[serde(default)]
    pub budget_cap: Option<Money>,
}

/// A scripted traveller.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Persona {
    pub id: String,
    /// Everything the traveller would answer if asked.
    pub slots: IntentSlots,
    /// Slots volunteered in the opening message, in this order.
    pub reveal_order: Vec<SlotName>,
    /// Recommended POIs the traveller welcomes; others are declined.
    pub preferences: Vec<PoiId>,
    pub revision_script: Vec<RevisionScript>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProtocolError {
    #[error("assistant asked for unknown slot `{0}`")]
    UnknownSlot(String),
    #[error("persona has no value for `{0}`")]
    Uncovered(SlotName),
    #[error("expected an assistant turn")]
    NotAssistant,
}

const OPENERS: [&str; 4] = ["", "Sure. ", "Okay. ", "Let me see. "];

/// Deterministic user. The seed only varies the wording, never the acts.
#[derive(Debug, Clone)]
pub struct UserSimulator {
    persona: Persona,
    rng: ChaCha8Rng,
    ledger: IntentSlots,
    next_revision: usize,
}

impl UserSimulator {
    pub fn new(persona: Persona, seed: u64) -> Self {
        UserSimulator { persona, rng: ChaCha8Rng::seed_from_u64(seed), ledger: IntentSlots::default(), next_revision: 0 }
    }

    pub fn persona(&self) -> &Persona {
        &self.persona
    }

    /// What the simulator has told the assistant so far.
    pub fn ledger(&self) -> &IntentSlots {
        &self.ledger
    }

    pub fn revisions_left(&self) -> usize {
        self.persona.revision_script.len() - self.next_revision
    }

    fn turn(&mut self, acts: Vec<Act>) -> DialogueTurn {
        for act in &acts {
            fold_act(&mut self.ledger, act).expect("simulator emits well-formed acts");
        }
        let opener = OPENERS.choose(&mut self.rng).expect("nonempty");
        let text = format!("{opener}{}", render_user(&acts));
        DialogueTurn { role: Role::User, acts, text }
    }

    fn inform(&self, slot: SlotName) -> Result<Act, ProtocolError> {
        let value = self.persona.slots.value_of(slot);
        if value.is_null() {
            return Err(ProtocolError::Uncovered(slot));
        }
        Ok(Act::Inform { slot: slot.as_str().to_string(), value })
    }

    /// Opening message stating the persona's volunteered slots.
    pub fn opening(&mut self) -> Result<DialogueTurn, ProtocolError> {
        let acts = self.persona.reveal_order.clone().into_iter().map(|s| self.inform(s)).collect::<Result<_, _>>()?;
        Ok(self.turn(acts))
    }

    fn scripted_request(&self, script: &RevisionScript) -> RevisionRequest {
        match script.category {
            RevisionCategory::Dining => RevisionRequest::dining(script.day),
            RevisionCategory::Transportation => RevisionRequest::transportation(script.day),
            RevisionCategory::Weather => RevisionRequest::weather(script.day),
            RevisionCategory::Budget => RevisionRequest::budget(script.budget_cap.unwrap_or_else(|| {
                self.ledger.budget_total.or(self.persona.slots.budget_total).unwrap_or(Money::ZERO).scaled(9, 10)
            })),
        }
    }

    /// Answer exactly what was asked, react to recommendations, and after a
    /// plan is presented issue the next scripted revision.
    pub fn respond(&mut self, turn: &DialogueTurn) -> Result<DialogueTurn, ProtocolError> {
        if turn.role != Role::Assistant {
            return Err(ProtocolError::NotAssistant);
        }
        let mut acts = Vec::new();
        for act in &turn.acts {
            match act {
                Act::Ask { slot } => {
                    let name: SlotName = slot.parse().map_err(|_| ProtocolError::UnknownSlot(slot.clone()))?;
                    acts.push(self.inform(name)?);
                }
                Act::Recommend { poi, .. } => {
                    if self.persona.preferences.contains(poi) {
                        acts.push(Act::Accept { poi: poi.clone() });
                    } else {
                        acts.push(Act::Reject { poi: poi.clone() });
                    }
                }
                Act::PresentPlan { .. } => {
                    if let Some(script) = self.persona.revision_script.get(self.next_revision).cloned() {
                        self.next_revision += 1;
                        acts.push(Act::Revise { request: self.scripted_request(&script) });
                    } else {
                        acts.push(Act::Confirm { slots: None });
                    }
                }
                Act::Confirm { .. } => acts.push(Act::Confirm { slots: None }),
                _ => {}
            }
        }
        if acts.is_empty() {
            acts.push(Act::Confirm { slots: None });
        }
        Ok(self.turn(acts))
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimulationError {
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Session(#[from] SessionError),
    #[error("no confirmation after {0} assistant turns")]
    NoConvergence(usize),
}

/// Assistant turns allowed before a simulation is declared stuck.
pub const MAX_CLARIFY_TURNS: usize = 15;

/// Run the clarification dialogue until the assistant reaches confirmation.
pub fn simulate_to_confirm(
    session: &mut DialogueSession,
    sim: &mut UserSimulator,
    kb: &KnowledgeBase,
) -> Result<(), SimulationError> {
    if session.history.is_empty() {
        let opening = sim.opening()?;
        session.submit_user(opening.acts, opening.text)?;
    }
    loop {
        let turn = session.assistant_turn(kb, &PriorityPolicy)?;
        if session.state == TopicState::ConfirmRevise {
            return Ok(());
        }
        if session.assistant_turns() >= MAX_CLARIFY_TURNS {
            return Err(SimulationError::NoConvergence(session.assistant_turns()));
        }
        let reply = sim.respond(&turn)?;
        session.submit_user(reply.acts, reply.text)?;
    }
}

/// Full session: clarification, plan, then every scripted revision. Ends on
/// the user's final confirmation.
pub fn simulate_session(
    persona: &Persona,
    seed: u64,
    kb: &KnowledgeBase,
    budget: SearchBudget,
) -> Result<DialogueSession, SimulationError> {
    let mut session = DialogueSession::new(persona.id.clone());
    let mut sim = UserSimulator::new(persona.clone(), seed);
    simulate_to_confirm(&mut session, &mut sim, kb)?;
    session.generate(kb, budget)?;
    loop {
        let last = session.latest_assistant_turn().cloned().expect("clarification produced turns");
        let reply = sim.respond(&last)?;
        let done = !reply.acts.iter().any(|a| matches!(a, Act::Revise { .. }))
            && last.acts.iter().any(|a| matches!(a, Act::PresentPlan { .. }));
        session.submit_user(reply.acts, reply.text)?;
        if done {
            return Ok(session);
        }
        session.assistant_turn(kb, &PriorityPolicy)?;
    }
}
