use serde::{Deserialize, Serialize};

use super::acts::{Act, DialogueTurn, Role, MAX_ASKS, MAX_IMAGES, MAX_SNIPPETS};
use super::revision::{Directive, RevisionRequest};
use super::topic::{TopicPolicy, TopicState};
use super::{IntentSlots, SlotName, TravelQuery};
use crate::kb::{weather_on, CityId, KnowledgeBase, PoiKind};
use crate::plan::{CostLedger, Plan};
use crate::planner::{generate_plan, revise_plan, slots_after, PlanError, PlanOutcome, SearchBudget};
use crate::validator::PlanReport;

/// Recommendations per destination city per topic.
pub const RECOMMENDATIONS_PER_CITY: usize = 3;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SessionError {
    #[error("it is the {0:?}'s turn")]
    OutOfTurn(Role),
    #[error("act `{0}` cannot be sent by the user")]
    InvalidAct(String),
    #[error("no plan has been generated yet")]
    NoPlan,
    #[error(transparent)]
    Plan(#[from] PlanError),
}

/// Slot image of a transcript plus per-act problems.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Extraction {
    pub slots: IntentSlots,
    pub diagnostics: Vec<String>,
}

/// Turns a transcript into slots. The default folds structured acts; a
/// model-backed extractor for free text can replace it.
pub trait IntentExtractor {
    fn extract(&self, history: &[DialogueTurn]) -> Extraction;
}

/// Last-write-wins fold over the user's inform and revise acts.
#[derive(Debug, Clone, Copy, Default)]
pub struct ActFold;

impl IntentExtractor for ActFold {
    fn extract(&self, history: &[DialogueTurn]) -> Extraction {
        let mut out = Extraction::default();
        for turn in history.iter().filter(|t| t.role == Role::User) {
            for act in &turn.acts {
                if let Err(e) = fold_act(&mut out.slots, act) {
                    out.diagnostics.push(e);
                }
            }
        }
        out
    }
}

pub fn extract_intent(history: &[DialogueTurn]) -> IntentSlots {
    ActFold.extract(history).slots
}

/// Apply one act to `slots`. Acts that carry no slot information are ignored.
pub fn fold_act(slots: &mut IntentSlots, act: &Act) -> Result<(), String> {
    match act {
        Act::Inform { slot, value } => {
            let name: SlotName = slot.parse()?;
            slots.set_value(name, value)
        }
        Act::Revise { request } => {
            *slots = slots_after(request, slots);
            Ok(())
        }
        _ => Ok(()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DialogueSession {
    pub id: String,
    pub state: TopicState,
    pub slots: IntentSlots,
    pub history: Vec<DialogueTurn>,
    pub plan: Option<Plan>,
    pub report: Option<PlanReport>,
    pub revisions: Vec<RevisionRequest>,
    /// Every state entered, in order, starting with the initial one.
    pub transitions: Vec<TopicState>,
    /// Problems with the latest user turn, reported in the next reply.
    pub notes: Vec<String>,
}

impl DialogueSession {
    pub fn new(id: impl Into<String>) -> Self {
        DialogueSession {
            id: id.into(),
            state: TopicState::Greeting,
            slots: IntentSlots::default(),
            history: Vec::new(),
            plan: None,
            report: None,
            revisions: Vec::new(),
            transitions: vec![TopicState::Greeting],
            notes: Vec::new(),
        }
    }

    /// Whose turn it is. Sessions open with the user.
    pub fn expected_role(&self) -> Role {
        match self.history.last() {
            Some(t) if t.role == Role::User => Role::Assistant,
            _ => Role::User,
        }
    }

    pub fn assistant_turns(&self) -> usize {
        self.history.iter().filter(|t| t.role == Role::Assistant).count()
    }

    pub fn latest_assistant_turn(&self) -> Option<&DialogueTurn> {
        self.history.iter().rev().find(|t| t.role == Role::Assistant)
    }

    /// Check a user turn without changing the session.
    pub fn check_user_turn(&self, acts: &[Act]) -> Result<(), SessionError> {
        if self.expected_role() != Role::User {
            return Err(SessionError::OutOfTurn(Role::Assistant));
        }
        for act in acts {
            let name = match act {
                Act::Ask { .. } => "ask",
                Act::Recommend { .. } => "recommend",
                Act::Forecast { .. } => "forecast",
                Act::PresentPlan { .. } => "present_plan",
                Act::Diagnostic { .. } => "diagnostic",
                Act::Confirm { slots: Some(_) } => "confirm with slots",
                _ => continue,
            };
            return Err(SessionError::InvalidAct(name.to_string()));
        }
        Ok(())
    }

    /// Record a user turn and fold its acts into the slots. Malformed informs
    /// are skipped and noted.
    pub fn submit_user(&mut self, acts: Vec<Act>, text: impl Into<String>) -> Result<(), SessionError> {
        self.check_user_turn(&acts)?;
        self.notes.clear();
        for act in &acts {
            if let Err(e) = fold_act(&mut self.slots, act) {
                self.notes.push(e);
            }
        }
        let text = text.into();
        let text = if text.is_empty() { render_user(&acts) } else { text };
        self.history.push(DialogueTurn { role: Role::User, acts, text });
        Ok(())
    }

    /// Generate a plan from the current slots.
    pub fn generate(&mut self, kb: &KnowledgeBase, budget: SearchBudget) -> Result<PlanOutcome, SessionError> {
        let query = TravelQuery { id: self.id.clone(), slots: self.slots.clone() };
        let out = generate_plan(&query, kb, budget)?;
        self.plan = Some(out.plan.clone());
        self.report = Some(out.report.clone());
        Ok(out)
    }

    /// Revise the current plan. On error nothing changes.
    pub fn revise(&mut self, request: &RevisionRequest, kb: &KnowledgeBase) -> Result<PlanOutcome, SessionError> {
        let plan = self.plan.as_ref().ok_or(SessionError::NoPlan)?;
        let out = revise_plan(plan, request, &self.slots, kb)?;
        self.slots = slots_after(request, &self.slots);
        self.plan = Some(out.plan.clone());
        self.report = Some(out.report.clone());
        self.revisions.push(request.clone());
        Ok(out)
    }

    /// Produce the assistant's reply to the latest user turn.
    pub fn assistant_turn(&mut self, kb: &KnowledgeBase, policy: &dyn TopicPolicy) -> Result<DialogueTurn, SessionError> {
        if self.expected_role() != Role::Assistant {
            return Err(SessionError::OutOfTurn(Role::User));
        }
        let mut acts: Vec<Act> = self.notes.drain(..).map(|message| Act::Diagnostic { message }).collect();
        let requests: Vec<RevisionRequest> = self
            .history
            .last()
            .map(|t| {
                t.acts
                    .iter()
                    .filter_map(|a| match a {
                        Act::Revise { request } => Some(request.clone()),
                        _ => None,
                    })
                    .collect()
            })
            .unwrap_or_default();
        let revised = !requests.is_empty();
        if self.plan.is_some() {
            // Slot effects were folded in when the turn arrived.
            for request in &requests {
                if let Err(e) = self.revise(request, kb) {
                    acts.push(Act::Diagnostic { message: e.to_string() });
                }
            }
        }
        let next = policy.next_topic(self);
        if next != self.state {
            self.state = next;
            self.transitions.push(next);
        }
        if revised && self.plan.is_some() {
            acts.push(self.present_plan());
        } else {
            acts.extend(self.topic_acts(kb));
        }
        let text = render_assistant(&acts, kb);
        let turn = DialogueTurn { role: Role::Assistant, acts, text };
        self.history.push(turn.clone());
        Ok(turn)
    }

    fn present_plan(&self) -> Act {
        let plan = self.plan.as_ref().expect("checked by caller");
        Act::PresentPlan {
            final_pass: self.report.as_ref().is_some_and(|r| r.final_pass),
            total_cost: CostLedger::of(plan).total,
        }
    }

    fn topic_acts(&self, kb: &KnowledgeBase) -> Vec<Act> {
        let mut acts = Vec::new();
        let unfilled: Vec<SlotName> =
            self.state.slots().iter().copied().filter(|s| !self.slots.is_filled(*s)).take(MAX_ASKS).collect();
        let kind = match self.state {
            TopicState::AttractionTopic => Some(PoiKind::Attraction),
            TopicState::RestaurantTopic => Some(PoiKind::Restaurant),
            TopicState::HotelTopic => Some(PoiKind::Hotel),
            _ => None,
        };
        let dests = self.slots.destination_cities.clone().unwrap_or_default();
        if let Some(kind) = kind {
            for city in &dests {
                let recs = recommendations(kb, city, kind, RECOMMENDATIONS_PER_CITY);
                if recs.is_empty() {
                    acts.push(Act::Diagnostic {
                        message: format!("no {} known for `{city}`", kind.as_str()),
                    });
                    acts.push(Act::ask(SlotName::DestinationCities));
                    return acts;
                }
                acts.extend(recs);
            }
        }
        match self.state {
            TopicState::TransportWeather => {
                if let Some(date) = self.slots.start_date {
                    for city in &dests {
                        let w = weather_on(kb, city, date);
                        acts.push(Act::Forecast {
                            city_id: city.clone(),
                            date,
                            condition: w.condition,
                            high_c: w.high_c,
                            low_c: w.low_c,
                        });
                    }
                }
            }
            TopicState::ConfirmRevise => {
                if self.plan.is_some() {
                    acts.push(self.present_plan());
                } else {
                    acts.push(Act::Confirm { slots: Some(self.slots.clone()) });
                }
            }
            _ => {}
        }
        acts.extend(unfilled.into_iter().map(Act::ask));
        acts
    }
}

/// Top-rated POIs of `kind` in `city` (rating descending, then id) with
/// bounded evidence.
pub fn recommendations(kb: &KnowledgeBase, city: &CityId, kind: PoiKind, limit: usize) -> Vec<Act> {
    let mut pois: Vec<_> = kb.pois_in(city, kind).collect();
    pois.sort_by(|a, b| b.rating.total_cmp(&a.rating).then_with(|| a.id.cmp(&b.id)));
    pois.into_iter()
        .take(limit)
        .map(|p| Act::Recommend {
            poi: p.id.clone(),
            name: p.name.clone(),
            kind: p.kind(),
            city_id: p.city_id.clone(),
            rating: p.rating,
            avg_cost: p.avg_cost,
            reviews: p.reviews.iter().take(MAX_SNIPPETS).cloned().collect(),
            image_refs: p.image_refs.iter().take(MAX_IMAGES).cloned().collect(),
        })
        .collect()
}

fn render_value(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s.clone(),
        serde_json::Value::Array(items) => items.iter().map(render_value).collect::<Vec<_>>().join(", "),
        other => other.to_string(),
    }
}

pub fn render_user(acts: &[Act]) -> String {
    let mut parts = Vec::new();
    for act in acts {
        match act {
            Act::Inform { slot, value } => parts.push(format!("{}: {}.", slot.replace('_', " "), render_value(value))),
            Act::Accept { poi } => parts.push(format!("{poi} sounds good.")),
            Act::Reject { poi } => parts.push(format!("Not {poi}.")),
            Act::Confirm { .. } => parts.push("That's right.".to_string()),
            Act::Revise { request } => parts.push(match &request.directive {
                Directive::CapBudget { budget } => format!("Please keep it under {budget} yuan."),
                _ => format!(
                    "Could you change the {} on day {}?",
                    format!("{:?}", request.category).to_lowercase(),
                    request.target.map(|t| t.day + 1).unwrap_or(1)
                ),
            }),
            _ => {}
        }
    }
    parts.join(" ")
}

pub fn render_assistant(acts: &[Act], kb: &KnowledgeBase) -> String {
    let mut parts = Vec::new();
    let asks: Vec<&str> = acts
        .iter()
        .filter_map(|a| match a {
            Act::Ask { slot } => Some(slot.parse::<SlotName>().map(|s| s.label()).unwrap_or(slot.as_str())),
            _ => None,
        })
        .collect();
    for act in acts {
        match act {
            Act::Recommend { name, rating, reviews, .. } => {
                let mut line = format!("{name} ({rating:.1} stars)");
                if let Some(r) = reviews.first() {
                    line.push_str(&format!(": \"{r}\""));
                }
                parts.push(line);
            }
            Act::Forecast { city_id, date, condition, high_c, low_c } => {
                let city = kb.city(city_id).map(|c| c.name.as_str()).unwrap_or(city_id.as_str());
                parts.push(format!("{city} on {date}: {condition:?}, {low_c}-{high_c} C").replace("Unknown", "no forecast"));
            }
            Act::Confirm { .. } => parts.push("Here is what I have. Shall I plan it?".to_string()),
            Act::PresentPlan { final_pass, total_cost } => parts.push(format!(
                "Your plan is ready, {total_cost} yuan in total{}.",
                if *final_pass { "" } else { ", though some requirements could not be met" }
            )),
            Act::Diagnostic { message } => parts.push(format!("Note: {message}.")),
            _ => {}
        }
    }
    match asks.as_slice() {
        [] => {}
        [one] => parts.push(format!("Could you tell me {one}?")),
        [a, b, ..] => parts.push(format!("Could you tell me {a} and {b}?")),
    }
    if parts.is_empty() {
        parts.push("Hello! Where would you like to go?".to_string());
    }
    parts.join(" ")
}
