//! Transport-independent request handling.
//!
//! [`Api::dispatch`] maps (method, target, content type, body) to a status and
//! a canonical JSON body. The axum server and the tests both go through it.

use std::collections::BTreeMap;
use std::sync::Arc;

use itinera_core::canonical;
use itinera_core::dialogue::{
    parse_command, render_user, simulate_session, simulate_to_confirm, Act, DialogueSession, DialogueTurn, Persona,
    PriorityPolicy, RevisionRequest, Role, SessionError, SlotName, TravelQuery, UserSimulator,
};
use itinera_core::kb::{CityId, HotelType, KnowledgeBase, NearbyPoi, Poi, PoiId, PoiKind};
use itinera_core::money::Money;
use itinera_core::plan::Plan;
use itinera_core::planner::{PlanError, SearchBudget};
use itinera_core::validator::evaluate_plan;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::store::{lock_session, CreateError, SessionStore};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Response {
    pub status: u16,
    pub body: String,
}

impl Response {
    fn json<T: Serialize + ?Sized>(status: u16, value: &T) -> Self {
        Response { status, body: canonical::to_line(value) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: u16,
    pub code: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

impl ApiError {
    fn new(status: u16, code: &str, message: impl Into<String>) -> Self {
        ApiError { status, code: code.to_string(), message: message.into(), path: None }
    }

    fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        ApiError { path: Some(path.into()), ..ApiError::new(400, "schema", message) }
    }

    fn not_found(what: &str, id: &str) -> Self {
        ApiError::new(404, "not_found", format!("unknown {what} `{id}`"))
    }

    fn into_response(self) -> Response {
        #[derive(Serialize)]
        struct Body<'a> {
            error: &'a ApiError,
        }
        Response::json(self.status, &Body { error: &self })
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        let message = e.to_string();
        match e {
            SessionError::OutOfTurn(_) => ApiError::new(409, "out_of_turn", message),
            SessionError::NoPlan => ApiError::new(409, "no_plan", message),
            SessionError::InvalidAct(_) => ApiError { path: Some("acts".into()), ..ApiError::new(400, "invalid_act", message) },
            SessionError::Plan(p) => p.into(),
        }
    }
}

impl From<PlanError> for ApiError {
    fn from(e: PlanError) -> Self {
        let code = match e {
            PlanError::MissingSlots(_) => "missing_slots",
            PlanError::Infeasible(_) => "infeasible",
            PlanError::RevisionInfeasible(_) => "revision_infeasible",
            PlanError::BadRequest(_) => "bad_revision",
        };
        ApiError::new(422, code, e.to_string())
    }
}

/// Session state as sent to clients: the whole session plus fields derived
/// from it.
#[derive(Debug, Serialize)]
pub struct SessionEnvelope<'a> {
    #[serde(flatten)]
    pub session: &'a DialogueSession,
    pub fill_mask: BTreeMap<SlotName, bool>,
    pub filled: usize,
    pub expected_role: Role,
    pub latest_assistant_turn: Option<&'a DialogueTurn>,
}

impl<'a> SessionEnvelope<'a> {
    pub fn of(session: &'a DialogueSession) -> Self {
        let fill_mask: BTreeMap<SlotName, bool> =
            SlotName::ALL.iter().map(|&s| (s, session.slots.is_filled(s))).collect();
        SessionEnvelope {
            session,
            filled: fill_mask.values().filter(|f| **f).count(),
            fill_mask,
            expected_role: session.expected_role(),
            latest_assistant_turn: session.latest_assistant_turn(),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
enum RunMode {
    /// Stop when the assistant asks for confirmation.
    #[default]
    Clarify,
    /// Clarify, plan, apply the persona's revisions and confirm.
    Full,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateSession {
    #[serde(default)]
    id: Option<String>,
    #[serde(default)]
    persona: Option<Persona>,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    run: Option<RunMode>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TurnBody {
    #[serde(default)]
    acts: Option<Vec<Act>>,
    #[serde(default)]
    command: Option<String>,
    #[serde(default)]
    text: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Empty {}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ValidateBody {
    plan: Plan,
    query: TravelQuery,
}

#[derive(Serialize)]
struct TurnReply<'a> {
    turn: &'a DialogueTurn,
    envelope: SessionEnvelope<'a>,
}

#[derive(Serialize)]
struct AttractionSummary<'a> {
    id: &'a PoiId,
    name: &'a str,
    city_id: &'a CityId,
    rating: f64,
    avg_cost: Money,
    indoor: bool,
    must_visit_rank: Option<u32>,
    categories: &'a [String],
}

#[derive(Serialize)]
struct NearbyView<'a> {
    id: &'a PoiId,
    name: &'a str,
    distance_km: f64,
    rating: f64,
    avg_cost: Money,
    #[serde(skip_serializing_if = "Option::is_none")]
    cuisine: Option<&'a [String]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hotel_type: Option<HotelType>,
}

#[derive(Serialize)]
struct Nearby<'a> {
    restaurants: Vec<NearbyView<'a>>,
    hotels: Vec<NearbyView<'a>>,
}

#[derive(Serialize)]
struct AttractionView<'a> {
    #[serde(flatten)]
    poi: &'a Poi,
    nearby: Nearby<'a>,
}

enum Route<'a> {
    Sessions,
    Session(&'a str),
    Turns(&'a str),
    Plan(&'a str),
    Revise(&'a str),
    Validate,
    Cities,
    Attractions,
    Attraction(&'a str),
}

impl<'a> Route<'a> {
    fn parse(path: &'a str) -> Option<Self> {
        let segs: Vec<&str> = path.split('/').filter(|s| !s.is_empty()).collect();
        Some(match segs.as_slice() {
            ["sessions"] => Route::Sessions,
            ["sessions", id] => Route::Session(id),
            ["sessions", id, "turns"] => Route::Turns(id),
            ["sessions", id, "plan"] => Route::Plan(id),
            ["sessions", id, "revise"] => Route::Revise(id),
            ["validate"] => Route::Validate,
            ["kb", "cities"] => Route::Cities,
            ["kb", "attractions"] => Route::Attractions,
            ["kb", "attractions", id] => Route::Attraction(id),
            _ => return None,
        })
    }

    fn method(&self) -> &'static str {
        match self {
            Route::Session(_) | Route::Cities | Route::Attractions | Route::Attraction(_) => "GET",
            _ => "POST",
        }
    }
}

fn parse_body<T: DeserializeOwned>(body: &[u8]) -> Result<T, ApiError> {
    let bytes: &[u8] = if body.iter().all(u8::is_ascii_whitespace) { b"{}" } else { body };
    let mut de = serde_json::Deserializer::from_slice(bytes);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        ApiError::schema(path, e.into_inner().to_string())
    })?;
    de.end().map_err(|e| ApiError::schema(".", e.to_string()))?;
    Ok(value)
}

fn is_json(content_type: Option<&str>) -> bool {
    content_type
        .and_then(|ct| ct.split(';').next())
        .is_some_and(|mime| mime.trim().eq_ignore_ascii_case("application/json"))
}

pub struct Api {
    kb: Arc<KnowledgeBase>,
    store: SessionStore,
    search: SearchBudget,
}

type Handled = Result<Response, ApiError>;

impl Api {
    pub fn new(kb: KnowledgeBase) -> Self {
        Api::with_store(kb, SessionStore::in_memory())
    }

    pub fn with_store(kb: KnowledgeBase, store: SessionStore) -> Self {
        Api { kb: Arc::new(kb), store, search: SearchBudget::default() }
    }

    pub fn kb(&self) -> &KnowledgeBase {
        &self.kb
    }

    pub fn store(&self) -> &SessionStore {
        &self.store
    }

    /// Handle one request. `target` is the path with an optional `?query`.
    pub fn dispatch(&self, method: &str, target: &str, content_type: Option<&str>, body: &[u8]) -> Response {
        self.route(method, target, content_type, body).unwrap_or_else(ApiError::into_response)
    }

    fn route(&self, method: &str, target: &str, content_type: Option<&str>, body: &[u8]) -> Handled {
        let (path, query) = target.split_once('?').unwrap_or((target, ""));
        let route = Route::parse(path).ok_or_else(|| ApiError::new(404, "not_found", format!("no route for `{path}`")))?;
        if !method.eq_ignore_ascii_case(route.method()) {
            return Err(ApiError::new(405, "method_not_allowed", format!("`{path}` accepts {} only", route.method())));
        }
        let has_body = !body.iter().all(u8::is_ascii_whitespace);
        if route.method() == "POST" && has_body && !is_json(content_type) {
            return Err(ApiError::new(415, "unsupported_media_type", "request bodies must be application/json"));
        }
        match route {
            Route::Sessions => self.create_session(body),
            Route::Session(id) => self.get_session(id),
            Route::Turns(id) => self.turn(id, body),
            Route::Plan(id) => self.plan(id, body),
            Route::Revise(id) => self.revise(id, body),
            Route::Validate => self.validate(body),
            Route::Cities => Ok(Response::json(200, &self.kb.cities().collect::<Vec<_>>())),
            Route::Attractions => self.attractions(query),
            Route::Attraction(id) => self.attraction(id),
        }
    }

    fn persist(&self) -> Result<(), ApiError> {
        self.store.persist().map_err(|e| ApiError::new(500, "storage", e.to_string()))
    }

    fn create_session(&self, body: &[u8]) -> Handled {
        let req: CreateSession = parse_body(body)?;
        if req.persona.is_none() && req.run.is_some() {
            return Err(ApiError::schema("run", "`run` requires a persona"));
        }
        let handle = self.store.create(req.id).map_err(|e| match e {
            CreateError::BadId(id) => ApiError::schema("id", format!("invalid session id `{id}`")),
            CreateError::Taken(id) => ApiError::new(409, "session_exists", format!("session `{id}` already exists")),
        })?;
        let mut session = lock_session(&handle);
        if let Some(mut persona) = req.persona {
            // The session id names the query, so the persona takes it.
            persona.id = session.id.clone();
            let outcome = match req.run.unwrap_or_default() {
                RunMode::Clarify => {
                    let mut sim = UserSimulator::new(persona, req.seed);
                    simulate_to_confirm(&mut session, &mut sim, &self.kb)
                }
                RunMode::Full => simulate_session(&persona, req.seed, &self.kb, self.search).map(|s| *session = s),
            };
            if let Err(e) = outcome {
                let id = session.id.clone();
                drop(session);
                self.store.remove(&id);
                return Err(ApiError::new(422, "simulation", e.to_string()));
            }
        }
        let response = Response::json(201, &SessionEnvelope::of(&session));
        drop(session);
        self.persist()?;
        Ok(response)
    }

    fn get_session(&self, id: &str) -> Handled {
        let handle = self.store.get(id).ok_or_else(|| ApiError::not_found("session", id))?;
        let session = lock_session(&handle);
        Ok(Response::json(200, &SessionEnvelope::of(&session)))
    }

    fn turn(&self, id: &str, body: &[u8]) -> Handled {
        let req: TurnBody = parse_body(body)?;
        let handle = self.store.get(id).ok_or_else(|| ApiError::not_found("session", id))?;
        let mut session = lock_session(&handle);
        let acts = match (req.acts, req.command) {
            (Some(acts), None) => acts,
            (None, Some(line)) => parse_command(&line, &self.kb, &session.slots).map_err(|m| ApiError::schema("command", m))?,
            _ => return Err(ApiError::schema(".", "exactly one of `acts` or `command` is required")),
        };
        session.check_user_turn(&acts)?;
        let text = req.text.unwrap_or_else(|| render_user(&acts));
        session.submit_user(acts, text)?;
        let turn = session.assistant_turn(&self.kb, &PriorityPolicy)?;
        let response = Response::json(200, &TurnReply { turn: &turn, envelope: SessionEnvelope::of(&session) });
        drop(session);
        self.persist()?;
        Ok(response)
    }

    fn plan(&self, id: &str, body: &[u8]) -> Handled {
        let Empty {} = parse_body(body)?;
        let handle = self.store.get(id).ok_or_else(|| ApiError::not_found("session", id))?;
        let mut session = lock_session(&handle);
        let outcome = session.generate(&self.kb, self.search)?;
        drop(session);
        self.persist()?;
        Ok(Response::json(200, &outcome))
    }

    fn revise(&self, id: &str, body: &[u8]) -> Handled {
        let req: RevisionRequest = parse_body(body)?;
        let handle = self.store.get(id).ok_or_else(|| ApiError::not_found("session", id))?;
        let mut session = lock_session(&handle);
        let outcome = session.revise(&req, &self.kb)?;
        drop(session);
        self.persist()?;
        Ok(Response::json(200, &outcome))
    }

    fn validate(&self, body: &[u8]) -> Handled {
        let req: ValidateBody = parse_body(body)?;
        if let Some((path, message)) = req.plan.structural_problems().into_iter().next() {
            return Err(ApiError::schema(format!("plan.{path}"), message));
        }
        Ok(Response::json(200, &evaluate_plan(&req.plan, &req.query.slots, &self.kb)))
    }

    fn attractions(&self, query: &str) -> Handled {
        let mut city = None;
        for (key, value) in form_urlencoded::parse(query.as_bytes()) {
            match key.as_ref() {
                "city" => city = Some(CityId::new(value.into_owned())),
                other => return Err(ApiError::schema(other, format!("unknown query parameter `{other}`"))),
            }
        }
        if let Some(c) = &city {
            if self.kb.city(c).is_none() {
                return Err(ApiError::not_found("city", c.as_str()));
            }
        }
        let list: Vec<AttractionSummary> = self
            .kb
            .pois()
            .filter(|p| city.as_ref().is_none_or(|c| &p.city_id == c))
            .filter_map(|p| {
                let a = p.attraction()?;
                Some(AttractionSummary {
                    id: &p.id,
                    name: &p.name,
                    city_id: &p.city_id,
                    rating: p.rating,
                    avg_cost: p.avg_cost,
                    indoor: p.indoor,
                    must_visit_rank: a.must_visit_rank,
                    categories: &a.categories,
                })
            })
            .collect();
        Ok(Response::json(200, &list))
    }

    fn attraction(&self, id: &str) -> Handled {
        let poi = self
            .kb
            .poi(&PoiId::new(id))
            .filter(|p| p.kind() == PoiKind::Attraction)
            .ok_or_else(|| ApiError::not_found("attraction", id))?;
        let detail = poi.attraction().expect("kind checked");
        let resolve = |list: &[NearbyPoi]| list.iter().filter_map(|n| self.nearby_view(n)).collect::<Vec<_>>();
        let view = AttractionView {
            poi,
            nearby: Nearby { restaurants: resolve(&detail.nearby_restaurants), hotels: resolve(&detail.nearby_hotels) },
        };
        Ok(Response::json(200, &view))
    }

    fn nearby_view<'s>(&'s self, n: &NearbyPoi) -> Option<NearbyView<'s>> {
        let p = self.kb.poi(&n.poi)?;
        Some(NearbyView {
            id: &p.id,
            name: &p.name,
            distance_km: n.distance_km,
            rating: p.rating,
            avg_cost: p.avg_cost,
            cuisine: p.restaurant().map(|r| r.cuisine.as_slice()),
            hotel_type: p.hotel().map(|h| h.hotel_type),
        })
    }
}
