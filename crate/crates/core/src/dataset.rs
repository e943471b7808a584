//! Seeded query corpus with simulated sessions and plans.

use std::collections::BTreeSet;

use rand::seq::{IteratorRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dialogue::{
    make_implicit, sample_hidden, simulate_session, DialogueSession, HotelPref, IntentSlots, Persona,
    RevisionCategory, RevisionRequest, RevisionScript, SimulationError, SlotName, TransportPref, TravelQuery,
};
use crate::kb::{CityId, KnowledgeBase, PoiId, PoiKind};
use crate::money::Money;
use crate::plan::{CostLedger, Plan};
use crate::planner::{generate_plan, revise_plan, PlanError, SearchBudget};
use crate::validator::PlanReport;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DatasetError {
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("knowledge base too small: {0}")]
    KbTooSmall(String),
    #[error("{id}: {source}")]
    Plan { id: String, source: PlanError },
    #[error("{id}: {source}")]
    Simulation { id: String, source: SimulationError },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseType {
    SingleTurn,
    SingleTurnRevision,
    MultiTurn,
    MultiTurnRevision,
}

impl CaseType {
    pub const ALL: [CaseType; 4] =
        [CaseType::SingleTurn, CaseType::SingleTurnRevision, CaseType::MultiTurn, CaseType::MultiTurnRevision];

    pub fn as_str(self) -> &'static str {
        match self {
            CaseType::SingleTurn => "single_turn",
            CaseType::SingleTurnRevision => "single_turn_revision",
            CaseType::MultiTurn => "multi_turn",
            CaseType::MultiTurnRevision => "multi_turn_revision",
        }
    }

    pub fn is_implicit(self) -> bool {
        matches!(self, CaseType::MultiTurn | CaseType::MultiTurnRevision)
    }

    pub fn has_revision(self) -> bool {
        matches!(self, CaseType::SingleTurnRevision | CaseType::MultiTurnRevision)
    }
}

/// Relative weights of the four case types, in [`CaseType::ALL`] order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseMix(pub [u32; 4]);

impl Default for CaseMix {
    /// 3,500 / 2,500 / 2,500 / 1,500 cases in the reference corpus.
    fn default() -> Self {
        CaseMix([35, 25, 25, 15])
    }
}

impl CaseMix {
    /// Build a mix from an implicit share and, independently, a revision
    /// share. Ratios are rounded to thousandths.
    pub fn from_ratios(implicit_ratio: f64, revision_ratio: f64) -> Result<CaseMix, DatasetError> {
        for (name, r) in [("implicit_ratio", implicit_ratio), ("revision_ratio", revision_ratio)] {
            if !(0.0..=1.0).contains(&r) {
                return Err(DatasetError::Argument(format!("{name} must be within [0, 1], got {r}")));
            }
        }
        let i = (implicit_ratio * 1000.0).round() as u32;
        let r = (revision_ratio * 1000.0).round() as u32;
        Ok(CaseMix([(1000 - i) * (1000 - r), (1000 - i) * r, i * (1000 - r), i * r]))
    }

    /// Exact per-type counts for `n` cases: floors first, then the remaining
    /// cases by largest remainder, ties to the earlier type.
    pub fn counts(&self, n: usize) -> Result<[usize; 4], DatasetError> {
        let total: u64 = self.0.iter().map(|&w| u64::from(w)).sum();
        if total == 0 {
            return Err(DatasetError::Argument("case mix has no weight".into()));
        }
        let n64 = n as u64;
        let mut counts = [0usize; 4];
        let mut rems = [0u64; 4];
        for (k, &w) in self.0.iter().enumerate() {
            counts[k] = (n64 * u64::from(w) / total) as usize;
            rems[k] = n64 * u64::from(w) % total;
        }
        let mut order: Vec<usize> = (0..4).collect();
        order.sort_by_key(|&k| (std::cmp::Reverse(rems[k]), k));
        let short = n - counts.iter().sum::<usize>();
        for &k in order.iter().take(short) {
            counts[k] += 1;
        }
        Ok(counts)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetConfig {
    pub n: usize,
    pub mix: CaseMix,
    pub seed: u64,
    pub search: SearchBudget,
}

impl DatasetConfig {
    pub fn new(n: usize, seed: u64) -> Self {
        DatasetConfig { n, mix: CaseMix::default(), seed, search: SearchBudget::default() }
    }
}

/// An explicit query plus the attractions it was built around.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplicitQuery {
    pub query: TravelQuery,
    pub key_attractions: Vec<PoiId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub id: String,
    pub case_type: CaseType,
    /// What the traveller states up front. For explicit entries this equals
    /// the persona's slots.
    pub query: IntentSlots,
    pub implicit: bool,
    pub hidden: Vec<SlotName>,
    pub seed: u64,
    pub persona: Persona,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryCorpus {
    pub entries: Vec<CorpusEntry>,
}

impl QueryCorpus {
    pub fn case_counts(&self) -> [usize; 4] {
        let mut out = [0; 4];
        for e in &self.entries {
            out[CaseType::ALL.iter().position(|&c| c == e.case_type).expect("listed")] += 1;
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub corpus: QueryCorpus,
    /// One finished session per entry, same order.
    pub sessions: Vec<DialogueSession>,
}

impl Dataset {
    pub fn plans(&self) -> impl Iterator<Item = (&str, &Plan, &PlanReport)> {
        self.sessions
            .iter()
            .filter_map(|s| Some((s.id.as_str(), s.plan.as_ref()?, s.report.as_ref()?)))
    }
}

const MAX_DESTINATIONS: usize = 4;
const KEY_RANGE: (usize, usize) = (8, 10);

fn round_up_hundred(m: Money) -> Money {
    Money::from_yuan((m.fen() + 9_999).div_euclid(10_000) * 100)
}

/// Sample one explicit query. The budget is the cost of an unconstrained
/// plan plus a quarter, rounded up to 100 CNY.
pub fn sample_explicit(
    kb: &KnowledgeBase,
    id: impl Into<String>,
    seed: u64,
    search: SearchBudget,
) -> Result<ExplicitQuery, DatasetError> {
    let id = id.into();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cities: Vec<&CityId> = kb.cities().map(|c| &c.id).collect();
    if cities.len() < 3 {
        return Err(DatasetError::KbTooSmall(format!("{} cities, need at least 3", cities.len())));
    }
    let attractions_in = |c: &CityId| kb.pois_in(c, PoiKind::Attraction).count();
    let departure = (*cities.choose(&mut rng).expect("nonempty")).clone();
    let candidates: Vec<&CityId> = cities.iter().copied().filter(|c| **c != departure).collect();
    let n_dest = rng.gen_range(2..=MAX_DESTINATIONS.min(candidates.len()));
    let mut destinations: Vec<CityId> =
        candidates.choose_multiple(&mut rng, n_dest).map(|c| (*c).clone()).collect();
    destinations.sort();
    let pool: Vec<&PoiId> = destinations
        .iter()
        .flat_map(|c| kb.pois_in(c, PoiKind::Attraction).map(|p| &p.id))
        .collect();
    let n_keys = rng.gen_range(KEY_RANGE.0..=KEY_RANGE.1);
    if pool.len() < n_keys {
        let per_city: Vec<String> = destinations.iter().map(|c| format!("{c}={}", attractions_in(c))).collect();
        return Err(DatasetError::KbTooSmall(format!(
            "destinations hold {} attractions ({}), need {n_keys}",
            pool.len(),
            per_city.join(", ")
        )));
    }
    let mut keys: Vec<PoiId> = pool.choose_multiple(&mut rng, n_keys).map(|p| (*p).clone()).collect();
    keys.sort();

    // Required sites: at most one per city, from the key attractions.
    let mut by_city: Vec<(CityId, Vec<&PoiId>)> = destinations
        .iter()
        .map(|c| (c.clone(), keys.iter().filter(|k| kb.poi(k).is_some_and(|p| &p.city_id == c)).collect()))
        .filter(|(_, ks): &(CityId, Vec<&PoiId>)| !ks.is_empty())
        .collect();
    by_city.shuffle(&mut rng);
    let n_required = rng.gen_range(1..=3usize.min(by_city.len()));
    let required: BTreeSet<PoiId> =
        by_city.iter().take(n_required).map(|(_, ks)| (*ks.choose(&mut rng).expect("nonempty")).clone()).collect();
    let others: Vec<&&PoiId> = pool.iter().filter(|p| !keys.contains(p)).collect();
    let n_excluded = rng.gen_range(0..=2usize.min(others.len()));
    let excluded: BTreeSet<PoiId> = others.choose_multiple(&mut rng, n_excluded).map(|p| (**p).clone()).collect();

    let cuisines: BTreeSet<&str> = destinations
        .iter()
        .flat_map(|c| kb.pois_in(c, PoiKind::Restaurant))
        .filter_map(|p| p.restaurant())
        .flat_map(|r| r.cuisine.iter().map(String::as_str))
        .filter(|c| *c != "snack")
        .collect();
    let n_cuisine = rng.gen_range(1..=2usize.min(cuisines.len().max(1)));
    let cuisine: Vec<String> = cuisines.iter().choose_multiple(&mut rng, n_cuisine).into_iter().map(|c| c.to_string()).collect();

    let weather_days: BTreeSet<_> = kb.weather_records().map(|w| w.date).collect();
    let start_date = match weather_days.iter().next() {
        Some(&first) => {
            let span = weather_days.iter().next_back().map_or(0, |&last| (last - first).num_days().max(0));
            first + chrono::Duration::days(rng.gen_range(0..=span.saturating_sub(7).max(0)))
        }
        None => chrono::NaiveDate::from_ymd_opt(2024, 5, 1).expect("valid date"),
    };

    let slots = IntentSlots {
        departure_city: Some(departure),
        num_days: Some((n_dest + rng.gen_range(0..=2)) as u32),
        destination_cities: Some(destinations),
        start_date: Some(start_date),
        party_size: Some(rng.gen_range(1..=4)),
        budget_total: None,
        hotel_type: Some(*[HotelPref::Chain, HotelPref::Upscale, HotelPref::Any].choose(&mut rng).expect("nonempty")),
        cuisine_prefs: Some(cuisine),
        transport_pref: Some(
            *[TransportPref::RailAny, TransportPref::HighSpeedOnly, TransportPref::Any].choose(&mut rng).expect("nonempty"),
        ),
        required_sites: Some(required.into_iter().collect()),
        excluded_sites: Some(excluded.into_iter().collect()),
        pace: Some(rng.gen_range(2..=3)),
    };
    let mut query = TravelQuery { id: id.clone(), slots };
    let baseline = generate_plan(&query, kb, search).map_err(|source| DatasetError::Plan { id: id.clone(), source })?;
    let cost = CostLedger::of(&baseline.plan).total;
    query.slots.budget_total = Some(round_up_hundred(cost.scaled(5, 4)));
    Ok(ExplicitQuery { query, key_attractions: keys })
}

fn scripted(script: &RevisionScript) -> RevisionRequest {
    match script.category {
        RevisionCategory::Dining => RevisionRequest::dining(script.day),
        RevisionCategory::Transportation => RevisionRequest::transportation(script.day),
        RevisionCategory::Weather => RevisionRequest::weather(script.day),
        RevisionCategory::Budget => RevisionRequest::budget(script.budget_cap.unwrap_or(Money::ZERO)),
    }
}

/// A revision the plan accepts, found by trying candidates in a seeded
/// order. Falls back to the first candidate when none succeeds, so the
/// session still records a refused request.
fn pick_revision(plan: &Plan, slots: &IntentSlots, kb: &KnowledgeBase, rng: &mut ChaCha8Rng) -> Option<RevisionScript> {
    let mut categories = RevisionCategory::ALL.to_vec();
    categories.shuffle(rng);
    let mut candidates = Vec::new();
    for category in categories {
        if category == RevisionCategory::Budget {
            let cap = CostLedger::of(plan).total.scaled(19, 20);
            candidates.push(RevisionScript { category, day: 0, budget_cap: Some(cap) });
            continue;
        }
        let mut days: Vec<usize> = (0..plan.days.len()).collect();
        days.shuffle(rng);
        for day in days {
            let script = RevisionScript { category, day, budget_cap: None };
            if scripted(&script).resolve(plan, kb).is_ok_and(|r| r.is_some()) {
                candidates.push(script);
            }
        }
    }
    candidates
        .iter()
        .find(|c| revise_plan(plan, &scripted(c), slots, kb).is_ok())
        .or(candidates.first())
        .cloned()
}

fn persona_for(explicit: &ExplicitQuery, stated: &IntentSlots) -> Persona {
    Persona {
        id: explicit.query.id.clone(),
        slots: explicit.query.slots.clone(),
        reveal_order: stated.filled().into_iter().collect(),
        preferences: explicit.key_attractions.clone(),
        revision_script: Vec::new(),
    }
}

fn case_plan(n: usize, mix: &CaseMix, rng: &mut ChaCha8Rng) -> Result<Vec<CaseType>, DatasetError> {
    let counts = mix.counts(n)?;
    let mut cases: Vec<CaseType> =
        CaseType::ALL.iter().zip(counts).flat_map(|(&c, k)| std::iter::repeat_n(c, k)).collect();
    cases.shuffle(rng);
    Ok(cases)
}

/// Generate `cfg.n` entries. Each entry gets its own seed drawn from the
/// corpus seed, so any entry can be regenerated alone.
pub fn dataset_gen(kb: &KnowledgeBase, cfg: &DatasetConfig) -> Result<Dataset, DatasetError> {
    if cfg.n == 0 {
        return Err(DatasetError::Argument("n must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let cases = case_plan(cfg.n, &cfg.mix, &mut rng)?;
    let mut entries = Vec::with_capacity(cfg.n);
    let mut sessions = Vec::with_capacity(cfg.n);
    for (k, case_type) in cases.into_iter().enumerate() {
        let seed: u64 = rng.gen();
        let id = format!("q{:05}", k + 1);
        let (entry, session) = generate_entry(kb, &id, case_type, seed, cfg.search)?;
        entries.push(entry);
        sessions.push(session);
    }
    Ok(Dataset { corpus: QueryCorpus { entries }, sessions })
}

/// One corpus entry and its finished session.
pub fn generate_entry(
    kb: &KnowledgeBase,
    id: &str,
    case_type: CaseType,
    seed: u64,
    search: SearchBudget,
) -> Result<(CorpusEntry, DialogueSession), DatasetError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let explicit = sample_explicit(kb, id, rng.gen(), search)?;
    let (stated, hidden) = if case_type.is_implicit() {
        let hidden = sample_hidden(rng.gen());
        let stated = make_implicit(&explicit.query.slots, &hidden).map_err(|e| DatasetError::Argument(e.to_string()))?;
        (stated, hidden.into_iter().collect())
    } else {
        (explicit.query.slots.clone(), Vec::new())
    };
    let mut persona = persona_for(&explicit, &stated);
    if case_type.has_revision() {
        let plan = generate_plan(&explicit.query, kb, search)
            .map_err(|source| DatasetError::Plan { id: id.to_string(), source })?
            .plan;
        persona.revision_script.extend(pick_revision(&plan, &explicit.query.slots, kb, &mut rng));
    }
    let session_seed: u64 = rng.gen();
    let session = simulate_session(&persona, session_seed, kb, search)
        .map_err(|source| DatasetError::Simulation { id: id.to_string(), source })?;
    let entry = CorpusEntry {
        id: id.to_string(),
        case_type,
        implicit: case_type.is_implicit(),
        query: stated,
        hidden,
        seed: session_seed,
        persona,
    };
    Ok((entry, session))
}
