//! The checked-in worked example: an implicit query, the clarification
//! transcript, the first plan, one dining revision and both reports.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use itinera_core::canonical::to_pretty;
use itinera_core::dialogue::{
    make_implicit, simulate_session, Persona, RevisionCategory, RevisionScript, Role, SlotName, TransportPref,
    TravelQuery,
};
use itinera_core::plan::serialize_plan;
use itinera_core::planner::{generate_plan, SearchBudget};
use serde_json::json;

use super::{all_pass_fixture, mini_kb};

pub const SEED: u64 = 20240403;

pub fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

/// Every artifact of the worked example, keyed by file name.
pub fn worked_example() -> BTreeMap<&'static str, Vec<u8>> {
    let kb = mini_kb();
    let (_, fixture) = all_pass_fixture();
    let mut explicit = fixture.slots.clone();
    explicit.cuisine_prefs = Some(vec!["shanghainese".into()]);
    explicit.pace = Some(2);
    explicit.transport_pref = Some(TransportPref::HighSpeedOnly);

    let hidden = BTreeSet::from([SlotName::BudgetTotal, SlotName::HotelType, SlotName::ExcludedSites]);
    let implicit = make_implicit(&explicit, &hidden).expect("departure stays visible");
    let persona = Persona {
        id: "golden".into(),
        slots: explicit.clone(),
        reveal_order: implicit.filled().into_iter().collect(),
        preferences: explicit.required().into_iter().collect(),
        revision_script: vec![RevisionScript { category: RevisionCategory::Dining, day: 1, budget_cap: None }],
    };
    let session = simulate_session(&persona, SEED, &kb, SearchBudget::default()).expect("golden session completes");
    let first = generate_plan(&TravelQuery { id: "golden".into(), slots: explicit.clone() }, &kb, SearchBudget::default())
        .expect("golden query is plannable");
    let revised = session.plan.as_ref().expect("plan generated");
    let revised_report = session.report.as_ref().expect("plan evaluated");

    let transcript: String = session
        .history
        .iter()
        .map(|t| format!("{}: {}\n", if t.role == Role::User { "user" } else { "assistant" }, t.text))
        .collect();

    let mut files = BTreeMap::new();
    files.insert("query.json", to_pretty(&json!({ "explicit": explicit, "implicit": implicit, "hidden": hidden })));
    files.insert("transcript.json", to_pretty(&session.history));
    files.insert("transcript.txt", transcript.into_bytes());
    files.insert("plan.json", serialize_plan(&first.plan));
    files.insert("revised_plan.json", serialize_plan(revised));
    files.insert(
        "reports.json",
        to_pretty(&json!({ "plan": first.report, "revised_plan": revised_report, "revisions": session.revisions })),
    );
    files
}

/// Compare with the checked-in files, or rewrite them when `UPDATE_GOLDEN=1`.
/// Returns the names of files that differ.
pub fn check_golden() -> Vec<String> {
    let dir = golden_dir();
    let files = worked_example();
    if std::env::var("UPDATE_GOLDEN").as_deref() == Ok("1") {
        std::fs::create_dir_all(&dir).expect("golden dir");
        for (name, bytes) in &files {
            std::fs::write(dir.join(name), bytes).expect("write golden file");
        }
        return Vec::new();
    }
    files
        .iter()
        .filter(|(name, bytes)| std::fs::read(dir.join(name)).ok().as_deref() != Some(bytes.as_slice()))
        .map(|(name, _)| name.to_string())
        .collect()
}
