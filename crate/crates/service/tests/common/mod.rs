#![allow(dead_code)]

use std::path::PathBuf;

use itinera_core::dialogue::{Persona, SlotName, TravelQuery};
use itinera_core::kb::{load_kb_dir, KnowledgeBase};
use itinera_service::Api;
use serde_json::{json, Value};

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures")
}

pub fn mini_kb_dir() -> PathBuf {
    fixtures().join("mini_kb")
}

pub fn mini_kb() -> KnowledgeBase {
    load_kb_dir(&mini_kb_dir()).expect("mini fixture loads").0
}

pub fn appendix_kb() -> KnowledgeBase {
    load_kb_dir(&fixtures().join("appendix_kb")).expect("appendix fixture loads").0
}

pub fn all_pass_plan() -> Value {
    serde_json::from_slice(&std::fs::read(fixtures().join("plans/all_pass.json")).unwrap()).unwrap()
}

pub fn all_pass_query() -> Value {
    serde_json::from_slice(&std::fs::read(fixtures().join("plans/all_pass_query.json")).unwrap()).unwrap()
}

/// The all-pass fixture query with every slot filled.
pub fn full_query(id: &str) -> TravelQuery {
    let mut q = all_pass_query();
    q["id"] = json!(id);
    q["slots"]["cuisine_prefs"] = json!(["shanghainese"]);
    q["slots"]["pace"] = json!(2);
    q["slots"]["transport_pref"] = json!("high_speed_only");
    serde_json::from_value(q).unwrap()
}

/// Traveller who states everything up front except `hidden`.
pub fn persona(hidden: &[SlotName], revisions: Value) -> Persona {
    let q = full_query("p");
    Persona {
        id: "p".into(),
        slots: q.slots,
        reveal_order: SlotName::ALL.iter().copied().filter(|s| !hidden.contains(s)).collect(),
        preferences: vec![],
        revision_script: serde_json::from_value(revisions).unwrap(),
    }
}

pub struct Reply {
    pub status: u16,
    pub body: String,
}

impl Reply {
    pub fn json(&self) -> Value {
        serde_json::from_str(&self.body).unwrap_or_else(|e| panic!("{e}: {}", self.body))
    }

    pub fn error_code(&self) -> String {
        self.json()["error"]["code"].as_str().unwrap_or_default().to_string()
    }
}

pub fn get(api: &Api, target: &str) -> Reply {
    let r = api.dispatch("GET", target, None, b"");
    Reply { status: r.status, body: r.body }
}

pub fn post(api: &Api, target: &str, body: &Value) -> Reply {
    post_raw(api, target, body.to_string().as_bytes())
}

pub fn post_raw(api: &Api, target: &str, body: &[u8]) -> Reply {
    let r = api.dispatch("POST", target, Some("application/json"), body);
    Reply { status: r.status, body: r.body }
}
