//! Corpus evaluation: match plans to queries, validate, aggregate, correlate.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::dialogue::TravelQuery;
use crate::kb::KnowledgeBase;
use crate::plan::Plan;
use crate::validator::{
    aggregate, correlate, evaluate_plan, BenchmarkReport, ConstraintId, Correlation, PlanReport,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BenchError {
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("no plan could be matched to a query ({0} skipped)")]
    NothingEvaluated(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Skipped {
    pub id: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRun {
    pub report: BenchmarkReport,
    pub correlations: BTreeMap<ConstraintId, Correlation>,
    /// Per-plan reports keyed by query id.
    pub plans: BTreeMap<String, PlanReport>,
    pub skipped: Vec<Skipped>,
}

/// Evaluate every plan against the query with the same id. Plans without a
/// query, queries without a plan and duplicate plans are skipped and counted.
pub fn bench_run(queries: &[TravelQuery], plans: &[Plan], kb: &KnowledgeBase) -> Result<BenchRun, BenchError> {
    if queries.is_empty() && plans.is_empty() {
        return Err(BenchError::EmptyCorpus);
    }
    let mut skipped = Vec::new();
    let mut by_id: BTreeMap<&str, &TravelQuery> = BTreeMap::new();
    for q in queries {
        if by_id.insert(q.id.as_str(), q).is_some() {
            skipped.push(Skipped { id: q.id.clone(), reason: "duplicate query id".into() });
        }
    }
    let mut matched: BTreeMap<&str, (&TravelQuery, &Plan)> = BTreeMap::new();
    for p in plans {
        match by_id.get(p.query_id.as_str()) {
            None => skipped.push(Skipped { id: p.query_id.clone(), reason: "no query with this id".into() }),
            Some(q) => {
                if matched.insert(q.id.as_str(), (q, p)).is_some() {
                    skipped.push(Skipped { id: p.query_id.clone(), reason: "more than one plan for this query".into() });
                }
            }
        }
    }
    for id in by_id.keys() {
        if !matched.contains_key(id) {
            skipped.push(Skipped { id: id.to_string(), reason: "no plan for this query".into() });
        }
    }
    let reports: BTreeMap<String, PlanReport> =
        matched.into_iter().map(|(id, (q, p))| (id.to_string(), evaluate_plan(p, &q.slots, kb))).collect();
    let list: Vec<PlanReport> = reports.values().cloned().collect();
    let mut report = aggregate(&list).map_err(|_| BenchError::NothingEvaluated(skipped.len()))?;
    report.skipped = skipped.len();
    let correlations = correlate(&list).unwrap_or_else(|e| {
        ConstraintId::ALL.into_iter().map(|id| (id, Correlation::Undefined { reason: e.to_string() })).collect()
    });
    Ok(BenchRun { report, correlations, plans: reports, skipped })
}

fn pct(rate: f64) -> String {
    format!("{:.2}", rate * 100.0)
}

impl BenchRun {
    /// Plain-text summary: headline pass rates, then one row per constraint.
    pub fn table(&self) -> String {
        let r = &self.report;
        let mut out = String::new();
        let _ = writeln!(out, "plans evaluated: {}  skipped: {}", r.plans, r.skipped);
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "{:>18} {:>18} {:>18} {:>18} {:>12}",
            "Commonsense Micro", "Commonsense Macro", "Preference Micro", "Preference Macro", "Final Pass"
        );
        let _ = writeln!(
            out,
            "{:>18} {:>18} {:>18} {:>18} {:>12}",
            pct(r.commonsense.micro),
            pct(r.commonsense.macro_),
            pct(r.preference.micro),
            pct(r.preference.macro_),
            pct(r.final_pr)
        );
        let _ = writeln!(out);
        let _ = writeln!(out, "{:<22} {:>10} {:>10} {:>10}", "constraint", "passed", "rate %", "pearson r");
        for id in ConstraintId::ALL {
            let tally = r.per_constraint.get(&id).copied().unwrap_or_default();
            let corr = self.correlations.get(&id).and_then(Correlation::value).map_or("n/a".to_string(), |v| format!("{v:.3}"));
            let _ = writeln!(
                out,
                "{:<22} {:>10} {:>10} {:>10}",
                id.label(),
                format!("{}/{}", tally.passed, tally.total),
                pct(tally.rate()),
                corr
            );
        }
        for s in &self.skipped {
            let _ = writeln!(out, "skipped {}: {}", s.id, s.reason);
        }
        out
    }

    /// `constraint,pass_rate,pearson_r`; undefined correlations are left empty.
    pub fn csv(&self) -> String {
        let mut out = String::from("constraint,pass_rate,pearson_r\n");
        for id in ConstraintId::ALL {
            let rate = self.report.per_constraint.get(&id).copied().unwrap_or_default().rate();
            let corr = self.correlations.get(&id).and_then(Correlation::value).map_or(String::new(), |v| format!("{v:.6}"));
            let _ = writeln!(out, "{},{rate:.6},{corr}", id.as_str());
        }
        out
    }
}
