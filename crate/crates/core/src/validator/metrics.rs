use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Category, ConstraintId, PlanReport};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricsError {
    #[error("no reports to aggregate")]
    Empty,
    #[error("correlation needs at least 2 reports, got {0}")]
    TooFew(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Tally {
    pub passed: usize,
    pub total: usize,
}

impl Tally {
    pub fn rate(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.passed as f64 / self.total as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryRates {
    /// Passed checks over all checks.
    pub micro: f64,
    /// Plans passing every check in the category over all plans.
    pub macro_: f64,
    pub checks: Tally,
    pub plans: Tally,
}

impl CategoryRates {
    fn new(checks: Tally, plans: Tally) -> Self {
        CategoryRates { micro: checks.rate(), macro_: plans.rate(), checks, plans }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub plans: usize,
    pub commonsense: CategoryRates,
    pub preference: CategoryRates,
    pub final_pr: f64,
    pub final_pass: Tally,
    pub per_constraint: BTreeMap<ConstraintId, Tally>,
    /// Items dropped before evaluation, e.g. a plan without a matching query.
    pub skipped: usize,
}

impl BenchmarkReport {
    pub fn category(&self, category: Category) -> &CategoryRates {
        match category {
            Category::Commonsense => &self.commonsense,
            Category::Preference => &self.preference,
        }
    }
}

pub fn aggregate(reports: &[PlanReport]) -> Result<BenchmarkReport, MetricsError> {
    if reports.is_empty() {
        return Err(MetricsError::Empty);
    }
    let n = reports.len();
    let mut per_constraint: BTreeMap<ConstraintId, Tally> = BTreeMap::new();
    for r in reports {
        for res in &r.results {
            let t = per_constraint.entry(res.id).or_default();
            t.total += 1;
            t.passed += usize::from(res.passed);
        }
    }
    let rates = |cat: Category| {
        let mut checks = Tally::default();
        for (id, t) in &per_constraint {
            if id.category() == cat {
                checks.passed += t.passed;
                checks.total += t.total;
            }
        }
        let plans = Tally { passed: reports.iter().filter(|r| r.category_pass(cat)).count(), total: n };
        CategoryRates::new(checks, plans)
    };
    let final_pass = Tally { passed: reports.iter().filter(|r| r.final_pass).count(), total: n };
    Ok(BenchmarkReport {
        plans: n,
        commonsense: rates(Category::Commonsense),
        preference: rates(Category::Preference),
        final_pr: final_pass.rate(),
        final_pass,
        per_constraint,
        skipped: 0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Correlation {
    Defined { r: f64 },
    Undefined { reason: String },
}

impl Correlation {
    pub fn value(&self) -> Option<f64> {
        match self {
            Correlation::Defined { r } => Some(*r),
            Correlation::Undefined { .. } => None,
        }
    }
}

/// Pearson coefficient of two 0/1 indicator vectors. Sums are exact integers,
/// so identical and complementary vectors yield exactly 1 and -1.
pub fn pearson(x: &[bool], y: &[bool]) -> Correlation {
    assert_eq!(x.len(), y.len(), "indicator vectors differ in length");
    let n = x.len() as i128;
    let sx = x.iter().filter(|v| **v).count() as i128;
    let sy = y.iter().filter(|v| **v).count() as i128;
    let sxy = x.iter().zip(y).filter(|(a, b)| **a && **b).count() as i128;
    // For indicators, sum of squares equals the sum.
    let vx = n * sx - sx * sx;
    let vy = n * sy - sy * sy;
    if vx == 0 {
        return Correlation::Undefined { reason: "constraint indicator is constant".into() };
    }
    if vy == 0 {
        return Correlation::Undefined { reason: "final-pass indicator is constant".into() };
    }
    let num = n * sxy - sx * sy;
    let r = num as f64 / ((vx as f64) * (vy as f64)).sqrt();
    Correlation::Defined { r: r.clamp(-1.0, 1.0) }
}

/// Per-constraint Pearson r between passing that constraint and passing overall.
pub fn correlate(reports: &[PlanReport]) -> Result<BTreeMap<ConstraintId, Correlation>, MetricsError> {
    if reports.len() < 2 {
        return Err(MetricsError::TooFew(reports.len()));
    }
    let y: Vec<bool> = reports.iter().map(|r| r.final_pass).collect();
    Ok(ConstraintId::ALL
        .into_iter()
        .map(|id| {
            let x: Vec<bool> = reports.iter().map(|r| r.passed(id)).collect();
            (id, pearson(&x, &y))
        })
        .collect())
}
