use super::Plan;
use crate::canonical;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{}", self.render())]
pub struct PlanParseError {
    /// Byte offset of the failure in the input; `None` for whole-plan
    /// problems detected after decoding.
    pub offset: Option<usize>,
    pub path: String,
    pub message: String,
}

impl PlanParseError {
    fn render(&self) -> String {
        match self.offset {
            Some(o) => format!("at byte {o}, field `{}`: {}", self.path, self.message),
            None => format!("field `{}`: {}", self.path, self.message),
        }
    }
}

/// Canonical bytes: sorted keys, two-space indent, trailing newline.
pub fn serialize_plan(plan: &Plan) -> Vec<u8> {
    canonical::to_pretty(plan)
}

/// Decode and structurally check a plan. Never returns a partial plan.
pub fn parse_plan(bytes: &[u8]) -> Result<Plan, PlanParseError> {
    let mut de = serde_json::Deserializer::from_slice(bytes);
    let plan: Plan = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        PlanParseError {
            offset: Some(canonical::byte_offset(bytes, inner.line(), inner.column())),
            path,
            message: inner.to_string(),
        }
    })?;
    de.end().map_err(|e| PlanParseError {
        offset: Some(canonical::byte_offset(bytes, e.line(), e.column())),
        path: ".".to_string(),
        message: e.to_string(),
    })?;
    if let Some((path, message)) = plan.structural_problems().into_iter().next() {
        return Err(PlanParseError { offset: None, path, message });
    }
    Ok(plan)
}

