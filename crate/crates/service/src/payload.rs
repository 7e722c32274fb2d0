//! Request handling shared by the HTTP endpoints and the command-line
//! front-end, so both produce identical JSON for the same input.

use std::collections::BTreeMap;

use autofill_core::filling::suggest_additional;
use autofill_core::form::{autofill, suggest, FieldValue, FillError, FillReport, FormSpec};
use autofill_core::{closure, closure_with, GraphDoc, Mode, VertexId, VertexSet};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCode {
    UnknownField,
    TypeError,
    ParseError,
    /// A replacement rule failed on otherwise valid input.
    Internal,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Error)]
#[error("{message}")]
pub struct ApiError {
    pub code: ErrorCode,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<VertexId>,
}

impl ApiError {
    pub fn new(code: ErrorCode, message: impl Into<String>, field: Option<VertexId>) -> Self {
        ApiError { code, message: message.into(), field }
    }

    pub fn parse(message: impl Into<String>) -> Self {
        ApiError::new(ErrorCode::ParseError, message, None)
    }

    pub fn unknown_field(id: &VertexId) -> Self {
        ApiError::new(ErrorCode::UnknownField, format!("unknown field `{id}`"), Some(id.clone()))
    }
}

impl From<FillError> for ApiError {
    fn from(err: FillError) -> Self {
        let code = match err {
            FillError::UnknownField(_) => ErrorCode::UnknownField,
            FillError::TypeError { .. } => ErrorCode::TypeError,
            FillError::Eval { .. } | FillError::Result { .. } => ErrorCode::Internal,
        };
        ApiError::new(code, err.to_string(), Some(err.field().clone()))
    }
}

/// Pretty-printed JSON, the single rendering used for every payload.
pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("payload types serialize infallibly")
}

#[derive(Clone, Debug, Serialize)]
pub struct SchemaPayload {
    pub spec: serde_json::Value,
    pub graph: GraphDoc,
    pub mandatory: VertexSet,
}

pub fn schema_payload(spec: &FormSpec) -> SchemaPayload {
    SchemaPayload {
        spec: spec.to_json(),
        graph: spec.induced_graph().to_doc(),
        mandatory: spec.mandatory(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckPayload {
    pub filling: bool,
    pub stages: Vec<VertexSet>,
    pub suggestions: VertexSet,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckRequest {
    #[serde(default)]
    pub provided: Vec<VertexId>,
    #[serde(default)]
    pub mode: Option<Mode>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FillRequest {
    #[serde(default)]
    pub values: BTreeMap<VertexId, serde_json::Value>,
}

fn known_set(spec: &FormSpec, ids: &[VertexId]) -> Result<VertexSet, ApiError> {
    ids.iter()
        .map(|id| {
            if spec.field(id).is_some() {
                Ok(id.clone())
            } else {
                Err(ApiError::unknown_field(id))
            }
        })
        .collect()
}

/// Closure stages and suggestions for `provided`. Without an explicit mode
/// every rule keeps the mode the spec gives it.
pub fn check(spec: &FormSpec, provided: &[VertexId], mode: Option<Mode>) -> Result<CheckPayload, ApiError> {
    let provided = known_set(spec, provided)?;
    let g = spec.induced_graph();
    let (trace, suggestions) = match mode {
        Some(mode) => (
            closure(&g, &provided, mode).expect("ids were validated"),
            suggest_additional(&g, &provided, mode).expect("ids were validated"),
        ),
        None => (
            closure_with(&g, &provided, |v| spec.mode_of(v)).expect("ids were validated"),
            suggest(spec, &provided).expect("ids were validated"),
        ),
    };
    Ok(CheckPayload {
        filling: trace.filled,
        stages: trace.stages,
        suggestions,
    })
}

/// Autofill from JSON values, as posted to the fill endpoint.
pub fn fill_json(spec: &FormSpec, values: &BTreeMap<VertexId, serde_json::Value>) -> Result<FillReport, ApiError> {
    let mut input = BTreeMap::new();
    for (id, raw) in values {
        let decl = spec.field(id).ok_or_else(|| ApiError::unknown_field(id))?;
        let value = decl
            .value_from_json(raw)
            .map_err(|m| ApiError::new(ErrorCode::TypeError, format!("invalid value for `{id}`: {m}"), Some(id.clone())))?;
        input.insert(id.clone(), value);
    }
    Ok(autofill(spec, &input)?)
}

/// Autofill from `(id, text)` pairs, as given on the command line. An id may
/// appear at most once.
pub fn fill_text(spec: &FormSpec, values: &[(VertexId, String)]) -> Result<FillReport, ApiError> {
    let mut input: BTreeMap<VertexId, FieldValue> = BTreeMap::new();
    for (id, text) in values {
        let decl = spec.field(id).ok_or_else(|| ApiError::unknown_field(id))?;
        let value = decl
            .parse_value(text)
            .map_err(|m| ApiError::new(ErrorCode::TypeError, format!("invalid value for `{id}`: {m}"), Some(id.clone())))?;
        if input.insert(id.clone(), value).is_some() {
            return Err(ApiError::new(
                ErrorCode::ParseError,
                format!("field `{id}` given more than once"),
                Some(id.clone()),
            ));
        }
    }
    Ok(autofill(spec, &input)?)
}
