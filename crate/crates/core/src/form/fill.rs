//! Runtime autofill of partial records.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use super::expr::EvalError;
use super::spec::{FieldValue, FormSpec};
use crate::filling::{self, AnalysisReport, FillingError, Mode, EXACT_SEARCH_LIMIT};
use crate::graph::{VertexId, VertexSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    User,
    Derived,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FilledValue {
    pub value: FieldValue,
    pub origin: Origin,
}

/// One rule application.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    pub target: VertexId,
    pub stage: usize,
    pub mode: Mode,
    /// Rule arguments that had values when the rule fired.
    pub available: Vec<VertexId>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FillStatus {
    Filled,
    Incomplete,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FillReport {
    pub values: BTreeMap<VertexId, FilledValue>,
    pub trace: Vec<TraceEntry>,
    pub status: FillStatus,
    pub missing: VertexSet,
    pub suggestions: VertexSet,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FillError {
    #[error("unknown field `{0}`")]
    UnknownField(VertexId),
    #[error("invalid value for `{field}`: {message}")]
    TypeError { field: VertexId, message: String },
    #[error("rule for `{target}` failed: {error}")]
    Eval { target: VertexId, error: EvalError },
    #[error("rule for `{target}` produced an unusable value: {message}")]
    Result { target: VertexId, message: String },
}

impl FillError {
    pub fn field(&self) -> &VertexId {
        match self {
            FillError::UnknownField(f) => f,
            FillError::TypeError { field, .. } => field,
            FillError::Eval { target, .. } | FillError::Result { target, .. } => target,
        }
    }
}

/// Fills every field reachable from `input` through the replacement rules.
///
/// Evaluation proceeds in stages. In each stage every still-empty field
/// whose rule is applicable (complete: all arguments known; partial: at
/// least one known) is computed from the values known at the end of the
/// previous stage, so results do not depend on rule order. Known values are
/// never replaced.
pub fn autofill(spec: &FormSpec, input: &BTreeMap<VertexId, FieldValue>) -> Result<FillReport, FillError> {
    let mut values: BTreeMap<VertexId, FieldValue> = BTreeMap::new();
    for (id, v) in input {
        let decl = spec.field(id).ok_or_else(|| FillError::UnknownField(id.clone()))?;
        let v = decl
            .check(v)
            .map_err(|message| FillError::TypeError { field: id.clone(), message })?;
        values.insert(id.clone(), v);
    }

    let mut rules: Vec<_> = spec.rules.iter().collect();
    rules.sort_by(|a, b| a.target.cmp(&b.target));

    let mut trace = Vec::new();
    let mut stage = 0;
    loop {
        stage += 1;
        let mut derived = Vec::new();
        for rule in &rules {
            if values.contains_key(&rule.target) {
                continue;
            }
            let available: Vec<VertexId> = rule.args.iter().filter(|a| values.contains_key(*a)).cloned().collect();
            let applicable = match rule.mode {
                Mode::Complete => available.len() == rule.args.len(),
                Mode::Partial => !available.is_empty(),
            };
            if !applicable {
                continue;
            }
            let env = spec.rule_env(rule, &values);
            let raw = rule.expr.eval(&env).map_err(|error| FillError::Eval {
                target: rule.target.clone(),
                error,
            })?;
            let decl = spec.field(&rule.target).expect("rule target is declared");
            let value = decl.from_scalar(raw).map_err(|message| FillError::Result {
                target: rule.target.clone(),
                message,
            })?;
            derived.push((rule.target.clone(), value));
            trace.push(TraceEntry {
                target: rule.target.clone(),
                stage,
                mode: rule.mode,
                available,
            });
        }
        if derived.is_empty() {
            break;
        }
        values.extend(derived);
    }

    let missing: VertexSet = spec
        .fields
        .iter()
        .filter(|f| !values.contains_key(&f.id))
        .map(|f| f.id.clone())
        .collect();
    let provided: VertexSet = input.keys().cloned().collect();
    let suggestions = if missing.is_empty() {
        VertexSet::new()
    } else {
        suggest(spec, &provided).expect("input ids were validated")
    };
    let values = values
        .into_iter()
        .map(|(id, value)| {
            let origin = if input.contains_key(&id) { Origin::User } else { Origin::Derived };
            (id, FilledValue { value, origin })
        })
        .collect();

    Ok(FillReport {
        values,
        trace,
        status: if missing.is_empty() { FillStatus::Filled } else { FillStatus::Incomplete },
        missing,
        suggestions,
    })
}

/// Additional fields to ask for, under the spec's own rule modes.
pub fn suggest(spec: &FormSpec, provided: &VertexSet) -> Result<VertexSet, crate::graph::GraphError> {
    let g = spec.induced_graph();
    match spec.uniform_mode() {
        Some(mode) => filling::suggest_additional(&g, provided, mode),
        None => filling::suggest_additional_with(&g, provided, |v| spec.mode_of(v)),
    }
}

/// Graph analysis of a spec plus spec-level facts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpecReport {
    pub name: String,
    pub mandatory: VertexSet,
    /// `complete`, `partial`, or `mixed`.
    pub rule_mode: String,
    #[serde(flatten)]
    pub analysis: AnalysisReport,
    /// True when the spec has partial-mode rules and picking one field per
    /// source component needs fewer inputs than the greedy complete-mode set.
    pub partial_rules_reduce_inputs: bool,
}

/// Analyzes the spec's induced graph. Exact minimal filling sets are
/// included when `exact` is set; graphs over the search limit then fail.
pub fn validate_spec_consistency(spec: &FormSpec, exact: bool) -> Result<SpecReport, FillingError> {
    let g = spec.induced_graph();
    let analysis = filling::analyze(&g, exact)?;
    let has_partial = spec.rules.iter().any(|r| r.mode == Mode::Partial);
    Ok(SpecReport {
        name: spec.name.clone(),
        mandatory: spec.mandatory(),
        rule_mode: spec.uniform_mode().map_or("mixed", Mode::as_str).to_owned(),
        partial_rules_reduce_inputs: has_partial
            && analysis.min_p_filling_cardinality < analysis.greedy_min_filling.len(),
        analysis,
    })
}

/// Same as [`validate_spec_consistency`] with exact search whenever the
/// form is small enough for it.
pub fn spec_report(spec: &FormSpec) -> SpecReport {
    validate_spec_consistency(spec, spec.fields.len() <= EXACT_SEARCH_LIMIT)
        .expect("exact search only requested within the limit")
}
