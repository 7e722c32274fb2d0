//! Form specifications: field declarations plus replacement rules.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::expr::Expr;
use crate::filling::Mode;
use crate::graph::{DepGraph, VertexId, VertexSet};

/// Tolerance for accepting a computed double as an integer.
pub const INTEGER_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub enum FieldKind {
    Number { min: Option<f64>, max: Option<f64> },
    Integer { min: Option<f64>, max: Option<f64> },
    /// Symbolic values. Inside expressions a symbol stands for its
    /// zero-based position in `values`.
    Enum { values: Vec<String> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct FieldDecl {
    pub id: VertexId,
    pub label: String,
    pub kind: FieldKind,
}

/// A typed field value.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum FieldValue {
    Integer(i64),
    Number(f64),
    Symbol(String),
}

impl std::fmt::Display for FieldValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FieldValue::Integer(v) => write!(f, "{v}"),
            FieldValue::Number(v) => write!(f, "{v}"),
            FieldValue::Symbol(s) => f.write_str(s),
        }
    }
}

impl FieldDecl {
    fn check_range(&self, v: f64, min: Option<f64>, max: Option<f64>) -> Result<(), String> {
        if min.is_some_and(|m| v < m) || max.is_some_and(|m| v > m) {
            let lo = min.map_or("-inf".to_owned(), |m| m.to_string());
            let hi = max.map_or("inf".to_owned(), |m| m.to_string());
            return Err(format!("{v} is outside [{lo}, {hi}]"));
        }
        Ok(())
    }

    /// Type- and range-checks a user-supplied value, normalizing numbers
    /// to the field's kind.
    pub fn check(&self, value: &FieldValue) -> Result<FieldValue, String> {
        match (&self.kind, value) {
            (FieldKind::Integer { min, max }, FieldValue::Integer(v)) => {
                self.check_range(*v as f64, *min, *max)?;
                Ok(FieldValue::Integer(*v))
            }
            (FieldKind::Integer { .. }, FieldValue::Number(v)) => {
                if v.fract() != 0.0 || !v.is_finite() {
                    return Err(format!("{v} is not an integer"));
                }
                self.check(&FieldValue::Integer(*v as i64))
            }
            (FieldKind::Number { min, max }, FieldValue::Integer(v)) => {
                self.check_range(*v as f64, *min, *max)?;
                Ok(FieldValue::Number(*v as f64))
            }
            (FieldKind::Number { min, max }, FieldValue::Number(v)) => {
                if !v.is_finite() {
                    return Err(format!("{v} is not a finite number"));
                }
                self.check_range(*v, *min, *max)?;
                Ok(FieldValue::Number(*v))
            }
            (FieldKind::Enum { values }, FieldValue::Symbol(s)) => {
                if values.contains(s) {
                    Ok(FieldValue::Symbol(s.clone()))
                } else {
                    Err(format!("`{s}` is not one of {}", values.join(", ")))
                }
            }
            (FieldKind::Enum { .. }, v) => self.check(&FieldValue::Symbol(v.to_string())),
            (_, FieldValue::Symbol(s)) => Err(format!("`{s}` is not a number")),
        }
    }

    /// Parses a value from its textual form (e.g. a command-line argument).
    pub fn parse_value(&self, text: &str) -> Result<FieldValue, String> {
        let text = text.trim();
        let raw = match self.kind {
            FieldKind::Enum { .. } => FieldValue::Symbol(text.to_owned()),
            FieldKind::Integer { .. } => match text.parse::<i64>() {
                Ok(v) => FieldValue::Integer(v),
                Err(_) => FieldValue::Number(
                    text.parse::<f64>()
                        .map_err(|_| format!("`{text}` is not an integer"))?,
                ),
            },
            FieldKind::Number { .. } => FieldValue::Number(
                text.parse::<f64>()
                    .map_err(|_| format!("`{text}` is not a number"))?,
            ),
        };
        self.check(&raw)
    }

    /// Converts a JSON value supplied by a client.
    pub fn value_from_json(&self, json: &serde_json::Value) -> Result<FieldValue, String> {
        let raw = match json {
            serde_json::Value::Number(n) => match n.as_i64() {
                Some(i) => FieldValue::Integer(i),
                None => FieldValue::Number(n.as_f64().ok_or("number out of range")?),
            },
            serde_json::Value::String(s) => match self.kind {
                FieldKind::Enum { .. } => FieldValue::Symbol(s.clone()),
                _ => return Err(format!("expected a number, got string `{s}`")),
            },
            other => return Err(format!("unsupported value `{other}`")),
        };
        self.check(&raw)
    }

    /// The number an expression sees for this value.
    pub fn to_scalar(&self, value: &FieldValue) -> f64 {
        match (&self.kind, value) {
            (FieldKind::Enum { values }, FieldValue::Symbol(s)) => {
                values.iter().position(|v| v == s).unwrap_or(0) as f64
            }
            (_, FieldValue::Integer(v)) => *v as f64,
            (_, FieldValue::Number(v)) => *v,
            (_, FieldValue::Symbol(_)) => f64::NAN,
        }
    }

    /// Converts a computed double into a value of this field's kind.
    /// Ranges apply to user input only.
    pub fn from_scalar(&self, v: f64) -> Result<FieldValue, String> {
        if !v.is_finite() {
            return Err(format!("computed value {v} is not finite"));
        }
        let as_integer = |v: f64| -> Result<i64, String> {
            let r = v.round();
            if (v - r).abs() > INTEGER_TOLERANCE {
                return Err(format!("computed value {v} is not an integer"));
            }
            Ok(r as i64)
        };
        match &self.kind {
            FieldKind::Number { .. } => Ok(FieldValue::Number(v)),
            FieldKind::Integer { .. } => Ok(FieldValue::Integer(as_integer(v)?)),
            FieldKind::Enum { values } => {
                let i = as_integer(v)?;
                usize::try_from(i)
                    .ok()
                    .and_then(|i| values.get(i))
                    .map(|s| FieldValue::Symbol(s.clone()))
                    .ok_or_else(|| format!("computed index {i} is not a valid choice"))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReplacementRule {
    pub target: VertexId,
    pub args: Vec<VertexId>,
    pub mode: Mode,
    pub expr: Expr,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FormSpec {
    pub name: String,
    pub fields: Vec<FieldDecl>,
    pub rules: Vec<ReplacementRule>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("syntax error at {location}: {message}")]
    Syntax { location: String, message: String },
    #[error("field `{0}` declared twice")]
    DuplicateField(VertexId),
    #[error("invalid field `{id}`: {message}")]
    InvalidField { id: String, message: String },
    #[error("form declares no fields")]
    NoFields,
    #[error("more than one rule targets `{0}`")]
    DuplicateRule(VertexId),
    #[error("rule for `{0}` targets an undeclared field")]
    UnknownTarget(VertexId),
    #[error("rule for `{0}` lists its own target as an argument")]
    SelfReference(VertexId),
    #[error("rule for `{target}` has no arguments")]
    EmptyArgs { target: VertexId },
    #[error("rule for `{target}` refers to `{name}`, which is not one of its arguments")]
    UnknownArg { target: VertexId, name: VertexId },
    #[error("rule for `{target}`: {message}")]
    ModeViolation { target: VertexId, message: String },
}

// Wire format.

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    name: String,
    fields: Vec<RawField>,
    #[serde(default)]
    rules: Vec<RawRule>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawField {
    id: String,
    label: String,
    kind: RawKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    values: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    max: Option<f64>,
}

#[derive(Serialize, Deserialize, Clone, Copy)]
#[serde(rename_all = "lowercase")]
enum RawKind {
    Number,
    Integer,
    Enum,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRule {
    target: String,
    args: Vec<String>,
    mode: Mode,
    expr: String,
}

/// Parses and validates a form specification from UTF-8 JSON.
pub fn parse_form_spec(text: &[u8]) -> Result<FormSpec, SpecError> {
    let raw: RawSpec = serde_json::from_slice(text).map_err(|e| SpecError::Syntax {
        location: format!("line {} column {}", e.line(), e.column()),
        message: strip_position(&e.to_string()),
    })?;

    let mut fields = Vec::with_capacity(raw.fields.len());
    let mut ids = BTreeSet::new();
    for f in raw.fields {
        let invalid = |message: &str| SpecError::InvalidField { id: f.id.clone(), message: message.into() };
        if f.id.is_empty() {
            return Err(invalid("identifier must be non-empty"));
        }
        let kind = match f.kind {
            RawKind::Enum => {
                if f.min.is_some() || f.max.is_some() {
                    return Err(invalid("enum fields take no min/max"));
                }
                let values = f.values.clone().unwrap_or_default();
                if values.is_empty() {
                    return Err(invalid("enum fields need at least one value"));
                }
                if values.iter().collect::<BTreeSet<_>>().len() != values.len() {
                    return Err(invalid("enum values must be distinct"));
                }
                FieldKind::Enum { values }
            }
            numeric => {
                if f.values.is_some() {
                    return Err(invalid("only enum fields take values"));
                }
                if let (Some(lo), Some(hi)) = (f.min, f.max) {
                    if lo > hi {
                        return Err(invalid("min exceeds max"));
                    }
                }
                if matches!(numeric, RawKind::Integer) {
                    FieldKind::Integer { min: f.min, max: f.max }
                } else {
                    FieldKind::Number { min: f.min, max: f.max }
                }
            }
        };
        let id = VertexId::new(f.id);
        if !ids.insert(id.clone()) {
            return Err(SpecError::DuplicateField(id));
        }
        fields.push(FieldDecl { id, label: f.label, kind });
    }
    if fields.is_empty() {
        return Err(SpecError::NoFields);
    }

    let mut rules = Vec::with_capacity(raw.rules.len());
    let mut targets = BTreeSet::new();
    for (i, r) in raw.rules.into_iter().enumerate() {
        let target = VertexId::new(r.target);
        if !ids.contains(&target) {
            return Err(SpecError::UnknownTarget(target));
        }
        if !targets.insert(target.clone()) {
            return Err(SpecError::DuplicateRule(target));
        }
        if r.args.is_empty() {
            return Err(SpecError::EmptyArgs { target });
        }
        let mut args = Vec::with_capacity(r.args.len());
        for a in r.args {
            let a = VertexId::new(a);
            if a == target {
                return Err(SpecError::SelfReference(target));
            }
            if !ids.contains(&a) {
                return Err(SpecError::UnknownArg { target, name: a });
            }
            if args.contains(&a) {
                return Err(SpecError::ModeViolation {
                    target,
                    message: format!("argument `{a}` listed twice"),
                });
            }
            args.push(a);
        }
        let expr = Expr::parse(&r.expr).map_err(|e| SpecError::Syntax {
            location: format!("rules[{i}].expr column {}", e.column),
            message: e.message,
        })?;
        if let Some(name) = expr.names().into_iter().find(|n| !args.contains(n)) {
            return Err(SpecError::UnknownArg { target, name });
        }
        match r.mode {
            Mode::Complete if expr.uses_missing() => {
                return Err(SpecError::ModeViolation {
                    target,
                    message: "missing() is only allowed in partial-mode rules".into(),
                })
            }
            Mode::Partial => {
                if let Some(name) = expr.first_unguarded(&args) {
                    return Err(SpecError::ModeViolation {
                        target,
                        message: format!("`{name}` may be missing here; guard it with missing({name})"),
                    });
                }
            }
            Mode::Complete => {}
        }
        rules.push(ReplacementRule { target, args, mode: r.mode, expr });
    }

    Ok(FormSpec { name: raw.name, fields, rules })
}

fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_owned(),
        None => msg.to_owned(),
    }
}

impl FormSpec {
    pub fn field(&self, id: &VertexId) -> Option<&FieldDecl> {
        self.fields.iter().find(|f| &f.id == id)
    }

    pub fn rule_for(&self, target: &VertexId) -> Option<&ReplacementRule> {
        self.rules.iter().find(|r| &r.target == target)
    }

    /// Edge `a -> target` for every argument `a` of every rule.
    pub fn induced_graph(&self) -> DepGraph {
        DepGraph::new(
            self.fields.iter().map(|f| f.id.clone()),
            self.rules
                .iter()
                .flat_map(|r| r.args.iter().map(move |a| (a.clone(), r.target.clone()))),
        )
        .expect("validated spec induces a valid graph")
    }

    /// Fields without a replacement rule.
    pub fn mandatory(&self) -> VertexSet {
        self.fields
            .iter()
            .filter(|f| self.rule_for(&f.id).is_none())
            .map(|f| f.id.clone())
            .collect()
    }

    /// Determination mode for a field; fields without a rule are never
    /// determined, so the answer does not matter for them.
    pub fn mode_of(&self, id: &VertexId) -> Mode {
        self.rule_for(id).map_or(Mode::Complete, |r| r.mode)
    }

    /// The common mode of all rules, or `None` when modes are mixed.
    pub fn uniform_mode(&self) -> Option<Mode> {
        let modes: BTreeSet<Mode> = self.rules.iter().map(|r| r.mode).collect();
        match modes.len() {
            0 => Some(Mode::Complete),
            1 => modes.into_iter().next(),
            _ => None,
        }
    }

    /// Serializes back to the JSON wire format.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self.to_raw()).expect("spec serializes")
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_raw()).expect("spec serializes")
    }

    fn to_raw(&self) -> RawSpec {
        RawSpec {
            name: self.name.clone(),
            fields: self
                .fields
                .iter()
                .map(|f| {
                    let (kind, values, min, max) = match &f.kind {
                        FieldKind::Number { min, max } => (RawKind::Number, None, *min, *max),
                        FieldKind::Integer { min, max } => (RawKind::Integer, None, *min, *max),
                        FieldKind::Enum { values } => (RawKind::Enum, Some(values.clone()), None, None),
                    };
                    RawField {
                        id: f.id.to_string(),
                        label: f.label.clone(),
                        kind,
                        values,
                        min,
                        max,
                    }
                })
                .collect(),
            rules: self
                .rules
                .iter()
                .map(|r| RawRule {
                    target: r.target.to_string(),
                    args: r.args.iter().map(|a| a.to_string()).collect(),
                    mode: r.mode,
                    expr: r.expr.to_string(),
                })
                .collect(),
        }
    }

    /// Scalar environment for a rule: only its arguments with known values.
    pub(crate) fn rule_env(
        &self,
        rule: &ReplacementRule,
        values: &BTreeMap<VertexId, FieldValue>,
    ) -> BTreeMap<VertexId, f64> {
        rule.args
            .iter()
            .filter_map(|a| {
                let v = values.get(a)?;
                let decl = self.field(a).expect("rule argument is a declared field");
                Some((a.clone(), decl.to_scalar(v)))
            })
            .collect()
    }
}
