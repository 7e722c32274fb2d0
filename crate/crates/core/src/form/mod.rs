//! Form specifications, replacement-rule expressions, and runtime autofill.

pub mod expr;
pub mod fill;
pub mod spec;

pub use expr::{EvalError, Expr, ParseError};
pub use fill::{
    autofill, spec_report, suggest, validate_spec_consistency, FillError, FillReport, FillStatus, FilledValue,
    Origin, SpecReport, TraceEntry,
};
pub use spec::{parse_form_spec, FieldDecl, FieldKind, FieldValue, FormSpec, ReplacementRule, SpecError};
