//! Graph-theoretic autofill for forms whose fields carry replacement
//! functions over other fields.
//!
//! Fields are vertices of a [`DepGraph`]; a rule computing field `v` from
//! fields `a, b, ...` contributes edges `a -> v, b -> v, ...`. The
//! [`filling`] module decides from the graph alone whether a set of provided
//! fields is enough to autofill the rest, and [`form`] evaluates the rules
//! on actual values.

pub mod cycles;
pub mod filling;
pub mod form;
pub mod graph;
pub mod matrix;
pub mod scc;

pub use cycles::{minimal_cycles, Cycle};
pub use filling::{
    analyze, closure, closure_with, AnalysisReport, ClosureTrace, FillingAnalysis, FillingError, Mode,
};
pub use graph::{build_graph, vertex_set, DepGraph, GraphDoc, GraphError, VertexId, VertexSet};
pub use matrix::AdjMatrix;
pub use scc::{condense, scc, Condensation};
