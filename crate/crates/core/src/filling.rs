//! Determination closures and the filling characterizations.
//!
//! A set `I` of provided fields *fills* the graph when iterating
//! `I <- I ∪ Dtm(I)` reaches every vertex. Under complete determination a
//! vertex is determined once all of its incoming vertices are known; under
//! partial determination one known incoming vertex is enough.
//!
//! Besides the closure itself this module carries the structural checks that
//! must agree with it: sources plus a hit on every minimal cycle, acyclicity
//! after cutting edges into `I`, and (for partial determination) a hit on
//! every source component of the condensation.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cycles::{member_indices, minimal_cycles, Cycle};
use crate::graph::{DepGraph, GraphError, VertexId, VertexSet};
use crate::scc::{condense, Condensation};

/// Largest graph for which exhaustive minimal-filling search runs.
pub const EXACT_SEARCH_LIMIT: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Complete,
    Partial,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Complete => "complete",
            Mode::Partial => "partial",
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "complete" => Ok(Mode::Complete),
            "partial" => Ok(Mode::Partial),
            other => Err(format!("unknown mode `{other}` (expected complete or partial)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FillingError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("exact search supports at most {limit} vertices, graph has {vertices}")]
    TooLarge { vertices: usize, limit: usize },
}

/// Stages `I_0 ⊊ I_1 ⊊ ... ⊊ I_N` of a closure computation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosureTrace {
    pub stages: Vec<VertexSet>,
    pub fixed_point: VertexSet,
    pub filled: bool,
}

fn determined(g: &DepGraph, v: usize, known: &[bool], mode: Mode) -> bool {
    let incoming = g.predecessors(v);
    match mode {
        Mode::Complete => !incoming.is_empty() && incoming.iter().all(|&w| known[w]),
        Mode::Partial => incoming.iter().any(|&w| known[w]),
    }
}

/// Closure over membership masks; each returned mask strictly grows.
pub(crate) fn closure_masks(
    g: &DepGraph,
    start: Vec<bool>,
    mode_of: &dyn Fn(usize) -> Mode,
) -> Vec<Vec<bool>> {
    let mut stages = vec![start];
    loop {
        let current = stages.last().expect("at least one stage");
        let mut next = current.clone();
        let mut grew = false;
        for v in 0..g.len() {
            if !current[v] && determined(g, v, current, mode_of(v)) {
                next[v] = true;
                grew = true;
            }
        }
        if !grew {
            return stages;
        }
        stages.push(next);
    }
}

fn fills_mask(g: &DepGraph, start: Vec<bool>, mode_of: &dyn Fn(usize) -> Mode) -> bool {
    closure_masks(g, start, mode_of)
        .last()
        .is_some_and(|m| m.iter().all(|&b| b))
}

/// `Dtm(I)`: vertices whose non-empty incoming set lies inside `I`.
pub fn dtm(g: &DepGraph, provided: &VertexSet) -> Result<VertexSet, GraphError> {
    let mask = g.mask_of(provided)?;
    Ok((0..g.len())
        .filter(|&v| determined(g, v, &mask, Mode::Complete))
        .map(|v| g.id(v).clone())
        .collect())
}

/// `pDtm(I)`: vertices with at least one incoming vertex in `I`.
pub fn pdtm(g: &DepGraph, provided: &VertexSet) -> Result<VertexSet, GraphError> {
    let mask = g.mask_of(provided)?;
    Ok((0..g.len())
        .filter(|&v| determined(g, v, &mask, Mode::Partial))
        .map(|v| g.id(v).clone())
        .collect())
}

pub fn closure(g: &DepGraph, provided: &VertexSet, mode: Mode) -> Result<ClosureTrace, GraphError> {
    closure_with(g, provided, |_| mode)
}

/// Closure where each vertex carries its own determination mode.
pub fn closure_with<F>(g: &DepGraph, provided: &VertexSet, mode_of: F) -> Result<ClosureTrace, GraphError>
where
    F: Fn(&VertexId) -> Mode,
{
    let start = g.mask_of(provided)?;
    let by_index = |v: usize| mode_of(g.id(v));
    let masks = closure_masks(g, start, &by_index);
    let stages: Vec<VertexSet> = masks.iter().map(|m| g.set_of_mask(m)).collect();
    let fixed_point = stages.last().cloned().unwrap_or_default();
    let filled = fixed_point.len() == g.len();
    Ok(ClosureTrace { stages, fixed_point, filled })
}

pub fn is_filling(g: &DepGraph, provided: &VertexSet, mode: Mode) -> Result<bool, GraphError> {
    Ok(closure(g, provided, mode)?.filled)
}

pub fn is_filling_by_cycles(g: &DepGraph, provided: &VertexSet) -> Result<bool, GraphError> {
    FillingAnalysis::new(g).is_filling_by_cycles(provided)
}

pub fn is_filling_by_dag(g: &DepGraph, provided: &VertexSet) -> Result<bool, GraphError> {
    FillingAnalysis::new(g).is_filling_by_dag(provided)
}

pub fn is_p_filling_by_scc(g: &DepGraph, provided: &VertexSet) -> Result<bool, GraphError> {
    FillingAnalysis::new(g).is_p_filling_by_scc(provided)
}

pub fn is_p_filling_by_path(g: &DepGraph, provided: &VertexSet) -> Result<bool, GraphError> {
    FillingAnalysis::new(g).is_p_filling_by_path(provided)
}

pub fn greedy_min_filling(g: &DepGraph) -> VertexSet {
    FillingAnalysis::new(g).greedy_min_filling()
}

pub fn exact_min_fillings(g: &DepGraph, mode: Mode) -> Result<Vec<VertexSet>, FillingError> {
    exact_min_fillings_with(g, |_| mode)
}

pub fn min_p_filling(g: &DepGraph) -> VertexSet {
    FillingAnalysis::new(g).min_p_filling()
}

pub fn suggest_additional(g: &DepGraph, provided: &VertexSet, mode: Mode) -> Result<VertexSet, GraphError> {
    FillingAnalysis::new(g).suggest_additional(provided, mode)
}

/// All ⊆-minimal filling sets under per-vertex modes, smallest first, then
/// lexicographic. Filling is upward closed, so a set is minimal exactly when
/// it fills and contains no smaller filling set found earlier.
pub fn exact_min_fillings_with<F>(g: &DepGraph, mode_of: F) -> Result<Vec<VertexSet>, FillingError>
where
    F: Fn(&VertexId) -> Mode,
{
    let n = g.len();
    if n > EXACT_SEARCH_LIMIT {
        return Err(FillingError::TooLarge { vertices: n, limit: EXACT_SEARCH_LIMIT });
    }
    let by_index = |v: usize| mode_of(g.id(v));
    let mut subsets: Vec<u32> = (0..1u32 << n).collect();
    subsets.sort_by_key(|&s| (s.count_ones(), bits(s, n)));

    let mut minimal: Vec<u32> = Vec::new();
    for s in subsets {
        if minimal.iter().any(|&m| m & !s == 0) {
            continue;
        }
        let mask: Vec<bool> = (0..n).map(|i| s & (1 << i) != 0).collect();
        if fills_mask(g, mask, &by_index) {
            minimal.push(s);
        }
    }
    Ok(minimal
        .into_iter()
        .map(|s| g.set_of_indices(&bits(s, n)))
        .collect())
}

fn bits(s: u32, n: usize) -> Vec<usize> {
    (0..n).filter(|&i| s & (1 << i) != 0).collect()
}

/// Heuristic completion for a graph whose vertices carry differing modes:
/// take the complete-mode suggestion (which always suffices, since every
/// complete determination is also a partial one), then drop suggested
/// vertices that turn out to be unnecessary.
pub fn suggest_additional_with<F>(g: &DepGraph, provided: &VertexSet, mode_of: F) -> Result<VertexSet, GraphError>
where
    F: Fn(&VertexId) -> Mode,
{
    let analysis = FillingAnalysis::new(g);
    let mut suggestion = analysis.suggest_additional(provided, Mode::Complete)?;
    let candidates: Vec<VertexId> = suggestion.iter().cloned().collect();
    for v in candidates {
        suggestion.remove(&v);
        let trial: VertexSet = provided.union(&suggestion).cloned().collect();
        if !closure_with(g, &trial, &mode_of)?.filled {
            suggestion.insert(v);
        }
    }
    Ok(suggestion)
}

/// Precomputed structure (sources, minimal cycles, condensation) of one
/// graph, for answering many filling queries against it.
#[derive(Clone, Debug)]
pub struct FillingAnalysis<'g> {
    graph: &'g DepGraph,
    sources: Vec<usize>,
    cycles: Vec<Cycle>,
    cycle_members: Vec<Vec<usize>>,
    condensation: Condensation,
    source_components: Vec<Vec<usize>>,
}

impl<'g> FillingAnalysis<'g> {
    pub fn new(graph: &'g DepGraph) -> Self {
        let cycles = minimal_cycles(graph);
        let cycle_members = member_indices(graph, &cycles);
        let condensation = condense(graph);
        let source_components = condensation
            .source_components()
            .into_iter()
            .map(|c| {
                condensation.components[c]
                    .iter()
                    .map(|v| graph.index_of(v).expect("component member"))
                    .collect()
            })
            .collect();
        FillingAnalysis {
            graph,
            sources: graph.source_indices().collect(),
            cycles,
            cycle_members,
            condensation,
            source_components,
        }
    }

    pub fn graph(&self) -> &DepGraph {
        self.graph
    }

    pub fn minimal_cycles(&self) -> &[Cycle] {
        &self.cycles
    }

    pub fn condensation(&self) -> &Condensation {
        &self.condensation
    }

    pub fn source_components(&self) -> Vec<Vec<VertexId>> {
        self.source_components
            .iter()
            .map(|c| c.iter().map(|&i| self.graph.id(i).clone()).collect())
            .collect()
    }

    /// Sources included and every minimal cycle hit.
    pub fn is_filling_by_cycles(&self, provided: &VertexSet) -> Result<bool, GraphError> {
        let mask = self.graph.mask_of(provided)?;
        Ok(self.sources.iter().all(|&s| mask[s])
            && self.cycle_members.iter().all(|c| c.iter().any(|&v| mask[v])))
    }

    /// Cut every edge into `I`; the rest must be a DAG whose sources lie in `I`.
    pub fn is_filling_by_dag(&self, provided: &VertexSet) -> Result<bool, GraphError> {
        let mask = self.graph.mask_of(provided)?;
        let cut = self.graph.without_edges_into(&mask);
        Ok(cut.is_dag() && cut.source_indices().all(|s| mask[s]))
    }

    /// Every source component of the condensation hit.
    pub fn is_p_filling_by_scc(&self, provided: &VertexSet) -> Result<bool, GraphError> {
        let mask = self.graph.mask_of(provided)?;
        Ok(self
            .source_components
            .iter()
            .all(|c| c.iter().any(|&v| mask[v])))
    }

    /// Sources included and every other vertex reachable from `I`.
    pub fn is_p_filling_by_path(&self, provided: &VertexSet) -> Result<bool, GraphError> {
        let g = self.graph;
        let mask = g.mask_of(provided)?;
        if !self.sources.iter().all(|&s| mask[s]) {
            return Ok(false);
        }
        let mut reached = mask.clone();
        for j in (0..g.len()).filter(|&j| mask[j]) {
            for (x, r) in g.reachable_from(j).into_iter().enumerate() {
                reached[x] |= r;
            }
        }
        Ok(reached.into_iter().all(|r| r))
    }

    /// Greedily adds the vertex lying on the most still-unhit minimal
    /// cycles until every cycle is hit. Ties go to the smallest id.
    fn cover_cycles(&self, chosen: &mut [bool]) {
        loop {
            let mut hits = vec![0usize; self.graph.len()];
            for members in &self.cycle_members {
                if members.iter().any(|&v| chosen[v]) {
                    continue;
                }
                for &v in members {
                    hits[v] += 1;
                }
            }
            // max_by_key returns the last maximum; scan in reverse so the
            // lowest index wins ties.
            let best = (0..hits.len()).rev().filter(|&v| hits[v] > 0).max_by_key(|&v| hits[v]);
            match best {
                Some(v) => chosen[v] = true,
                None => return,
            }
        }
    }

    /// A complete-mode filling set: the sources plus greedy cycle cover.
    pub fn greedy_min_filling(&self) -> VertexSet {
        let mut chosen = vec![false; self.graph.len()];
        for &s in &self.sources {
            chosen[s] = true;
        }
        self.cover_cycles(&mut chosen);
        self.graph.set_of_mask(&chosen)
    }

    /// The least vertex of each source component.
    pub fn min_p_filling(&self) -> VertexSet {
        self.source_components
            .iter()
            .map(|c| self.graph.id(c[0]).clone())
            .collect()
    }

    /// Additional vertices that, together with `provided`, fill the graph.
    /// Empty exactly when `provided` already fills. Greedy, so not
    /// necessarily of minimum size.
    pub fn suggest_additional(&self, provided: &VertexSet, mode: Mode) -> Result<VertexSet, GraphError> {
        let g = self.graph;
        let given = g.mask_of(provided)?;
        let mut chosen = given.clone();
        match mode {
            Mode::Complete => {
                for &s in &self.sources {
                    chosen[s] = true;
                }
                self.cover_cycles(&mut chosen);
            }
            Mode::Partial => {
                for c in &self.source_components {
                    if !c.iter().any(|&v| given[v]) {
                        chosen[c[0]] = true;
                    }
                }
            }
        }
        let added: BTreeSet<usize> = (0..g.len()).filter(|&v| chosen[v] && !given[v]).collect();
        Ok(g.set_of_indices(&added))
    }
}

/// Structural summary of a graph's filling behaviour.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AnalysisReport {
    pub sources: VertexSet,
    pub minimal_cycles: Vec<Cycle>,
    pub sccs: Vec<Vec<VertexId>>,
    pub source_components: Vec<Vec<VertexId>>,
    pub greedy_min_filling: VertexSet,
    pub exact_min_fillings: Option<Vec<VertexSet>>,
    pub min_p_filling_cardinality: usize,
}

/// Runs the full analysis. With `exact`, also enumerates every ⊆-minimal
/// complete-mode filling set, which fails on graphs above
/// [`EXACT_SEARCH_LIMIT`] vertices.
pub fn analyze(g: &DepGraph, exact: bool) -> Result<AnalysisReport, FillingError> {
    let analysis = FillingAnalysis::new(g);
    let exact_min_fillings = if exact {
        Some(exact_min_fillings(g, Mode::Complete)?)
    } else {
        None
    };
    let source_components = analysis.source_components();
    Ok(AnalysisReport {
        sources: g.sources(),
        minimal_cycles: analysis.cycles.clone(),
        sccs: analysis.condensation.components.clone(),
        min_p_filling_cardinality: source_components.len(),
        source_components,
        greedy_min_filling: analysis.greedy_min_filling(),
        exact_min_fillings,
    })
}
