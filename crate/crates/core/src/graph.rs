//! Directed self-loopless dependency graphs over field identifiers.
//!
//! A [`DepGraph`] is immutable once built. Vertices are kept in the
//! lexicographic order of their identifiers, and every collection the graph
//! hands back follows that order, so downstream reports are deterministic.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::AdjMatrix;

/// Identifier of a field / vertex. Ordered lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(String);

impl VertexId {
    pub fn new(id: impl Into<String>) -> Self {
        VertexId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for VertexId {
    fn from(s: &str) -> Self {
        VertexId(s.to_owned())
    }
}

impl From<String> for VertexId {
    fn from(s: String) -> Self {
        VertexId(s)
    }
}

impl std::borrow::Borrow<str> for VertexId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

pub type VertexSet = BTreeSet<VertexId>;

/// Builds a [`VertexSet`] from anything string-like.
pub fn vertex_set<I, S>(ids: I) -> VertexSet
where
    I: IntoIterator<Item = S>,
    S: Into<VertexId>,
{
    ids.into_iter().map(Into::into).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("edge ({0}, {0}) is a self-loop")]
    SelfLoop(VertexId),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(VertexId),
    #[error("a graph needs at least one vertex")]
    EmptyVertexSet,
    #[error("vertex `{0}` declared twice")]
    DuplicateVertex(VertexId),
    #[error("vertex identifiers must be non-empty")]
    EmptyVertexId,
}

/// Finite directed graph without self-loops.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DepGraph {
    ids: Vec<VertexId>,
    index: BTreeMap<VertexId, usize>,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
}

/// Validates and builds a graph. Duplicate edges are merged.
pub fn build_graph<V, E>(vertices: V, edges: E) -> Result<DepGraph, GraphError>
where
    V: IntoIterator<Item = VertexId>,
    E: IntoIterator<Item = (VertexId, VertexId)>,
{
    DepGraph::new(vertices, edges)
}

impl DepGraph {
    pub fn new<V, E>(vertices: V, edges: E) -> Result<Self, GraphError>
    where
        V: IntoIterator<Item = VertexId>,
        E: IntoIterator<Item = (VertexId, VertexId)>,
    {
        let mut ids = Vec::new();
        let mut seen = BTreeSet::new();
        for v in vertices {
            if v.0.is_empty() {
                return Err(GraphError::EmptyVertexId);
            }
            if !seen.insert(v.clone()) {
                return Err(GraphError::DuplicateVertex(v));
            }
            ids.push(v);
        }
        if ids.is_empty() {
            return Err(GraphError::EmptyVertexSet);
        }
        ids.sort();
        let index: BTreeMap<VertexId, usize> =
            ids.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();

        let mut edge_set = BTreeSet::new();
        for (from, to) in edges {
            if from == to {
                return Err(GraphError::SelfLoop(from));
            }
            let a = *index.get(&from).ok_or(GraphError::UnknownVertex(from))?;
            let b = *index.get(&to).ok_or(GraphError::UnknownVertex(to))?;
            edge_set.insert((a, b));
        }

        let n = ids.len();
        let mut succ = vec![Vec::new(); n];
        let mut pred = vec![Vec::new(); n];
        // BTreeSet iteration keeps both adjacency lists sorted.
        for &(a, b) in &edge_set {
            succ[a].push(b);
            pred[b].push(a);
        }
        for p in &mut pred {
            p.sort_unstable();
        }
        Ok(DepGraph { ids, index, succ, pred })
    }

    /// Parses the `{"vertices": [...], "edges": [[from, to], ...]}` interchange form.
    pub fn from_doc(doc: &GraphDoc) -> Result<Self, GraphError> {
        DepGraph::new(
            doc.vertices.iter().cloned(),
            doc.edges.iter().map(|[a, b]| (a.clone(), b.clone())),
        )
    }

    pub fn to_doc(&self) -> GraphDoc {
        GraphDoc {
            vertices: self.ids.clone(),
            edges: self.edges().map(|(a, b)| [a.clone(), b.clone()]).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    /// Always false: a graph has at least one vertex.
    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.ids
    }

    pub fn vertex_set(&self) -> VertexSet {
        self.ids.iter().cloned().collect()
    }

    /// Edges in (from, to) lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (&VertexId, &VertexId)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(move |(a, bs)| bs.iter().map(move |&b| (&self.ids[a], &self.ids[b])))
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn contains(&self, v: &VertexId) -> bool {
        self.index.contains_key(v)
    }

    pub fn index_of(&self, v: &VertexId) -> Result<usize, GraphError> {
        self.index
            .get(v)
            .copied()
            .ok_or_else(|| GraphError::UnknownVertex(v.clone()))
    }

    pub fn id(&self, idx: usize) -> &VertexId {
        &self.ids[idx]
    }

    /// Sorted successor indices.
    pub fn successors(&self, idx: usize) -> &[usize] {
        &self.succ[idx]
    }

    /// Sorted predecessor indices, i.e. the incoming set by index.
    pub fn predecessors(&self, idx: usize) -> &[usize] {
        &self.pred[idx]
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.succ[from].binary_search(&to).is_ok()
    }

    /// Converts a vertex set into a membership mask, rejecting unknown ids.
    pub fn mask_of(&self, set: &VertexSet) -> Result<Vec<bool>, GraphError> {
        let mut mask = vec![false; self.len()];
        for v in set {
            mask[self.index_of(v)?] = true;
        }
        Ok(mask)
    }

    pub fn set_of_mask(&self, mask: &[bool]) -> VertexSet {
        mask.iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(i, _)| self.ids[i].clone())
            .collect()
    }

    pub fn set_of_indices<'a>(&self, indices: impl IntoIterator<Item = &'a usize>) -> VertexSet {
        indices.into_iter().map(|&i| self.ids[i].clone()).collect()
    }

    /// `In(v)`: vertices with an edge into `v`.
    pub fn in_set(&self, v: &VertexId) -> Result<VertexSet, GraphError> {
        let idx = self.index_of(v)?;
        Ok(self.set_of_indices(&self.pred[idx]))
    }

    /// Vertices without incoming edges (the mandatory fields).
    pub fn sources(&self) -> VertexSet {
        self.source_indices().map(|i| self.ids[i].clone()).collect()
    }

    pub fn source_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&i| self.pred[i].is_empty())
    }

    pub fn adjacency_matrix(&self) -> AdjMatrix {
        let mut m = AdjMatrix::zeros(self.len());
        for (a, bs) in self.succ.iter().enumerate() {
            for &b in bs {
                m.set(a, b, 1);
            }
        }
        m
    }

    /// Vertices reachable from `start` by a path of length >= 1.
    pub fn reachable_from(&self, start: usize) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        let mut queue: VecDeque<usize> = self.succ[start].iter().copied().collect();
        for &s in &self.succ[start] {
            seen[s] = true;
        }
        while let Some(v) = queue.pop_front() {
            for &w in &self.succ[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    /// True iff there is a directed path of length >= 1 from `x` to `y`.
    /// `has_path(x, x)` therefore means `x` lies on a cycle.
    pub fn has_path(&self, x: &VertexId, y: &VertexId) -> Result<bool, GraphError> {
        let a = self.index_of(x)?;
        let b = self.index_of(y)?;
        Ok(self.reachable_from(a)[b])
    }

    /// Kahn's algorithm: acyclic iff every vertex can be peeled off.
    pub fn is_dag(&self) -> bool {
        let mut indegree: Vec<usize> = self.pred.iter().map(Vec::len).collect();
        let mut ready: Vec<usize> = (0..self.len()).filter(|&i| indegree[i] == 0).collect();
        let mut removed = 0;
        while let Some(v) = ready.pop() {
            removed += 1;
            for &w in &self.succ[v] {
                indegree[w] -= 1;
                if indegree[w] == 0 {
                    ready.push(w);
                }
            }
        }
        removed == self.len()
    }

    /// The subgraph obtained by deleting every edge whose head lies in `heads`.
    pub fn without_edges_into(&self, heads: &[bool]) -> DepGraph {
        let mut succ = vec![Vec::new(); self.len()];
        let mut pred = vec![Vec::new(); self.len()];
        for (a, bs) in self.succ.iter().enumerate() {
            for &b in bs {
                if !heads[b] {
                    succ[a].push(b);
                    pred[b].push(a);
                }
            }
        }
        for p in &mut pred {
            p.sort_unstable();
        }
        DepGraph {
            ids: self.ids.clone(),
            index: self.index.clone(),
            succ,
            pred,
        }
    }
}

/// JSON interchange form of a graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDoc {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<[VertexId; 2]>,
}
