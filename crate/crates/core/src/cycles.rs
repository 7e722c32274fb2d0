//! Elementary cycle enumeration (Johnson's circuit-finding algorithm).

use std::collections::BTreeMap;

use serde::Serialize;

use crate::graph::{DepGraph, VertexId, VertexSet};
use crate::scc::tarjan;

/// A cycle identified by its member set. The witness is one closed walk
/// through exactly those members; the edge back to the first vertex is
/// implied.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cycle {
    pub members: VertexSet,
    pub witness: Vec<VertexId>,
}

impl Cycle {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn intersects(&self, set: &VertexSet) -> bool {
        self.members.iter().any(|v| set.contains(v))
    }
}

struct Johnson<'g> {
    graph: &'g DepGraph,
    start: usize,
    in_component: Vec<bool>,
    blocked: Vec<bool>,
    blocked_by: Vec<Vec<usize>>,
    stack: Vec<usize>,
    found: Vec<Vec<usize>>,
}

impl Johnson<'_> {
    fn unblock(&mut self, u: usize) {
        self.blocked[u] = false;
        while let Some(w) = self.blocked_by[u].pop() {
            if self.blocked[w] {
                self.unblock(w);
            }
        }
    }

    fn circuit(&mut self, v: usize) -> bool {
        let mut closed = false;
        self.stack.push(v);
        self.blocked[v] = true;

        let graph = self.graph;
        for &w in graph.successors(v) {
            if !self.in_component[w] {
                continue;
            }
            if w == self.start {
                self.found.push(self.stack.clone());
                closed = true;
            } else if !self.blocked[w] && self.circuit(w) {
                closed = true;
            }
        }

        if closed {
            self.unblock(v);
        } else {
            for &w in graph.successors(v) {
                if self.in_component[w] && !self.blocked_by[w].contains(&v) {
                    self.blocked_by[w].push(v);
                }
            }
        }
        self.stack.pop();
        closed
    }
}

/// Every elementary circuit as a vertex-index sequence starting at its
/// least vertex. Circuits over the same vertex set in different orders are
/// all reported.
pub fn elementary_circuits(g: &DepGraph) -> Vec<Vec<usize>> {
    let n = g.len();
    let mut found = Vec::new();
    for start in 0..n {
        let active: Vec<bool> = (0..n).map(|v| v >= start).collect();
        let component = tarjan(g, &active)
            .into_iter()
            .find(|c| c.contains(&start))
            .expect("start vertex is active");
        if component.len() < 2 {
            continue;
        }
        let mut in_component = vec![false; n];
        for &v in &component {
            in_component[v] = true;
        }
        let mut johnson = Johnson {
            graph: g,
            start,
            in_component,
            blocked: vec![false; n],
            blocked_by: vec![Vec::new(); n],
            stack: Vec::new(),
            found: Vec::new(),
        };
        johnson.circuit(start);
        found.append(&mut johnson.found);
    }
    found
}

/// The graph's minimal cycles: one entry per distinct member set of an
/// elementary circuit, sorted by size and then by members.
pub fn minimal_cycles(g: &DepGraph) -> Vec<Cycle> {
    let mut by_members: BTreeMap<(usize, Vec<usize>), Vec<usize>> = BTreeMap::new();
    for witness in elementary_circuits(g) {
        let mut members = witness.clone();
        members.sort_unstable();
        by_members.entry((members.len(), members)).or_insert(witness);
    }
    by_members
        .into_iter()
        .map(|((_, members), witness)| Cycle {
            members: g.set_of_indices(&members),
            witness: witness.iter().map(|&i| g.id(i).clone()).collect(),
        })
        .collect()
}

/// Drops every cycle whose member set strictly contains another's.
pub fn inclusion_minimal(cycles: &[Cycle]) -> Vec<Cycle> {
    cycles
        .iter()
        .filter(|c| {
            !cycles
                .iter()
                .any(|d| d.members.len() < c.members.len() && d.members.is_subset(&c.members))
        })
        .cloned()
        .collect()
}

/// Cycle member sets as index masks, for fast intersection tests.
pub(crate) fn member_indices(g: &DepGraph, cycles: &[Cycle]) -> Vec<Vec<usize>> {
    cycles
        .iter()
        .map(|c| {
            c.members
                .iter()
                .map(|v| g.index_of(v).expect("cycle member belongs to graph"))
                .collect()
        })
        .collect()
}
