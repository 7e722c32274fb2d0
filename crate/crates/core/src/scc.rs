//! Strongly connected components (Tarjan) and the condensation DAG.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::graph::{DepGraph, VertexId};

/// Tarjan's algorithm restricted to vertices with `active[v]`, iterative so
/// deep graphs cannot overflow the stack. Components come out in reverse
/// topological order; members are unsorted.
pub(crate) fn tarjan(g: &DepGraph, active: &[bool]) -> Vec<Vec<usize>> {
    let n = g.len();
    let mut counter = 0usize;
    let mut index: Vec<Option<usize>> = vec![None; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut components = Vec::new();

    for root in 0..n {
        if !active[root] || index[root].is_some() {
            continue;
        }
        index[root] = Some(counter);
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        let mut frames: Vec<(usize, usize)> = vec![(root, 0)];

        while let Some(frame) = frames.last_mut() {
            let v = frame.0;
            let succs = g.successors(v);
            if frame.1 < succs.len() {
                let w = succs[frame.1];
                frame.1 += 1;
                if !active[w] {
                    continue;
                }
                match index[w] {
                    None => {
                        index[w] = Some(counter);
                        low[w] = counter;
                        counter += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        frames.push((w, 0));
                    }
                    Some(iw) if on_stack[w] => low[v] = low[v].min(iw),
                    Some(_) => {}
                }
                continue;
            }

            frames.pop();
            if let Some(&(parent, _)) = frames.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if Some(low[v]) == index[v] {
                let mut component = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    component.push(w);
                    if w == v {
                        break;
                    }
                }
                components.push(component);
            }
        }
    }
    components
}

/// SCC partition as sorted vertex-index lists, ordered by least member.
pub fn scc_indices(g: &DepGraph) -> Vec<Vec<usize>> {
    let mut comps = tarjan(g, &vec![true; g.len()]);
    for c in &mut comps {
        c.sort_unstable();
    }
    comps.sort();
    comps
}

/// SCC partition of the graph's vertices.
pub fn scc(g: &DepGraph) -> Vec<Vec<VertexId>> {
    scc_indices(g)
        .into_iter()
        .map(|c| c.into_iter().map(|i| g.id(i).clone()).collect())
        .collect()
}

/// The quotient graph `G/~` over strongly connected components.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Condensation {
    pub components: Vec<Vec<VertexId>>,
    pub quotient_edges: BTreeSet<(usize, usize)>,
    pub component_of: BTreeMap<VertexId, usize>,
}

pub fn condense(g: &DepGraph) -> Condensation {
    let comps = scc_indices(g);
    let mut comp_of_idx = vec![0usize; g.len()];
    for (c, members) in comps.iter().enumerate() {
        for &v in members {
            comp_of_idx[v] = c;
        }
    }
    let mut quotient_edges = BTreeSet::new();
    for (a, b) in g.edges() {
        let ca = comp_of_idx[g.index_of(a).expect("edge endpoint")];
        let cb = comp_of_idx[g.index_of(b).expect("edge endpoint")];
        if ca != cb {
            quotient_edges.insert((ca, cb));
        }
    }
    let condensation = Condensation {
        components: comps
            .iter()
            .map(|c| c.iter().map(|&i| g.id(i).clone()).collect())
            .collect(),
        quotient_edges,
        component_of: g
            .vertices()
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), comp_of_idx[i]))
            .collect(),
    };
    debug_assert!(condensation.is_acyclic(), "quotient graph must be a DAG");
    condensation
}

impl Condensation {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Components with no incoming quotient edge, in component order.
    pub fn source_components(&self) -> Vec<usize> {
        let mut has_incoming = vec![false; self.components.len()];
        for &(_, d) in &self.quotient_edges {
            has_incoming[d] = true;
        }
        (0..self.components.len()).filter(|&c| !has_incoming[c]).collect()
    }

    pub fn is_acyclic(&self) -> bool {
        let n = self.components.len();
        let mut indegree = vec![0usize; n];
        for &(_, d) in &self.quotient_edges {
            indegree[d] += 1;
        }
        let mut ready: Vec<usize> = (0..n).filter(|&c| indegree[c] == 0).collect();
        let mut removed = 0;
        while let Some(c) = ready.pop() {
            removed += 1;
            for &(from, to) in &self.quotient_edges {
                if from == c {
                    indegree[to] -= 1;
                    if indegree[to] == 0 {
                        ready.push(to);
                    }
                }
            }
        }
        removed == n
    }

    /// The quotient as a graph whose vertices are named `C0`, `C1`, ...
    pub fn quotient_graph(&self) -> DepGraph {
        let name = |c: usize| VertexId::new(format!("C{c}"));
        DepGraph::new(
            (0..self.components.len()).map(name),
            self.quotient_edges.iter().map(|&(a, b)| (name(a), name(b))),
        )
        .expect("condensation always has at least one component")
    }
}
