//! Brute-force oracles and random graph generators shared by the
//! integration tests. Nothing here calls the search-based routines it is
//! used to check.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use autofill_core::{DepGraph, VertexId, VertexSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn name(i: usize) -> VertexId {
    VertexId::new(format!("v{i}"))
}

/// Builds a graph on `v0..v{n-1}` from an `n x n` adjacency table; the
/// diagonal is ignored.
pub fn graph_from_table(n: usize, table: &[bool]) -> DepGraph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && table[i * n + j] {
                edges.push((name(i), name(j)));
            }
        }
    }
    DepGraph::new((0..n).map(name), edges).unwrap()
}

/// Deterministic stream of random graphs with `min_n <= n <= max_n` and a
/// per-graph edge density drawn uniformly from [0.05, 0.95].
pub fn random_graphs(seed: u64, count: usize, min_n: usize, max_n: usize) -> Vec<DepGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(min_n..=max_n);
            let density: f64 = rng.gen_range(0.05..0.95);
            let table: Vec<bool> = (0..n * n).map(|_| rng.gen_bool(density)).collect();
            graph_from_table(n, &table)
        })
        .collect()
}

/// Every subset of the vertex set.
pub fn all_subsets(g: &DepGraph) -> Vec<VertexSet> {
    let n = g.len();
    (0..1u32 << n)
        .map(|s| (0..n).filter(|&i| s & (1 << i) != 0).map(|i| g.id(i).clone()).collect())
        .collect()
}

fn incoming(g: &DepGraph) -> BTreeMap<VertexId, BTreeSet<VertexId>> {
    let mut map: BTreeMap<VertexId, BTreeSet<VertexId>> =
        g.vertices().iter().map(|v| (v.clone(), BTreeSet::new())).collect();
    for (a, b) in g.edges() {
        map.get_mut(b).unwrap().insert(a.clone());
    }
    map
}

/// Closure straight from the definitions, iterated |V| + 1 times.
pub fn closure_by_definition(g: &DepGraph, start: &VertexSet, partial: bool) -> VertexSet {
    let ins = incoming(g);
    let mut current = start.clone();
    for _ in 0..=g.len() {
        let mut next = current.clone();
        for (v, inc) in &ins {
            let determined = if partial {
                inc.iter().any(|w| current.contains(w))
            } else {
                !inc.is_empty() && inc.is_subset(&current)
            };
            if determined {
                next.insert(v.clone());
            }
        }
        current = next;
    }
    current
}

/// Member sets of all simple cycles, by plain backtracking from each
/// least vertex.
pub fn brute_force_cycle_sets(g: &DepGraph) -> BTreeSet<VertexSet> {
    let n = g.len();
    let adj: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| g.successors(i).contains(&j)).collect())
        .collect();
    let mut found = BTreeSet::new();

    fn extend(
        adj: &[Vec<bool>],
        start: usize,
        path: &mut Vec<usize>,
        on_path: &mut Vec<bool>,
        found: &mut BTreeSet<Vec<usize>>,
    ) {
        let last = *path.last().unwrap();
        for next in start..adj.len() {
            if !adj[last][next] {
                continue;
            }
            if next == start {
                if path.len() >= 2 {
                    let mut members = path.clone();
                    members.sort_unstable();
                    found.insert(members);
                }
            } else if !on_path[next] {
                on_path[next] = true;
                path.push(next);
                extend(adj, start, path, on_path, found);
                path.pop();
                on_path[next] = false;
            }
        }
    }

    let mut raw = BTreeSet::new();
    for start in 0..n {
        let mut on_path = vec![false; n];
        on_path[start] = true;
        extend(&adj, start, &mut vec![start], &mut on_path, &mut raw);
    }
    for members in raw {
        found.insert(members.into_iter().map(|i| g.id(i).clone()).collect());
    }
    found
}

/// Strong components from the matrix-power reachability table.
pub fn partition_by_powers(g: &DepGraph) -> BTreeSet<VertexSet> {
    let reach = g.adjacency_matrix().reachability_by_powers();
    let n = g.len();
    (0..n)
        .map(|x| {
            (0..n)
                .filter(|&y| x == y || (reach[x][y] && reach[y][x]))
                .map(|y| g.id(y).clone())
                .collect()
        })
        .collect()
}

/// All ⊆-minimal sets satisfying `pred`, by checking every subset.
pub fn brute_force_minimal(g: &DepGraph, pred: impl Fn(&VertexSet) -> bool) -> BTreeSet<VertexSet> {
    let sat: Vec<VertexSet> = all_subsets(g).into_iter().filter(|s| pred(s)).collect();
    sat.iter()
        .filter(|s| !sat.iter().any(|t| t.len() < s.len() && t.is_subset(s)))
        .cloned()
        .collect()
}
