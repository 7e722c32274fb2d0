mod common;

use std::collections::BTreeSet;

use autofill_core::cycles::inclusion_minimal;
use autofill_core::filling::{
    self, exact_min_fillings, greedy_min_filling, is_filling, is_filling_by_cycles, is_filling_by_dag,
    is_p_filling_by_path, is_p_filling_by_scc, min_p_filling, suggest_additional,
};
use autofill_core::{closure, condense, minimal_cycles, scc, DepGraph, FillingAnalysis, Mode, VertexSet};
use common::*;
use proptest::prelude::*;

fn arb_graph(max_n: usize) -> impl Strategy<Value = DepGraph> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(any::<bool>(), n * n).prop_map(move |table| graph_from_table(n, &table))
    })
}

fn arb_graph_and_subset(max_n: usize) -> impl Strategy<Value = (DepGraph, VertexSet)> {
    arb_graph(max_n).prop_flat_map(|g| {
        let n = g.len();
        prop::collection::vec(any::<bool>(), n).prop_map(move |mask| {
            let set = g.set_of_mask(&mask);
            (g.clone(), set)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn has_path_matches_matrix_powers(g in arb_graph(7)) {
        let m = g.adjacency_matrix();
        for (i, x) in g.vertices().iter().enumerate() {
            for (j, y) in g.vertices().iter().enumerate() {
                prop_assert_eq!(g.has_path(x, y).unwrap(), m.path_by_powers(i, j));
            }
        }
    }

    #[test]
    fn is_dag_matches_traces(g in arb_graph(7)) {
        prop_assert_eq!(g.is_dag(), g.adjacency_matrix().is_dag_by_traces());
        prop_assert_eq!(g.is_dag(), minimal_cycles(&g).is_empty());
    }

    #[test]
    fn sources_are_zero_columns(g in arb_graph(7)) {
        let cols: VertexSet = g
            .adjacency_matrix()
            .zero_columns()
            .into_iter()
            .map(|i| g.id(i).clone())
            .collect();
        prop_assert_eq!(g.sources(), cols);
    }

    #[test]
    fn tarjan_matches_mutual_reachability(g in arb_graph(7)) {
        let components: BTreeSet<VertexSet> =
            scc(&g).into_iter().map(|c| c.into_iter().collect()).collect();
        prop_assert_eq!(components, partition_by_powers(&g));
    }

    #[test]
    fn condensation_is_acyclic_quotient(g in arb_graph(7)) {
        let c = condense(&g);
        prop_assert!(c.is_acyclic());
        prop_assert!(c.quotient_graph().is_dag());
        for (a, b) in g.edges() {
            let (ca, cb) = (c.component_of[a], c.component_of[b]);
            prop_assert_eq!(ca != cb, c.quotient_edges.contains(&(ca, cb)));
        }
        for &(ca, cb) in &c.quotient_edges {
            prop_assert!(ca != cb);
            let crosses = g
                .edges()
                .any(|(a, b)| c.component_of[a] == ca && c.component_of[b] == cb);
            prop_assert!(crosses);
        }
    }

    #[test]
    fn every_vertex_reachable_from_a_source_component(g in arb_graph(7)) {
        let c = condense(&g);
        let sources = c.source_components();
        prop_assert!(!sources.is_empty());
        for v in g.vertices() {
            let reached = sources.iter().any(|&s| {
                c.components[s].iter().any(|w| w == v || g.has_path(w, v).unwrap())
            });
            prop_assert!(reached, "{} unreachable from every source component", v);
        }
    }

    #[test]
    fn johnson_matches_brute_force(g in arb_graph(6)) {
        let cycles = minimal_cycles(&g);
        let sets: BTreeSet<VertexSet> = cycles.iter().map(|c| c.members.clone()).collect();
        prop_assert_eq!(sets.len(), cycles.len());
        prop_assert_eq!(sets, brute_force_cycle_sets(&g));
        for c in &cycles {
            let seq: Vec<usize> = c.witness.iter().map(|v| g.index_of(v).unwrap()).collect();
            prop_assert_eq!(seq.len(), c.members.len());
            for k in 0..seq.len() {
                prop_assert!(g.has_edge(seq[k], seq[(k + 1) % seq.len()]));
            }
        }
    }

    #[test]
    fn filling_checkers_agree((g, set) in arb_graph_and_subset(7)) {
        let analysis = FillingAnalysis::new(&g);
        let by_def = closure_by_definition(&g, &set, false) == g.vertex_set();
        prop_assert_eq!(is_filling(&g, &set, Mode::Complete).unwrap(), by_def);
        prop_assert_eq!(analysis.is_filling_by_cycles(&set).unwrap(), by_def);
        prop_assert_eq!(analysis.is_filling_by_dag(&set).unwrap(), by_def);

        let p_by_def = closure_by_definition(&g, &set, true) == g.vertex_set();
        prop_assert_eq!(is_filling(&g, &set, Mode::Partial).unwrap(), p_by_def);
        prop_assert_eq!(analysis.is_p_filling_by_scc(&set).unwrap(), p_by_def);
        prop_assert_eq!(analysis.is_p_filling_by_path(&set).unwrap(), p_by_def);
    }

    #[test]
    fn inclusion_minimal_cycles_give_same_verdict((g, set) in arb_graph_and_subset(7)) {
        let strict = inclusion_minimal(&minimal_cycles(&g));
        let verdict = g.sources().is_subset(&set) && strict.iter().all(|c| c.intersects(&set));
        prop_assert_eq!(verdict, is_filling(&g, &set, Mode::Complete).unwrap());
    }

    #[test]
    fn closure_is_a_closure_operator((g, set) in arb_graph_and_subset(7)) {
        for mode in [Mode::Complete, Mode::Partial] {
            let trace = closure(&g, &set, mode).unwrap();
            let cl = &trace.fixed_point;
            prop_assert!(set.is_subset(cl));
            prop_assert_eq!(&closure(&g, cl, mode).unwrap().fixed_point, cl);
            prop_assert_eq!(cl, &closure_by_definition(&g, &set, mode == Mode::Partial));
            prop_assert_eq!(&trace.stages[0], &set);
            for pair in trace.stages.windows(2) {
                prop_assert!(pair[0].is_subset(&pair[1]) && pair[0].len() < pair[1].len());
            }
            prop_assert!(trace.stages.len() <= g.len() - set.len() + 1);
            for v in g.vertices() {
                let mut bigger = set.clone();
                bigger.insert(v.clone());
                prop_assert!(cl.is_subset(&closure(&g, &bigger, mode).unwrap().fixed_point));
            }
        }
        let complete = closure(&g, &set, Mode::Complete).unwrap().fixed_point;
        let partial = closure(&g, &set, Mode::Partial).unwrap().fixed_point;
        prop_assert!(complete.is_subset(&partial));
    }

    #[test]
    fn greedy_is_a_filling_set(g in arb_graph(7)) {
        let greedy = greedy_min_filling(&g);
        prop_assert!(is_filling(&g, &greedy, Mode::Complete).unwrap());
        let exact = exact_min_fillings(&g, Mode::Complete).unwrap();
        let smallest = exact.iter().map(VertexSet::len).min().unwrap();
        prop_assert!(greedy.len() >= smallest);
        prop_assert!(g.sources().is_subset(&greedy));
    }

    #[test]
    fn exact_fillings_match_brute_force(g in arb_graph(6)) {
        for mode in [Mode::Complete, Mode::Partial] {
            let exact: BTreeSet<VertexSet> =
                exact_min_fillings(&g, mode).unwrap().into_iter().collect();
            let brute = brute_force_minimal(&g, |s| {
                closure_by_definition(&g, s, mode == Mode::Partial) == g.vertex_set()
            });
            prop_assert_eq!(exact, brute);
        }
    }

    #[test]
    fn minimal_p_fillings_have_equal_cardinality(g in arb_graph(7)) {
        let expected = condense(&g).source_components().len();
        let fillings = exact_min_fillings(&g, Mode::Partial).unwrap();
        prop_assert!(!fillings.is_empty());
        for f in &fillings {
            prop_assert_eq!(f.len(), expected);
        }
        let chosen = min_p_filling(&g);
        prop_assert_eq!(chosen.len(), expected);
        prop_assert!(is_p_filling_by_scc(&g, &chosen).unwrap());
    }

    #[test]
    fn suggestions_complete_the_set((g, set) in arb_graph_and_subset(7)) {
        for mode in [Mode::Complete, Mode::Partial] {
            let extra = suggest_additional(&g, &set, mode).unwrap();
            prop_assert!(extra.is_disjoint(&set));
            let already = is_filling(&g, &set, mode).unwrap();
            prop_assert_eq!(extra.is_empty(), already);
            let union: VertexSet = set.union(&extra).cloned().collect();
            prop_assert!(is_filling(&g, &union, mode).unwrap());
        }
    }

    #[test]
    fn free_checkers_match_cached_analysis((g, set) in arb_graph_and_subset(6)) {
        let analysis = FillingAnalysis::new(&g);
        prop_assert_eq!(is_filling_by_cycles(&g, &set).unwrap(), analysis.is_filling_by_cycles(&set).unwrap());
        prop_assert_eq!(is_filling_by_dag(&g, &set).unwrap(), analysis.is_filling_by_dag(&set).unwrap());
        prop_assert_eq!(is_p_filling_by_path(&g, &set).unwrap(), analysis.is_p_filling_by_path(&set).unwrap());
        prop_assert!(filling::dtm(&g, &set).unwrap().is_subset(&filling::pdtm(&g, &set).unwrap()));
    }
}

#[test]
fn graph_doc_round_trips() {
    for g in random_graphs(7, 50, 1, 8) {
        let doc = g.to_doc();
        let json = serde_json::to_string(&doc).unwrap();
        let back: autofill_core::GraphDoc = serde_json::from_str(&json).unwrap();
        assert_eq!(DepGraph::from_doc(&back).unwrap(), g);
    }
}
