use std::collections::BTreeMap;

use autofill_core::form::expr::BinOp;
use autofill_core::form::{autofill, parse_form_spec, suggest, Expr, FieldKind, FieldValue, FillStatus, FormSpec};
use autofill_core::{closure_with, VertexId, VertexSet};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SPECS: &[(&str, &[u8])] = &[
    ("weight", include_bytes!("../examples/weight.json")),
    ("weight-partial", include_bytes!("../examples/weight-partial.json")),
    ("pregnant", include_bytes!("../examples/pregnant.json")),
    ("path3", include_bytes!("../examples/path3.json")),
    ("k3", include_bytes!("../examples/k3.json")),
    ("edgeless", include_bytes!("../examples/edgeless.json")),
];

fn load(idx: usize) -> FormSpec {
    parse_form_spec(SPECS[idx].1).unwrap_or_else(|e| panic!("{}: {e}", SPECS[idx].0))
}

fn sample_value(spec: &FormSpec, id: &VertexId) -> FieldValue {
    let decl = spec.field(id).unwrap();
    match &decl.kind {
        FieldKind::Enum { values } => FieldValue::Symbol(values[0].clone()),
        _ => decl.parse_value("1").unwrap(),
    }
}

fn input_for(spec: &FormSpec, mask: &[bool]) -> BTreeMap<VertexId, FieldValue> {
    spec.fields
        .iter()
        .zip(mask)
        .filter(|(_, &on)| on)
        .map(|(f, _)| (f.id.clone(), sample_value(spec, &f.id)))
        .collect()
}

fn arb_case() -> impl Strategy<Value = (usize, Vec<bool>)> {
    (0..SPECS.len()).prop_flat_map(|i| {
        let n = load(i).fields.len();
        (Just(i), prop::collection::vec(any::<bool>(), n))
    })
}

fn arb_name() -> impl Strategy<Value = VertexId> {
    prop::sample::select(vec!["Age", "Height", "x_1", "1", "two words", "if"]).prop_map(VertexId::from)
}

fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0u32..2000, 0u32..4).prop_map(|(n, q)| Expr::Num(f64::from(n) + f64::from(q) / 4.0)),
        arb_name().prop_map(Expr::Ref),
        arb_name().prop_map(Expr::Missing),
    ];
    leaf.prop_recursive(4, 32, 3, |inner| {
        let op = prop::sample::select(vec![
            BinOp::Add,
            BinOp::Sub,
            BinOp::Mul,
            BinOp::Div,
            BinOp::Lt,
            BinOp::Le,
            BinOp::Gt,
            BinOp::Ge,
            BinOp::Eq,
            BinOp::Ne,
            BinOp::And,
            BinOp::Or,
        ]);
        prop_oneof![
            inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
            inner.clone().prop_map(|e| Expr::Not(Box::new(e))),
            inner.clone().prop_map(|e| Expr::Floor(Box::new(e))),
            (op, inner.clone(), inner.clone()).prop_map(|(op, a, b)| Expr::Binary(op, Box::new(a), Box::new(b))),
            (prop::collection::vec((inner.clone(), inner.clone()), 1..3), inner)
                .prop_map(|(branches, otherwise)| Expr::If { branches, otherwise: Box::new(otherwise) }),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn expression_display_round_trips(e in arb_expr()) {
        let printed = e.to_string();
        let reparsed = Expr::parse(&printed).map_err(|err| TestCaseError::fail(format!("{printed}: {err}")))?;
        prop_assert_eq!(&reparsed, &e, "printed as {}", printed);
        prop_assert_eq!(reparsed.to_string(), printed);
    }

    #[test]
    fn autofill_fills_exactly_the_closure((idx, mask) in arb_case()) {
        let spec = load(idx);
        let input = input_for(&spec, &mask);
        let report = autofill(&spec, &input).unwrap();
        let provided: VertexSet = input.keys().cloned().collect();
        let trace = closure_with(&spec.induced_graph(), &provided, |v| spec.mode_of(v)).unwrap();
        let filled: VertexSet = report.values.keys().cloned().collect();
        prop_assert_eq!(&filled, &trace.fixed_point);
        prop_assert_eq!(report.status == FillStatus::Filled, trace.filled);
        prop_assert_eq!(report.trace.len(), filled.len() - provided.len());
        let last_stage = report.trace.iter().map(|t| t.stage).max().unwrap_or(0);
        prop_assert_eq!(last_stage + 1, trace.stages.len());
        for (id, v) in &input {
            prop_assert_eq!(&report.values[id].value, v);
        }
        prop_assert_eq!(&report.suggestions, &suggest(&spec, &provided).unwrap());
    }

    #[test]
    fn autofill_is_deterministic_and_order_free(
        (idx, mask) in arb_case(),
        seed in any::<u64>(),
    ) {
        let spec = load(idx);
        let input = input_for(&spec, &mask);
        let first = autofill(&spec, &input).unwrap();
        prop_assert_eq!(&autofill(&spec, &input).unwrap(), &first);

        let mut shuffled = spec.clone();
        shuffled.rules.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(&autofill(&shuffled, &input).unwrap(), &first);
    }
}

#[test]
fn form_specs_round_trip_through_json() {
    for (idx, (name, _)) in SPECS.iter().enumerate() {
        let spec = load(idx);
        let text = spec.to_json_string();
        assert_eq!(parse_form_spec(text.as_bytes()).unwrap(), spec, "{name}");
    }
}
