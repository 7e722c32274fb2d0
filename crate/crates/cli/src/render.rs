//! Human-readable output. Every collection is printed in id order.

use std::fmt::Write;

use autofill_core::form::{FillReport, FillStatus, FormSpec, Origin, SpecReport};
use autofill_core::{Mode, VertexId, VertexSet};
use autofill_service::CheckPayload;

fn list<'a>(ids: impl IntoIterator<Item = &'a VertexId>) -> String {
    let items: Vec<&str> = ids.into_iter().map(VertexId::as_str).collect();
    if items.is_empty() {
        "(none)".to_owned()
    } else {
        items.join(", ")
    }
}

fn braced<'a>(ids: impl IntoIterator<Item = &'a VertexId>) -> String {
    let items: Vec<&str> = ids.into_iter().map(VertexId::as_str).collect();
    format!("{{{}}}", items.join(", "))
}

fn sets<'a, I>(groups: impl IntoIterator<Item = I>) -> String
where
    I: IntoIterator<Item = &'a VertexId>,
{
    let items: Vec<String> = groups.into_iter().map(braced).collect();
    if items.is_empty() {
        "(none)".to_owned()
    } else {
        items.join(" ")
    }
}

fn table(rows: &[(&str, String)]) -> String {
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut out = String::new();
    for (key, value) in rows {
        writeln!(out, "{key:<width$}  {value}").unwrap();
    }
    out
}

fn mode_label(mode: Option<Mode>) -> &'static str {
    match mode {
        Some(Mode::Complete) => "complete mode",
        Some(Mode::Partial) => "partial mode",
        None => "modes from spec",
    }
}

pub fn analysis(report: &SpecReport) -> String {
    let a = &report.analysis;
    let mut rows = vec![
        ("form", report.name.clone()),
        ("rule mode", report.rule_mode.clone()),
        ("sources", list(&a.sources)),
        ("minimal cycles", sets(a.minimal_cycles.iter().map(|c| &c.members))),
        ("strong components", sets(&a.sccs)),
        ("source components", sets(&a.source_components)),
        ("greedy min filling", braced(&a.greedy_min_filling)),
    ];
    if let Some(exact) = &a.exact_min_fillings {
        rows.push(("exact min fillings", sets(exact)));
    }
    rows.push(("min p-filling size", a.min_p_filling_cardinality.to_string()));
    table(&rows)
}

pub fn check(result: &CheckPayload, mode: Option<Mode>) -> String {
    let mut out = String::new();
    let verdict = if result.filling { "FILLING" } else { "NOT FILLING" };
    writeln!(out, "{verdict} ({})", mode_label(mode)).unwrap();
    let rows: Vec<(String, String)> = result
        .stages
        .iter()
        .enumerate()
        .map(|(i, s)| (format!("stage {i}"), braced(s)))
        .collect();
    let borrowed: Vec<(&str, String)> = rows.iter().map(|(k, v)| (k.as_str(), v.clone())).collect();
    out.push_str(&table(&borrowed));
    if !result.filling {
        writeln!(out, "suggest  {}", list(&result.suggestions)).unwrap();
    }
    out
}

pub fn suggestions(extra: &VertexSet) -> String {
    if extra.is_empty() {
        "(none)\n".to_owned()
    } else {
        extra.iter().map(|v| format!("{v}\n")).collect()
    }
}

pub fn fill(spec: &FormSpec, report: &FillReport) -> String {
    let mut rows: Vec<[String; 3]> = vec![["field".into(), "value".into(), "origin".into()]];
    let mut ids: Vec<&VertexId> = spec.fields.iter().map(|f| &f.id).collect();
    ids.sort();
    for id in ids {
        rows.push(match report.values.get(id) {
            Some(v) => {
                let origin = match v.origin {
                    Origin::User => "user",
                    Origin::Derived => "derived",
                };
                [id.to_string(), v.value.to_string(), origin.into()]
            }
            None => [id.to_string(), "-".into(), "missing".into()],
        });
    }
    let w0 = rows.iter().map(|r| r[0].len()).max().unwrap_or(0);
    let w1 = rows.iter().map(|r| r[1].len()).max().unwrap_or(0);
    let mut out = String::new();
    for [a, b, c] in &rows {
        writeln!(out, "{a:<w0$}  {b:<w1$}  {c}").unwrap();
    }
    out.push('\n');
    let status = match report.status {
        FillStatus::Filled => "filled",
        FillStatus::Incomplete => "incomplete",
    };
    let mut summary = vec![("status", status.to_owned())];
    if report.status == FillStatus::Incomplete {
        summary.push(("suggest", list(&report.suggestions)));
    }
    out.push_str(&table(&summary));
    out
}
