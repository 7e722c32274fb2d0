//! Golden-file cases for the `autofill` binary. Each case runs from the
//! `crates/` directory and its combined output lives in
//! `tests/golden/<name>.txt`. Set `UPDATE_GOLDEN=1` to rewrite them.

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

pub struct Case {
    pub name: &'static str,
    pub args: &'static [&'static str],
    pub exit: i32,
}

const fn case(name: &'static str, args: &'static [&'static str], exit: i32) -> Case {
    Case { name, args, exit }
}

const WEIGHT: &str = "core/examples/weight.json";
const PREGNANT: &str = "core/examples/pregnant.json";
const PATH3: &str = "core/examples/path3.json";
const K3: &str = "core/examples/k3.json";

pub const CASES: &[Case] = &[
    case("weight-analyze", &["analyze", WEIGHT], 0),
    case("weight-analyze-exact-json", &["analyze", WEIGHT, "--exact", "--json"], 0),
    case("weight-check-sex-age", &["check", WEIGHT, "--provided", "Sex,Age", "--mode", "complete"], 0),
    case("weight-check-sex", &["check", WEIGHT, "--provided", "Sex", "--mode", "complete"], 1),
    case("weight-check-sex-partial", &["check", WEIGHT, "--provided", "Sex", "--mode", "partial"], 0),
    case("weight-check-sex-age-json", &["check", WEIGHT, "--provided", "Sex,Age", "--mode", "complete", "--json"], 0),
    case("weight-check-spec-modes", &["check", WEIGHT, "--provided", "Sex"], 1),
    case("weight-partial-check-sex", &["check", "core/examples/weight-partial.json", "--provided", "Sex"], 0),
    case("weight-check-unknown", &["check", WEIGHT, "--provided", "Sex,Weight"], 2),
    case("weight-suggest-sex", &["suggest", WEIGHT, "--provided", "Sex", "--mode", "complete"], 1),
    case("weight-suggest-sex-height", &["suggest", WEIGHT, "--provided", "Sex,Height"], 0),
    case("weight-suggest-partial", &["suggest", WEIGHT, "--mode", "partial"], 1),
    case("weight-suggest-empty-json", &["suggest", WEIGHT, "--mode", "complete", "--json"], 1),
    case("weight-fill-sex-age", &["fill", WEIGHT, "--set", "Sex=1", "--set", "Age=40"], 0),
    case("weight-fill-sex-height", &["fill", WEIGHT, "--set", "Sex=1", "--set", "Height=160"], 0),
    case("weight-fill-sex", &["fill", WEIGHT, "--set", "Sex=0"], 1),
    case("weight-fill-sex-age-json", &["fill", WEIGHT, "--set", "Sex=1", "--set", "Age=40", "--json"], 0),
    case("weight-fill-out-of-range", &["fill", WEIGHT, "--set", "Sex=2"], 2),
    case("weight-fill-not-a-number", &["fill", WEIGHT, "--set", "Age=old"], 2),
    case("weight-fill-unknown", &["fill", WEIGHT, "--set", "Weight=70"], 2),
    case("pregnant-analyze-exact", &["analyze", PREGNANT, "--exact"], 0),
    case("pregnant-analyze-json", &["analyze", PREGNANT, "--json"], 0),
    case("pregnant-check-pregnant", &["check", PREGNANT, "--provided", "Pregnant", "--mode", "complete"], 0),
    case("pregnant-check-height", &["check", PREGNANT, "--provided", "Height", "--mode", "complete"], 1),
    case("pregnant-suggest-empty", &["suggest", PREGNANT, "--mode", "complete"], 1),
    case("pregnant-suggest-partial", &["suggest", PREGNANT, "--mode", "partial"], 1),
    case("pregnant-fill-pregnant", &["fill", PREGNANT, "--set", "Pregnant=1"], 0),
    case("pregnant-fill-sex-age", &["fill", PREGNANT, "--set", "Sex=1", "--set", "Age=40"], 0),
    case("path3-analyze-exact", &["analyze", PATH3, "--exact"], 0),
    case("path3-check-1", &["check", PATH3, "--provided", "1", "--mode", "complete"], 1),
    case("path3-check-1-partial", &["check", PATH3, "--provided", "1", "--mode", "partial"], 0),
    case("path3-check-2", &["check", PATH3, "--provided", "2", "--mode", "complete"], 0),
    case("path3-check-1-3", &["check", PATH3, "--provided", "1,3", "--mode", "complete"], 0),
    case("path3-suggest-1", &["suggest", PATH3, "--provided", "1", "--mode", "complete"], 1),
    case("path3-fill-2", &["fill", PATH3, "--set", "2=5"], 0),
    case("path3-fill-1-3-json", &["fill", PATH3, "--set", "1=2", "--set", "3=4", "--json"], 0),
    case("k3-analyze-exact", &["analyze", K3, "--exact"], 0),
    case("k3-check-0", &["check", K3, "--provided", "0", "--mode", "complete"], 1),
    case("k3-check-0-1", &["check", K3, "--provided", "0,1", "--mode", "complete"], 0),
    case("k3-suggest-0", &["suggest", K3, "--provided", "0"], 1),
    case("k3-fill-0-1", &["fill", K3, "--set", "0=1", "--set", "1=2"], 0),
    case("k3-fill-0", &["fill", K3, "--set", "0=3"], 1),
    case("missing-spec", &["analyze", "core/examples/absent.json"], 2),
    case("broken-spec", &["check", "cli/tests/fixtures/broken.json"], 2),
    case("wide-analyze", &["analyze", "cli/tests/fixtures/wide.json"], 0),
    case("wide-analyze-exact", &["analyze", "cli/tests/fixtures/wide.json", "--exact"], 3),
];

fn crates_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).parent().unwrap().to_path_buf()
}

pub fn golden_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.txt"))
}

/// Runs the binary and renders stdout, stderr and the exit status as one
/// transcript.
pub fn run(args: &[&str]) -> (String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_autofill"))
        .args(args)
        .current_dir(crates_dir())
        .output()
        .expect("binary runs");
    let code = out.status.code().expect("exited normally");
    let mut text = String::from_utf8(out.stdout).unwrap();
    let stderr = String::from_utf8(out.stderr).unwrap();
    if !stderr.is_empty() {
        text.push_str("--- stderr\n");
        text.push_str(&stderr);
    }
    text.push_str(&format!("--- exit {code}\n"));
    (text, code)
}

/// Compares one case against its golden file; returns a description of
/// the first mismatch.
pub fn check_case(case: &Case) -> Result<(), String> {
    let (actual, code) = run(case.args);
    if code != case.exit {
        return Err(format!("{}: exit {code}, expected {}", case.name, case.exit));
    }
    let path = golden_path(case.name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &actual).unwrap();
        return Ok(());
    }
    let expected = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    if expected == actual {
        Ok(())
    } else {
        Err(format!("{}: output differs\n--- expected\n{expected}--- actual\n{actual}", case.name))
    }
}
