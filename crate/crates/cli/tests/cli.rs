//! End-to-end checks of the command-line interface: exit codes, report
//! determinism, format toggles, and the cache admin cycle.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::{Command, Output};

fn flagcalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flagcalc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn flagcalc_with_cache(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flagcalc"))
        .args(args)
        .env("FLAGCALC_CACHE_DIR", cache)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

/// Text-format reports parse into a flat key -> value map; heredoc blocks
/// collapse to their inner text.
fn parse_text_report(text: &str) -> BTreeMap<String, String> {
    let mut map = BTreeMap::new();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("flagcalc-report v1"));
    while let Some(line) = lines.next() {
        let (k, v) = line.split_once(" = ").expect("key = value line");
        if v == "<<<" {
            let mut block = String::new();
            for inner in lines.by_ref() {
                if inner == ">>>" {
                    break;
                }
                block.push_str(inner);
                block.push('\n');
            }
            map.insert(k.to_string(), block);
        } else {
            map.insert(k.to_string(), v.to_string());
        }
    }
    map
}

fn strip_timing(text: &str) -> String {
    text.lines()
        .filter(|l| !l.starts_with("timing.ms") && !l.contains("\"timing.ms\""))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn validation_errors_exit_one() {
    let out = flagcalc(&["basis", "--space", "gr:2,4", "--deg", "5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exceeds dim"));

    let out = flagcalc(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(1));

    let out = flagcalc(&["basis", "--space", "gr:2,4", "--deg", "1", "--bogus"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn basis_lists_selected_codimension() {
    let out = flagcalc(&["basis", "--space", "full-flag:3", "--deg", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let report = parse_text_report(&stdout(&out));
    assert_eq!(report["result.count"], "2");
    assert_eq!(report["result.basis"], "[2,1,3] [1,3,2]");
}

#[test]
fn mult_accepts_permutations_and_named_cycles() {
    let by_name = flagcalc(&["mult", "--space", "gr:2,4", "--u", "D2", "--v", "D2"]);
    assert_eq!(by_name.status.code(), Some(0));
    let by_perm = flagcalc(&[
        "mult", "--space", "gr:2,4", "--u", "1,3,2,4", "--v", "1,3,2,4",
    ]);
    let ra = parse_text_report(&stdout(&by_name));
    let rb = parse_text_report(&stdout(&by_perm));
    assert_eq!(ra["result.class"], rb["result.class"]);
    assert_eq!(ra["result.class"], "s[2,3,1,4] + s[1,4,2,3]");
}

#[test]
fn expand_reduces_modulo_coinvariants() {
    let out = flagcalc(&["expand", "--poly", "x1^2 + x2^2 + x3^2", "--n", "3"]);
    let report = parse_text_report(&stdout(&out));
    assert_eq!(report["result.expansion"], "0");
    assert_eq!(report["result.terms"], "0");

    let out = flagcalc(&["expand", "--poly", "x1^2"]);
    let report = parse_text_report(&stdout(&out));
    assert_eq!(report["result.expansion"], "[3,1,2]");
}

#[test]
fn reports_are_deterministic_modulo_timing() {
    let args = ["obstruct", "--m", "2", "--n", "4", "--target", "full-flag"];
    let a = flagcalc(&args);
    let b = flagcalc(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(strip_timing(&stdout(&a)), strip_timing(&stdout(&b)));

    let aj = flagcalc(&[&args[..], &["--format", "json"]].concat());
    let bj = flagcalc(&[&args[..], &["--format", "json"]].concat());
    assert_eq!(strip_timing(&stdout(&aj)), strip_timing(&stdout(&bj)));
}

#[test]
fn text_and_json_reports_carry_the_same_payload() {
    let args = ["obstruct", "--m", "2", "--n", "4", "--target", "full-flag"];
    let text = parse_text_report(&stdout(&flagcalc(&args)));
    let json_out = stdout(&flagcalc(&[&args[..], &["--format", "json"]].concat()));
    let json: serde_json::Value = serde_json::from_str(&json_out).expect("valid json");
    let obj = json.as_object().expect("object");
    assert_eq!(text.len(), obj.len());
    for (k, v) in &text {
        let jv = &obj[k];
        let js = match jv {
            serde_json::Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        if k == "timing.ms" {
            continue;
        }
        assert_eq!(&js, v, "field {}", k);
    }
}

#[test]
fn obstruct_reports_round_trippable_payloads() {
    let out = flagcalc(&["obstruct", "--m", "3", "--target", "minimal:1,4"]);
    let report = parse_text_report(&stdout(&out));
    assert_eq!(report["result.verdict"], "nonexistence-certified");
    let system =
        flagcalc_core::obstruct::PullbackSystem::parse(&report["payload.system"]).unwrap();
    assert_eq!(system.m(), 3);
    let verdict = flagcalc_core::obstruct::Verdict::parse(&report["payload.verdict"]).unwrap();
    match verdict {
        flagcalc_core::obstruct::Verdict::NonexistenceCertified(cert) => {
            assert!(flagcalc_core::obstruct::verify_certificate(&system, &cert).unwrap());
        }
        other => panic!("expected certified verdict, got {}", other),
    }
}

#[test]
fn construct_validates_and_serialises_points() {
    let out = flagcalc(&[
        "construct", "--n", "5", "--j", "2", "--samples", "10", "--seed", "7",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report = parse_text_report(&stdout(&out));
    assert_eq!(report["result.all-valid"], "true");
    assert_eq!(report["result.perp-containment"], "true");
    assert_eq!(report["result.nonconstant"], "true");
    let pt = flagcalc_core::geometry::FlagPoint::parse(&report["payload.first-point"]).unwrap();
    assert!(flagcalc_core::geometry::validate_flag(&pt));

    // repeated runs with the same seed are identical
    let again = flagcalc(&[
        "construct", "--n", "5", "--j", "2", "--samples", "10", "--seed", "7",
    ]);
    assert_eq!(strip_timing(&stdout(&out)), strip_timing(&stdout(&again)));

    // out-of-range j is a validation error
    let bad = flagcalc(&["construct", "--n", "4", "--j", "3", "--samples", "2"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn verify_lemmas_passes_and_reports_rows() {
    let out = flagcalc(&["verify-lemmas", "--n", "4..5"]);
    assert_eq!(out.status.code(), Some(0));
    let report = parse_text_report(&stdout(&out));
    assert_eq!(report["result.all"], "PASS");
    assert_eq!(report["check.n4.k2.e1-product.gr"], "PASS");
    assert_eq!(report["check.n5.k2.e2-product.full"], "PASS");
}

#[test]
fn cache_cycle_build_verify_corrupt_clear() {
    let dir = tempfile::tempdir().unwrap();
    let out = flagcalc_with_cache(&["cache", "build", "--n", "4"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = parse_text_report(&stdout(&out));
    assert_eq!(report["result.files"], "4");

    let out = flagcalc_with_cache(
        &["cache", "verify", "--percent", "100"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let report = parse_text_report(&stdout(&out));
    assert_eq!(report["result.status"], "PASS");

    // cached runs load tables
    let out = flagcalc_with_cache(
        &["obstruct", "--m", "2", "--n", "4", "--target", "full-flag"],
        dir.path(),
    );
    let report = parse_text_report(&stdout(&out));
    assert_eq!(report["cache.status"], "tables-loaded:4");

    // corrupt one data coefficient: verify must exit 2 and name the key
    let victim = dir.path().join("sc-n4-d1x1.tbl");
    let text = std::fs::read_to_string(&victim).unwrap();
    let mut lines: Vec<String> = text.lines().map(|s| s.to_string()).collect();
    let idx = lines
        .iter()
        .rposition(|l| l.split_whitespace().count() == 4 && l.contains(','))
        .expect("a data line exists");
    let mut parts: Vec<String> = lines[idx].split_whitespace().map(|s| s.to_string()).collect();
    parts[3] = "99".to_string();
    lines[idx] = parts.join(" ");
    std::fs::write(&victim, lines.join("\n") + "\n").unwrap();
    let out = flagcalc_with_cache(&["cache", "verify", "--percent", "100"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cache mismatch"));

    let out = flagcalc_with_cache(&["cache", "clear"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let report = parse_text_report(&stdout(&out));
    assert_eq!(report["result.removed"], "4");
}

#[test]
fn help_exits_zero() {
    let out = flagcalc(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("Usage"));
}
