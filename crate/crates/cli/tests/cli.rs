use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use distvote_core::io::{parse_instance, Instance};
use distvote_core::{DistortionReport, MechanismOutcome, TieRule};

fn distvote(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_distvote"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn text(out: &Output) -> String {
    format!(
        "{}{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    )
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn file(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_base_case_reports_ratio_seven() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("base.json");
    let o = distvote(&["generate", "--family", "line-ordinal", "--kind", "base-case", "--q", "8", "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", text(&o));
    assert!(text(&o).contains("ratio 7"), "{}", text(&o));
    let inst = parse_instance(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(matches!(inst, Instance::Metric { tie_rule: TieRule::PerAgent { .. }, .. }));
}

#[test]
fn generate_equidistant_k3_is_close_to_five() {
    let o = distvote(&["--format", "json", "generate", "--family", "equidistant", "--k", "3", "--lambda", "2", "--eps", "0.01"]);
    assert_eq!(code(&o), 0, "{}", text(&o));
    // instance on stdout, summary on stderr
    parse_instance(&String::from_utf8_lossy(&o.stdout)).unwrap();
    let summary: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    let ratio = summary["ratio"].as_f64().unwrap();
    assert!((5.0 - 10.0 * 0.01..=5.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn unknown_family_exits_two() {
    assert_eq!(code(&distvote(&["generate", "--family", "nope"])), 2);
    assert_eq!(code(&distvote(&["generate", "--family", "line-ordinal", "--kind", "sideways"])), 2);
}

#[test]
fn corrupted_generator_params_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = file(dir.path(), "p.json", r#"{"family": "equidistant", "params": {"k": 3, "kk": 1}}"#);
    assert_eq!(code(&distvote(&["generate", "--params", s(&bad)])), 2);
    let junk = file(dir.path(), "q.json", "{not json");
    assert_eq!(code(&distvote(&["generate", "--params", s(&junk)])), 2);
    assert_eq!(code(&distvote(&["table", "--trials", "1", "--params", s(&junk)])), 2);
}

#[test]
fn missing_file_exits_three() {
    assert_eq!(code(&distvote(&["validate", "/nonexistent/instance.json"])), 3);
}

#[test]
fn mwo_on_rankings_only_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let p = file(dir.path(), "r.json", r#"{"n":2,"m":2,"k":1,"groups":[0,0],"rankings":[[0,1],[1,0]]}"#);
    let o = distvote(&["run", s(&p), "--mechanism", "mwo"]);
    assert_eq!(code(&o), 4, "{}", text(&o));
    assert_eq!(code(&distvote(&["run", s(&p), "--mechanism", "mwd-line"])), 4);
}

#[test]
fn mwo_on_single_group_picks_the_optimum() {
    let dir = tempfile::tempdir().unwrap();
    let p = file(
        dir.path(),
        "l.json",
        r#"{"n":3,"m":3,"k":1,"groups":[0,0,0],"line_positions":{"agents":[0.0,0.1,0.3],"alternatives":[0.2,1.0,-0.5]}}"#,
    );
    let o = distvote(&["--format", "json", "run", s(&p), "--mechanism", "mwo"]);
    assert_eq!(code(&o), 0, "{}", text(&o));
    let out: MechanismOutcome = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(out.winner, 1);
}

#[test]
fn mwd_on_ordinal_general_picks_alternative_zero() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("og.json");
    let prof = dir.path().join("og_profile.json");
    let o = distvote(&["generate", "--family", "ordinal-general", "--k", "2", "--lambda", "4", "--out", s(&inst), "--profile-out", s(&prof)]);
    assert_eq!(code(&o), 0, "{}", text(&o));
    for path in [&inst, &prof] {
        let o = distvote(&["--format", "json", "run", s(path), "--mechanism", "mwd"]);
        assert_eq!(code(&o), 0, "{}", text(&o));
        let out: MechanismOutcome = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(out.winner, 0);
        assert!(out.certificates.is_some());
    }
}

#[test]
fn veto_on_unanimous_profile_picks_common_top() {
    let dir = tempfile::tempdir().unwrap();
    let p = file(
        dir.path(),
        "u.json",
        r#"{"n":3,"m":3,"k":1,"groups":[0,0,0],"rankings":[[2,0,1],[2,1,0],[2,0,1]]}"#,
    );
    let o = distvote(&["--format", "json", "run", s(&p), "--mechanism", "veto"]);
    assert_eq!(code(&o), 0, "{}", text(&o));
    let out: MechanismOutcome = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(out.winner, 2);
}

#[test]
fn exact_distortion_respects_asserted_bound() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("eq.json");
    assert_eq!(code(&distvote(&["generate", "--family", "equidistant", "--k", "3", "--eps", "0.01", "--out", s(&inst)])), 0);
    let o = distvote(&["distort", s(&inst), "--mode", "exact", "--mechanism", "mwo", "--assert-bound", "5"]);
    assert_eq!(code(&o), 0, "{}", text(&o));
    let o = distvote(&["distort", s(&inst), "--mode", "exact", "--mechanism", "mwo", "--assert-bound", "1.5"]);
    assert_eq!(code(&o), 5, "{}", text(&o));
}

#[test]
fn lp_distortion_of_veto_on_split_profile_is_three() {
    let dir = tempfile::tempdir().unwrap();
    let p = file(
        dir.path(),
        "split.json",
        r#"{"n":4,"m":2,"k":1,"groups":[0,0,0,0],"rankings":[[0,1],[0,1],[1,0],[1,0]]}"#,
    );
    let o = distvote(&["--format", "json", "distort", s(&p), "--mode", "lp", "--mechanism", "veto"]);
    assert_eq!(code(&o), 0, "{}", text(&o));
    let r: DistortionReport = serde_json::from_slice(&o.stdout).unwrap();
    assert!((r.distortion - 3.0).abs() <= 1e-6, "{}", r.distortion);
    assert!(r.witness.is_some());
}

#[test]
fn discrete_search_over_cap_fails_loudly() {
    let dir = tempfile::tempdir().unwrap();
    let p = file(
        dir.path(),
        "big.json",
        r#"{"n":4,"m":3,"k":1,"groups":[0,0,0,0],"rankings":[[0,1,2],[1,2,0],[2,0,1],[0,2,1]]}"#,
    );
    let o = distvote(&["distort", s(&p), "--mode", "discrete", "--mechanism", "veto", "--cap", "1000"]);
    assert_ne!(code(&o), 0);
    assert!(text(&o).to_lowercase().contains("search space"), "{}", text(&o));
}

#[test]
fn quick_table_has_four_passing_rows() {
    let o = distvote(&["--format", "json", "table", "--trials", "100"]);
    assert_eq!(code(&o), 0, "{}", text(&o));
    let rows: Vec<serde_json::Value> = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r["pass"] == true));
    let csv = distvote(&["--format", "csv", "table", "--trials", "100"]);
    assert_eq!(String::from_utf8_lossy(&csv.stdout).lines().count(), 5);
}

#[test]
fn json_output_round_trips_through_the_parsers() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("r.json");
    let o = distvote(&["--seed", "7", "generate", "--family", "random-euclidean", "--n", "6", "--m", "3", "--k", "2", "--out", s(&inst)]);
    assert_eq!(code(&o), 0, "{}", text(&o));
    let parsed = parse_instance(&std::fs::read_to_string(&inst).unwrap()).unwrap();
    let report = dir.path().join("rep.json");
    let o = distvote(&["--format", "json", "distort", s(&inst), "--mechanism", "mwd", "--out", s(&report)]);
    assert_eq!(code(&o), 0, "{}", text(&o));
    let r: DistortionReport = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(serde_json::to_value(&r).unwrap(), serde_json::from_str::<serde_json::Value>(&std::fs::read_to_string(&report).unwrap()).unwrap());
    assert!(r.distortion >= 1.0);
    // the same seed regenerates the same file
    let again = dir.path().join("r2.json");
    distvote(&["--seed", "7", "generate", "--family", "random-euclidean", "--n", "6", "--m", "3", "--k", "2", "--out", s(&again)]);
    assert_eq!(parse_instance(&std::fs::read_to_string(&again).unwrap()).unwrap(), parsed);
}

#[test]
fn line_mechanisms_map_winners_back() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("line.json");
    assert_eq!(code(&distvote(&["generate", "--family", "random-line", "--n", "8", "--m", "5", "--k", "3", "--out", s(&inst)])), 0);
    for mech in ["mwo-line", "mwd-line"] {
        let o = distvote(&["--format", "json", "run", s(&inst), "--mechanism", mech]);
        assert_eq!(code(&o), 0, "{}", text(&o));
        let out: MechanismOutcome = serde_json::from_slice(&o.stdout).unwrap();
        assert!(out.winner < 5);
        let o = distvote(&["distort", s(&inst), "--mechanism", mech, "--assert-bound", if mech == "mwo-line" { "3" } else { "7" }]);
        assert_eq!(code(&o), 0, "{}", text(&o));
    }
}
