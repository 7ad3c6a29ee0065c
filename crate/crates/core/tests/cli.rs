//! End-to-end tests of the `robust-appt` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_robust-appt")).args(args).env_remove("ROBUST_APPT_THREADS").output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn f64s(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

#[test]
fn estimate_matches_golden_outputs() {
    for name in ["single", "hundred", "two"] {
        let out = run(&["estimate", p(&fixture(&format!("{name}.csv")))]);
        assert_eq!(code(&out), 0, "{name}");
        let golden: Value =
            serde_json::from_str(&std::fs::read_to_string(fixture(&format!("golden/estimate_{name}.json"))).unwrap()).unwrap();
        assert_eq!(json(&out), golden, "{name}");
    }
}

#[test]
fn estimate_errors_exit_nonzero() {
    assert_eq!(code(&run(&["estimate", "/no/such/file.csv"])), 2);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "exam_type,day,start,completion\nMRI,2019-01-01,09:00:00,08:00:00\n").unwrap();
    let out = run(&["estimate", p(&bad)]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("row 1"));
}

#[test]
fn plateau_schedule_and_interapp_series() {
    let out = run(&["solve", p(&fixture("ten_identical.json")), "--method", "pta"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["seed"], 42);
    assert_eq!(v["optimal"], true);
    let start = f64s(&v["schedule"]["start"]);
    let gaps: Vec<f64> = start.windows(2).map(|w| w[1] - w[0]).collect();
    assert_eq!(gaps[..2], [0.0, 20.0]);
    assert!(gaps[2..].iter().all(|g| *g == 25.0));

    let out = run(&["interapp", p(&fixture("ten_identical.json")), "--method", "pta"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "i,gap");
    assert_eq!(lines[1], "1,0.000000");
    assert_eq!(lines[2], "2,20.000000");
    assert_eq!(lines.len(), 10);

    let out = run(&["interapp", p(&fixture("single_customer.json")), "--method", "pta"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "i,gap");
}

#[test]
fn remark_instance_has_zero_cost() {
    let out = run(&["solve", p(&fixture("remark.json")), "--method", "milp0"]);
    assert_eq!(code(&out), 0);
    assert!(json(&out)["objective"].as_f64().unwrap().abs() < 1e-6);
}

#[test]
fn heavy_waiting_cost_gives_zero_wait() {
    let out = run(&["solve", p(&fixture("single_customer.json")), "--method", "wsras", "--cw", "1e6"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(f64s(&v["schedule"]["start"]), vec![0.0]);
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("s.json");
    std::fs::write(&s, serde_json::to_string(&v).unwrap()).unwrap();
    let adv = json(&run(&["adversary", p(&s), p(&fixture("single_customer.json"))]));
    assert_eq!(f64s(&adv["worst_wait"]), vec![0.0]);
}

#[test]
fn solve_output_round_trips_through_audit() {
    let dir = tempfile::tempdir().unwrap();
    for method in ["pta", "asap", "milp0", "milp", "exact", "saa"] {
        let out_path = dir.path().join(format!("{method}.json"));
        let out = run(&["solve", p(&fixture("mixed.json")), "--method", method, "--out", p(&out_path)]);
        assert_eq!(code(&out), 0, "{method}: {}", String::from_utf8_lossy(&out.stderr));
        let solved: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
        let audit = run(&["audit", p(&out_path), p(&fixture("mixed.json")), "--scenarios", "500"]);
        assert_eq!(code(&audit), 0, "{method}");
        let a = json(&audit);
        let worst = a["worst_case"]["value"].as_f64().unwrap();
        assert!((worst - solved["worst_case_cost"].as_f64().unwrap()).abs() <= 1e-6, "{method}");
        if method != "saa" {
            assert!((worst - solved["objective"].as_f64().unwrap()).abs() <= 1e-6, "{method}");
        }
        assert_eq!(a["empirical"]["guarantee_met_share"].as_f64().unwrap(), 1.0);
    }
}

#[test]
fn audit_reports_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"perm":[1,2,3,4],"start":[0,0,0,0]}"#).unwrap();
    let out = run(&["audit", p(&bad), p(&fixture("mixed.json"))]);
    assert_eq!(code(&out), 5);
    let v = json(&out);
    assert_eq!(v["feasibility"]["feasible"], false);
    assert!(!v["feasibility"]["violations"].as_array().unwrap().is_empty());
    assert!(v.get("empirical").is_none());

    let good = dir.path().join("good.json");
    let solved = run(&["solve", p(&fixture("ten_identical.json")), "--method", "pta", "--out", p(&good)]);
    assert_eq!(code(&solved), 0);
    let out = run(&["audit", p(&good), p(&fixture("ten_identical.json")), "--replay", p(&fixture("out_of_box.json"))]);
    assert_eq!(code(&out), 0);
    let e = &json(&out)["empirical"];
    assert!(e["guarantee_met_share"].as_f64().unwrap() < 1.0);
    assert_eq!(e["out_of_box"], 2);
    assert!(!e["violations"].as_array().unwrap().is_empty());
}

#[test]
fn error_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let k8 = dir.path().join("k8.json");
    let text = std::fs::read_to_string(fixture("ten_identical.json")).unwrap().replace("\"show_count\":10", "\"show_count\":8");
    std::fs::write(&k8, text).unwrap();
    let out = run(&["solve", p(&k8), "--method", "pta"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("show_count"));

    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, r#"{"n":2,"service_lb":[1]}"#).unwrap();
    assert_eq!(code(&run(&["solve", p(&broken)])), 2);

    let out = run(&["solve", p(&fixture("ten_identical.json")), "--method", "milp0", "--time-limit", "0.5"]);
    assert_eq!(code(&out), 4);
    let v = json(&out);
    assert_eq!(v["status"], "time-limit");
    assert_eq!(v["feasible"], true);
    assert!(v["bound"].as_f64().unwrap() <= v["objective"].as_f64().unwrap() + 1e-6);
}

#[test]
fn compare_degenerate_instance_agrees() {
    let out = run(&["compare", p(&fixture("remark.json")), "--cw-list", "0,1,10", "--scenarios", "50"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    let costs: Vec<f64> = rows.iter().map(|r| r["total_cost"].as_f64().unwrap()).collect();
    assert!(costs.iter().all(|c| (c - costs[0]).abs() < 1e-6), "{costs:?}");
}

#[test]
fn compare_weighted_sum_idle_grows_with_waiting_cost() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("cmp.csv");
    let out = run(&[
        "compare",
        p(&fixture("mixed.json")),
        "--cw-list",
        "0,0.5,2,10",
        "--scenarios",
        "300",
        "--csv",
        p(&csv),
    ]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let rows = v["rows"].as_array().unwrap();
    let idle: Vec<f64> = rows
        .iter()
        .filter(|r| r["leg"].as_str().unwrap().starts_with("wsras"))
        .map(|r| r["total_idle"].as_f64().unwrap())
        .collect();
    assert!(idle.windows(2).all(|w| w[1] >= w[0] - 1e-6), "{idle:?}");
    assert_eq!(rows[0]["robust_feasible"], true);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("leg,cw,status"));
    assert_eq!(text.lines().count(), 1 + rows.len());
}

#[test]
fn compare_isolates_failing_legs() {
    let dir = tempfile::tempdir().unwrap();
    let k3 = dir.path().join("k3.json");
    let text = std::fs::read_to_string(fixture("mixed.json")).unwrap().replace("\"show_count\":4", "\"show_count\":3");
    std::fs::write(&k3, text).unwrap();
    let out = run(&["compare", p(&k3), "--scenarios", "20"]);
    assert_eq!(code(&out), 0);
    let rows = json(&out)["rows"].as_array().unwrap().clone();
    assert!(rows[0]["error"].is_null());
    assert!(rows[1..].iter().all(|r| !r["error"].is_null()));
}

#[test]
fn generate_then_solve() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("t.json");
    assert_eq!(code(&run(&["estimate", p(&fixture("hundred.csv")), "--out", p(&table)])), 0);
    let inst = dir.path().join("i.json");
    let out = run(&[
        "generate",
        "--records",
        p(&fixture("hundred.csv")),
        "--intervals",
        p(&table),
        "--n",
        "4",
        "--noshow-rate",
        "0.2",
        "--wait",
        "10",
        "--cost-tag",
        "decreasing",
        "--out",
        p(&inst),
    ]);
    assert_eq!(code(&out), 0);
    let g: Value = serde_json::from_str(&std::fs::read_to_string(&inst).unwrap()).unwrap();
    assert_eq!(g["instance"]["show_count"], 3);
    assert_eq!(g["instance"]["horizon"].as_f64().unwrap(), 4.0 * 90.0 - 10.0);
    assert_eq!(g["provenance"]["cost_tag"], "decreasing");
    let out = run(&["solve", p(&inst), "--method", "exact"]);
    assert_eq!(code(&out), 0);
    let out = run(&["audit", p(&inst), p(&inst)]);
    assert_eq!(code(&out), 2);
}

#[test]
fn verify_passes_on_fixture() {
    let out = run(&["verify", p(&fixture("mixed.json")), "--samples", "2000", "--optimum"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(json(&out)["passed"], true);
}

#[test]
fn directory_batch_and_thread_cap() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in");
    std::fs::create_dir(&input).unwrap();
    for name in ["remark.json", "mixed.json", "single_customer.json"] {
        std::fs::copy(fixture(name), input.join(name)).unwrap();
    }
    let out_dir = dir.path().join("out");
    let out = Command::new(env!("CARGO_BIN_EXE_robust-appt"))
        .args(["solve", p(&input), "--method", "exact", "--out", p(&out_dir)])
        .env("ROBUST_APPT_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(std::fs::read_dir(&out_dir).unwrap().count(), 3);
}

#[test]
fn lp_export() {
    let dir = tempfile::tempdir().unwrap();
    let lp = dir.path().join("m.lp");
    let out = run(&["solve", p(&fixture("remark.json")), "--method", "milp0", "--lp-out", p(&lp)]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&lp).unwrap();
    assert!(text.contains("Minimize") && text.contains("Binar"));
}
