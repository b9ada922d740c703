use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn lamptf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lamptf"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn lamptf_env(args: &[&str], key: &str, val: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lamptf"))
        .args(args)
        .env(key, val)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("bad JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn assert_schema(name: &str, value: &Value) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join(format!("../../docs/schemas/{name}.schema.json"));
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = validator.iter_errors(value).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{name}: {errors:?}");
}

#[test]
fn solve_thomas_fermi() {
    let out = lamptf(&["solve", "--p", "1"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_schema("solve", &v);
    let slope = v["slope"].as_f64().unwrap();
    assert!((slope + 1.588071).abs() < 1e-5, "slope {slope}");
    let (lo, hi) = (v["bracket"][0].as_f64().unwrap(), v["bracket"][1].as_f64().unwrap());
    assert!(hi - lo <= 1e-10 && lo <= slope && slope <= hi);
}

#[test]
fn solve_looser_tolerance_keeps_sign_structure() {
    let v = json(&lamptf(&["solve", "--slope-tol", "1e-3"]));
    let (lo, hi) = (v["bracket"][0].as_f64().unwrap(), v["bracket"][1].as_f64().unwrap());
    assert!(hi - lo <= 1e-3 && hi - lo > 1e-10);
    assert!(lo <= -1.5880710242 && -1.5880710242 <= hi);
    assert_eq!(v["bracket_kinds"], serde_json::json!(["Undershoot", "Overshoot"]));
}

#[test]
fn solve_writes_curve_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let stem = dir.path().join("tf");
    let out = lamptf(&["solve", "--out", stem.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let csv = std::fs::read_to_string(stem.with_extension("csv")).unwrap();
    assert!(csv.starts_with("x,y,dy\n"));
    assert!(!csv.contains('\r'));
    let first = csv.lines().nth(1).unwrap();
    assert_eq!(first.split(',').count(), 3);
    let summary: Value = serde_json::from_str(&std::fs::read_to_string(stem.with_extension("json")).unwrap()).unwrap();
    assert_schema("solve", &summary);
}

#[test]
fn usage_errors_exit_64() {
    for args in [
        vec!["solve", "--p", "-1"],
        vec!["solve", "--p", "0"],
        vec!["solve", "--format", "svg"],
        vec!["abel", "--format", "svg"],
        vec!["solve", "--slope-tol", "1e-13"],
        vec!["phase", "--window", "2", "-6", "-5", "4"],
        vec!["frobnicate"],
        vec!["solve", "--no-such-flag"],
    ] {
        assert_eq!(code(&lamptf(&args)), 64, "{args:?}");
    }
    assert_eq!(code(&lamptf_env(&["perturb"], "LAMPTF_THREADS", "0")), 64);
    assert_eq!(code(&lamptf(&["--help"])), 0);
}

#[test]
fn numeric_failure_exits_2_with_diagnostic() {
    let out = lamptf(&["solve", "--p", "20"]);
    assert_eq!(code(&out), 2);
    let v = json(&out);
    assert_schema("error", &v);
    assert!(v["error"].as_str().unwrap().contains("bracket"));
}

#[test]
fn perturb_constants() {
    let v = json(&lamptf(&["perturb"]));
    assert_schema("perturb", &v);
    assert_eq!(v["particular"]["k_p"], 144.0);
    assert_eq!(v["oscillator"]["kappa"], 12.0);
    let v = json(&lamptf(&["perturb", "--p", "inf"]));
    assert_schema("perturb", &v);
    assert_eq!(v["oscillator"]["kappa"], 2.0);
    let csv = String::from_utf8(lamptf(&["perturb", "--format", "csv"]).stdout).unwrap();
    assert!(csv.starts_with("name,value\n"));
    assert!(csv.contains("k_p,1.4400000000000000e2\n"));
}

#[test]
fn abel_verdicts() {
    for p in ["1", "2", "0.5"] {
        let out = lamptf(&["abel", "--p", p]);
        assert_eq!(code(&out), 0);
        let v = json(&out);
        assert_schema("abel", &v);
        assert_eq!(v["verdict"], "NonIntegrable", "p = {p}");
    }
    let v = json(&lamptf(&["abel"]));
    assert!((v["invariant"]["A_p"].as_f64().unwrap() - 70.0 / 27.0).abs() < 1e-14);
    assert_eq!(v["invariant"]["B_p"], -42.0);
    assert_eq!(v["cleared_condition"]["radicand"], "196");
    let csv = String::from_utf8(lamptf(&["abel", "--format", "csv"]).stdout).unwrap();
    assert!(csv.starts_with("w,alpha\n"));
    assert_eq!(csv.lines().count(), 11);
}

#[test]
fn majorana_reduction() {
    let v = json(&lamptf(&["majorana"]));
    assert_schema("majorana", &v);
    assert!(v["residual"].as_f64().unwrap() < 1e-4);
    assert_eq!(v["rhs_at_origin"], -8.0);
}

fn fixed_point_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn phase_reproduces_table() {
    let dir = tempfile::tempdir().unwrap();
    let stem = dir.path().join("tf");
    let out = lamptf(&[
        "phase",
        "--window",
        "-6",
        "2",
        "-5",
        "4",
        "--out",
        stem.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(stem.with_extension("csv")).unwrap();
    assert!(csv.starts_with("X,Y,trace,det,discriminant,kind,"));
    let rows = fixed_point_rows(&csv);
    assert_eq!(rows.len(), 4);
    let parse = |s: &str| s.parse::<f64>().unwrap();
    let table = [
        ((0.0, 0.0), (2.0, -3.0, 16.0), "Saddle"),
        ((-1.0, 0.0), (2.5, 1.5, 0.25), "UnstableNode"),
        ((0.0, 3.0), (-1.0, -6.0, 25.0), "Saddle"),
        ((-4.0, -3.0), (7.0, -6.0, 73.0), "Saddle"),
    ];
    for (row, ((x, y), (d1, d2, disc), kind)) in rows.iter().zip(table) {
        assert_eq!((parse(&row[0]), parse(&row[1])), (x, y));
        assert_eq!((parse(&row[2]), parse(&row[3]), parse(&row[4])), (d1, d2, disc));
        assert_eq!(row[5], kind);
    }
    let svg = std::fs::read_to_string(stem.with_extension("svg")).unwrap();
    assert!(svg.contains(r#"width="800""#) && svg.contains(r#"height="800""#));
    assert_eq!(svg.matches(r#"class="fp Saddle""#).count(), 3);
    assert_eq!(svg.matches(r#"class="fp UnstableNode""#).count(), 1);
    assert!(svg.contains("<polyline") && svg.contains("stroke-dasharray"));
}

#[test]
fn phase_json_validates() {
    let v = json(&lamptf(&["phase", "--format", "json"]));
    assert_schema("phase", &v);
    assert!(v["trajectories"].as_u64().unwrap() > 0);
}

#[test]
fn phase_large_p_moves_interior_point() {
    let csv = String::from_utf8(lamptf(&["phase", "--p", "1e9", "--format", "csv"]).stdout).unwrap();
    let rows = fixed_point_rows(&csv);
    let last = rows.last().unwrap();
    let (x, y) = (last[0].parse::<f64>().unwrap(), last[1].parse::<f64>().unwrap());
    assert!((x + 3.0).abs() < 1e-6 && (y + 2.0).abs() < 1e-6, "({x}, {y})");
    let chain = json(&lamptf(&["classify", "--p", "1e9", "--embedding", "chain"]));
    let c = &chain["fixed_points"][3]["coords"];
    assert!((c[0].as_f64().unwrap() + 2.0).abs() < 1e-6 && (c[1].as_f64().unwrap() + 1.0).abs() < 1e-6);
}

#[test]
fn classify_outputs() {
    let v = json(&lamptf(&["classify"]));
    assert_schema("classify", &v);
    assert_eq!(v["fixed_points"].as_array().unwrap().len(), 4);
    let m = json(&lamptf(&["classify", "--matrix", "4", "-4", "-4.5", "3"]));
    assert_schema("classify", &m);
    assert_eq!(m["kind"], "Saddle");
    assert_eq!(m["discriminant"], 73.0);
}

#[test]
fn outputs_are_deterministic() {
    for args in [
        vec!["solve", "--format", "csv"],
        vec!["abel"],
        vec!["phase", "--format", "csv"],
        vec!["phase"],
    ] {
        let a = lamptf(&args).stdout;
        let b = lamptf_env(&args, "LAMPTF_THREADS", "1").stdout;
        assert!(!a.is_empty());
        assert!(a == b, "{args:?} differs between runs");
    }
}

#[test]
fn reproduce_reports_every_criterion() {
    let out = lamptf(&["reproduce", "--json"]);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    assert_schema("reproduce", &v);
    let failed: Vec<u64> = v["criteria"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| c["id"].as_u64().unwrap())
        .collect();
    assert_eq!(failed, vec![7, 10]);

    let text = String::from_utf8(lamptf(&["reproduce", "--inject-kp", "143"]).stdout).unwrap();
    // The wrong amplitude is caught directly and again by the saddle recovery.
    assert!(text.lines().next().unwrap().starts_with("FAIL [ 1]"), "{text}");
    assert!(text.contains("FAIL [ 9]"), "{text}");
    assert!(text.contains("9/13 criteria passed"));
}
