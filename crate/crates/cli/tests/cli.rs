use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const SQUARE: &str = r#"{"vertices": [[0,0],[1,0],[1,1],[0,1]], "closed": true}"#;
const QUADRANT: &str = r#"{"vertices": [[0,0]], "infinite_vertex": true, "ray_directions": [[0,1],[1,0]]}"#;

fn ladder_file(direction: [f64; 2]) -> String {
    format!(
        r#"{{"vertices": [[1,0],[1,1],[2,1],[2,2]], "infinite_vertex": true,
            "ray_directions": [[-1,0],[1,0]],
            "tail": {{"kind": "periodic", "alphas": [0.5, 1.5]}},
            "visible_vertices": [0,1,2,3], "infinite_direction": [{}, {}]}}"#,
        direction[0], direction[1]
    )
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quasipoly")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn square_bounds_report() {
    let dir = TempDir::new().unwrap();
    let sq = write(&dir, "square.json", SQUARE);
    let o = run(&["invariants", s(&sq)]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["status"], "bounds");
    assert_eq!(v["lower"], 0.5);
    assert_eq!(v["source"], "bounded_polygon");
    assert!(!v["notes"].as_array().unwrap().is_empty());
}

#[test]
fn batch_keeps_input_order() {
    let dir = TempDir::new().unwrap();
    let sq = write(&dir, "square.json", SQUARE);
    let qd = write(&dir, "quadrant.json", QUADRANT);
    let o = run(&["invariants", s(&qd), s(&sq), s(&qd)]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let statuses: Vec<&str> = v.as_array().unwrap().iter().map(|r| r["report"]["status"].as_str().unwrap()).collect();
    assert_eq!(statuses, ["exact", "bounds", "exact"]);
    for key in ["kappa", "k", "q", "rho_inv"] {
        assert_eq!(v[0]["report"][key], 0.5);
    }

    let o = run(&["--format", "csv", "invariants", s(&sq), s(&qd)]);
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "input,status,kappa,k,q,rho_inv,lower,upper,source,notes");
    assert_eq!(rows.len(), 3);
    assert!(rows[2].contains(",exact,0.5,0.5,0.5,0.5,,,convex_concave,"));
}

#[test]
fn downgraded_report_exits_two() {
    let dir = TempDir::new().unwrap();
    let good = write(&dir, "good.json", &ladder_file([-1.0, 1.0]));
    let blocked = write(&dir, "blocked.json", &ladder_file([1.0, -1.0]));
    let o = run(&["invariants", s(&good)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["status"], "exact");
    let o = run(&["invariants", s(&blocked)]);
    assert_eq!(o.status.code(), Some(2));
    let v = json(&o);
    assert_eq!(v["status"], "bounds");
    assert_eq!(v["lower"], 0.5);
}

#[test]
fn schema_errors_name_line_and_field() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.json", "{\"vertices\": [[0,0],[1,0]],\n \"closd\": true}");
    let o = run(&["invariants", s(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("closd") && err.contains("line 2"), "{err}");

    let rays = write(&dir, "rays.json", r#"{"vertices": [[0,0]], "infinite_vertex": true}"#);
    let err = String::from_utf8(run(&["invariants", s(&rays)]).stderr).unwrap();
    assert!(err.contains("ray_directions"), "{err}");

    let missing = dir.path().join("missing.json");
    assert_eq!(run(&["invariants", s(&missing)]).status.code(), Some(1));
}

#[test]
fn truncation_range_enforced() {
    let dir = TempDir::new().unwrap();
    let sq = write(&dir, "square.json", SQUARE);
    for n in ["4", "1024", "x"] {
        assert_eq!(run(&["grunsky", s(&sq), "--N", n]).status.code(), Some(1), "N = {n}");
    }
}

#[test]
fn square_grunsky_sweep() {
    let dir = TempDir::new().unwrap();
    let sq = write(&dir, "square.json", SQUARE);
    let dump = dir.path().join("beta.json");
    let o = run(&["grunsky", s(&sq), "--N", "64", "--dump", s(&dump)]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["truncation"], 64);
    assert_eq!(v["target"], 0.5);
    let sweep: Vec<(u64, f64)> = v["monotone_certificate"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| (p[0].as_u64().unwrap(), p[1].as_f64().unwrap()))
        .collect();
    assert_eq!(sweep.iter().map(|p| p.0).collect::<Vec<_>>(), [8, 16, 32, 64]);
    assert!(sweep.windows(2).all(|w| w[1].1 > w[0].1));
    assert!(sweep.iter().all(|p| p.1 <= 0.5 + 1e-9));
    let d: Value = serde_json::from_str(&std::fs::read_to_string(&dump).unwrap()).unwrap();
    assert_eq!(d["truncation"], 64);
    assert_eq!(d["entries"].as_array().unwrap().len(), 64 * 64);

    let csv = stdout(&run(&["--format", "csv", "grunsky", s(&sq), "--N", "16"]));
    assert!(csv.starts_with("N,value\n8,"));
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn series_input_and_recentering() {
    let dir = TempDir::new().unwrap();
    // Koebe function: a_n = n, image is the plane minus a slit
    let coeffs: Vec<[f64; 2]> = (1..=17).map(|n| [n as f64, 0.0]).collect();
    let koebe = write(&dir, "koebe.json", &serde_json::json!({"kind": "taylor-S", "coefficients": coeffs}).to_string());
    let v = json(&run(&["grunsky", s(&koebe), "--series", "--N", "8"]));
    assert!((v["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(v["target"].is_null());
    // 17 coefficients are too few for N = 9
    assert_eq!(run(&["grunsky", s(&koebe), "--series", "--N", "9"]).status.code(), Some(1));

    let sq = write(&dir, "square.json", SQUARE);
    let v = json(&run(&["grunsky", s(&sq), "--N", "16", "--center", "0.3,0.6"]));
    let x = v["value"].as_f64().unwrap();
    assert!(x > 0.0 && x <= 0.5 + 1e-9);
    assert_eq!(run(&["grunsky", s(&sq), "--N", "16", "--center", "5,5"]).status.code(), Some(1));
}

#[test]
fn homotopy_grid() {
    let dir = TempDir::new().unwrap();
    let qd = write(&dir, "quadrant.json", QUADRANT);
    let v = json(&run(&["homotopy", s(&qd), "--N", "32"]));
    let norms: Vec<(f64, f64)> = v["norms"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| (r["t"].as_f64().unwrap(), r["value"].as_f64().unwrap()))
        .collect();
    assert_eq!(norms.len(), 10);
    assert!(norms.windows(2).all(|w| w[1].1 >= w[0].1 - 1e-12));
    let base = json(&run(&["grunsky", s(&qd), "--N", "32"]))["value"].as_f64().unwrap();
    assert!((norms[9].1 - base).abs() <= 1e-12 * base);

    let csv = stdout(&run(&["--format", "csv", "homotopy", s(&qd), "--N", "8", "--t-grid", "0.25,1"]));
    assert_eq!(csv.lines().next(), Some("t,value"));
    assert_eq!(csv.lines().count(), 3);
    for bad in ["0", "1.5", "-0.2"] {
        assert_eq!(run(&["homotopy", s(&qd), "--N", "8", "--t-grid", bad]).status.code(), Some(1));
    }
}

#[test]
fn scmap_summary() {
    let dir = TempDir::new().unwrap();
    let sq = write(&dir, "square.json", SQUARE);
    let v = json(&run(&["scmap", s(&sq)]));
    assert_eq!(v["prevertices"].as_array().unwrap().len(), 4);
    assert!(v["side_residual"].as_f64().unwrap() <= 1e-6);
    for a in v["angle_factors"].as_array().unwrap() {
        assert_eq!(a.as_f64().unwrap(), 0.5);
    }
    let csv = stdout(&run(&["--format", "csv", "scmap", s(&sq)]));
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn snowflake_report() {
    let o = run(&["snowflake", "--p", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert!((v["dimension"].as_f64().unwrap() - 1.26186).abs() < 1e-4);
    let d: Vec<f64> = v["hausdorff_distances"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!((d[0] - 3f64.sqrt()).abs() < 1e-6);
    assert!(d.windows(2).all(|w| (w[1] / w[0] - 1.0 / 3.0).abs() < 0.05));
    assert_eq!(v["reports"]["iterates"].as_array().unwrap().len(), 4);
    assert_eq!(v["reports"]["limit"]["status"], "bounds");
    assert_eq!(run(&["snowflake", "--t", "0.6"]).status.code(), Some(1));
}

#[test]
fn ladder_from_file_and_default() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "ladder.json", r#"{"crossbars": [2, 0.5, 3], "heights": [1, 2, 0.25]}"#);
    for args in [vec!["ladder", s(&f)], vec!["ladder", "--steps", "3"]] {
        let v = json(&run(&args));
        assert_eq!(v["report"]["status"], "exact");
        assert_eq!(v["report"]["k"], 0.5);
        assert_eq!(v["polygon"]["vertices"].as_array().unwrap().len(), 6);
    }
    // the emitted polygon file reproduces the report through `invariants`
    let v = json(&run(&["ladder", s(&f)]));
    let again = write(&dir, "again.json", &v["polygon"].to_string());
    assert_eq!(json(&run(&["invariants", s(&again)])), v["report"]);
    let bad = write(&dir, "bad.json", r#"{"crossbars": [1], "heights": []}"#);
    assert_eq!(run(&["ladder", s(&bad)]).status.code(), Some(1));
}

#[test]
fn arc_bound_outputs() {
    let dir = TempDir::new().unwrap();
    let id = write(&dir, "id.json", r#"{"g_coefficients": [[0, 0], [1, 0]]}"#);
    let v = json(&run(&["arc-bound", s(&id)]));
    assert_eq!(v["bound"], 0.0);
    assert_eq!(v["estimate"]["r"], 0.0);
    let bent = write(&dir, "bent.json", r#"{"g_coefficients": [[0, 0], [1, 0], [0.1, 0]], "gamma": [[1, 0], [0, 1]]}"#);
    let v = json(&run(&["arc-bound", s(&bent), "--max-degree", "32"]));
    let r = v["estimate"]["r"].as_f64().unwrap();
    assert!(r > 0.0 && r < 1.0);
    let (a, b) = (v["ellipse"]["a"].as_f64().unwrap(), v["ellipse"]["b"].as_f64().unwrap());
    assert!((a * a - b * b - 1.0).abs() < 1e-12);
    let csv = stdout(&run(&["--format", "csv", "arc-bound", s(&bent), "--max-degree", "32"]));
    assert!(csv.starts_with("m,e_m\n"));
    let fold = write(&dir, "fold.json", r#"{"g_coefficients": [[0, 0], [0, 0], [1, 0]]}"#);
    assert_eq!(run(&["arc-bound", s(&fold)]).status.code(), Some(1));
}

#[test]
fn set_bound_picks_smallest_cover() {
    let dir = TempDir::new().unwrap();
    let f = write(
        &dir,
        "set.json",
        r#"{"set_points": [[0, 0], [2, 0]],
            "covering_lines": [
              {"vertices": [[0, 0]], "infinite_vertex": true, "ray_directions": [[-0.5, 0.8660254037844386], [1, 0]]},
              {"vertices": [[0, 0]], "infinite_vertex": true, "ray_directions": [[0, 1], [1, 0]]},
              {"vertices": [[0, 0]], "infinite_vertex": true, "ray_directions": [[-1, 0], [1, 0]]}
            ]}"#,
    );
    let v = json(&run(&["set-bound", s(&f)]));
    assert_eq!(v["bound"]["cover"], 2);
    assert_eq!(v["bound"]["value"], 0.0);
    assert_eq!(v["reports"].as_array().unwrap().len(), 3);
    let csv = stdout(&run(&["--format", "csv", "set-bound", s(&f)]));
    assert_eq!(csv.lines().next(), Some("cover,q_upper,status,source,chosen"));
    assert!(csv.lines().nth(3).unwrap().ends_with(",true"));

    let off = write(
        &dir,
        "off.json",
        r#"{"set_points": [[0, 1]], "covering_lines": [{"vertices": [[0, 0]], "infinite_vertex": true, "ray_directions": [[-1, 0], [1, 0]]}]}"#,
    );
    assert_eq!(run(&["set-bound", s(&off)]).status.code(), Some(1));
}

#[test]
fn outputs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let sq = write(&dir, "square.json", SQUARE);
    let qd = write(&dir, "quadrant.json", QUADRANT);
    let runs: [&[&str]; 3] = [
        &["grunsky", s(&sq), "--N", "48"],
        &["--format", "csv", "invariants", s(&sq), s(&qd)],
        &["snowflake", "--p", "2"],
    ];
    for args in runs {
        let (a, b) = (run(args), run(args));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(a.status.code(), b.status.code());
    }
}

#[test]
fn verify_table() {
    let plain = run(&["verify"]);
    let text = stdout(&plain);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 9);
    for (i, row) in rows.iter().enumerate() {
        assert!(row.starts_with(&format!("[PASS] {} ", i + 1)) || row.starts_with(&format!("[FAIL] {} ", i + 1)));
    }
    // every criterion except the square sweep passes
    assert!(rows[1..].iter().all(|r| r.starts_with("[PASS]")), "{text}");
    let code = if rows[0].starts_with("[PASS]") { 0 } else { 1 };
    assert_eq!(plain.status.code(), Some(code));
    assert_eq!(run(&["verify"]).stdout, plain.stdout);

    let injected = run(&["verify", "--csv", "--inject-failure", "3"]);
    assert_eq!(injected.status.code(), Some(1));
    let csv = stdout(&injected);
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "id,name,passed,measured,tolerance");
    assert_eq!(rows.len(), 10);
    assert!(rows[3].starts_with("3,slit map identity,false,"));
    assert!(rows[8].starts_with("8,arc bound,true,"));
    assert_eq!(run(&["verify", "--inject-failure", "10"]).status.code(), Some(1));
}
