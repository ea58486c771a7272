use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_flagricci"));
    c.env_remove("FLAGRICCI_OUTPUT_DIR");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn xs(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

#[test]
fn list_catalog() {
    let all = json(&run(&["list"]));
    let all = all.as_array().unwrap();
    assert_eq!(all.len(), 20);
    let e8 = all.iter().find(|e| e["id"] == "E8/SO(14)xU(1)").unwrap();
    assert_eq!(e8["dims"], serde_json::json!([128, 28]));

    let type_one = json(&run(&["list", "--type-I"]));
    assert_eq!(type_one.as_array().unwrap().len(), 7);

    let c = json(&run(&["list", "--family", "C", "--l", "2", "--p", "1"]));
    assert_eq!(c[0]["dims"], serde_json::json!([4, 2]));
    // d₁d₂/(d₁+4d₂) = 8/12.
    assert_eq!(c[0]["constants"]["triple211"], serde_json::json!([2, 3]));

    let csv = run(&["--format", "csv", "list", "--type-I"]);
    assert!(csv.status.success());
    assert_eq!(String::from_utf8(csv.stdout).unwrap().lines().count(), 8);
}

#[test]
fn einstein_reports() {
    let long = json(&run(&["einstein", "G2/U(2)-long"]));
    let metrics = long["metrics"].as_array().unwrap();
    assert_eq!(metrics.len(), 3);
    assert_eq!(xs(&metrics[0]["x"]), vec![1.0, 2.0, 3.0]);
    assert_eq!(metrics[0]["is_kahler"], true);
    assert_eq!(long["agreement"], true);
    assert!(metrics.iter().all(|m| m["fixed_point"].is_string()));

    let short = json(&run(&["einstein", "G2/U(2)-short"]));
    let second = &short["metrics"][1];
    assert_eq!(second["exact"][1], serde_json::json!([2, 3]));
    assert!((second["x"][1].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-11);

    let missing = run(&["einstein", "NOSUCH"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("unknown flag manifold"));
}

#[test]
fn fixed_points_and_schema() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let out = run(&["fixed-points", "E8/E6xSU(2)xU(1)", "--json", path.to_str().unwrap()]);
    let stdout = json(&out);
    let file: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(stdout, file);

    let points = file["fixed_points"].as_array().unwrap();
    assert_eq!(points.len(), 3);
    let expected = [([0.914286, 1.54198], "Saddle"), ([1.0049, 0.129681], "Saddle"), ([2.0, 3.0], "RepellingNode")];
    for (p, (z, class)) in points.iter().zip(expected) {
        let got = xs(&p["z"]);
        assert!((got[0] - z[0]).abs() < 1e-4 && (got[1] - z[1]).abs() < 1e-4, "{got:?}");
        assert_eq!(got[2], 0.0);
        assert_eq!(p["classification"], class);
        assert_eq!(p["chart"], "U1");
        assert_eq!(p["status"], "einstein");
        assert!(p["residual"].as_f64().unwrap() <= 1e-10);
        assert!(p["einstein_residual"].as_f64().unwrap() <= 1e-8);
        assert!(p["seeds"].as_u64().unwrap() >= 2);
        assert!(p["transverse_eigenvalue"].is_number());
        for key in ["boundary_eigenvalues", "chart_eigenvalues"] {
            let eig = p[key].as_array().unwrap();
            assert!(eig.iter().all(|e| e["re"].is_number() && e["im"].is_number()));
        }
        assert_eq!(p["boundary_eigenvalues"].as_array().unwrap().len(), 2);
        assert_eq!(p["chart_eigenvalues"].as_array().unwrap().len(), 3);
        assert!(p["metric"]["x"].is_array());
    }
    assert_eq!(file["search_box"]["lo"], serde_json::json!([0.01, 0.01]));
    assert_eq!(file["warnings"], serde_json::json!([]));

    let short = json(&run(&["fixed-points", "G2/U(2)-short"]));
    let classes: Vec<&str> = short["fixed_points"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["classification"].as_str().unwrap())
        .collect();
    assert_eq!(classes, ["AttractingNode", "RepellingNode"]);
}

#[test]
fn output_is_deterministic() {
    let a = run(&["fixed-points", "F4/SU(3)xSU(2)xU(1)"]);
    let b = run(&["fixed-points", "F4/SU(3)xSU(2)xU(1)"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    // Keys are sorted.
    let text = String::from_utf8(a.stdout).unwrap();
    let top: Vec<usize> = ["\"agreement\"", "\"chart\"", "\"density\"", "\"fixed_points\"", "\"search_box\""]
        .iter()
        .map(|k| text.find(k).unwrap())
        .collect();
    assert!(top.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn flow_field_reduced_terms() {
    // For dims (8, 2) the reduced field is
    // (8d₂²x₁² + 2(2d₁+d₂)(d₁+4d₂)x₁x₂ − d₂(3d₁+2d₂)x₂², (4d₂x₁+d₁x₂)(4d₂x₁+d₁(2x₁+x₂))).
    let (d1, d2) = (8i64, 2i64);
    let first = [([2, 0], 8 * d2 * d2), ([1, 1], 2 * (2 * d1 + d2) * (d1 + 4 * d2)), ([0, 2], -d2 * (3 * d1 + 2 * d2))];
    let second = [
        ([2, 0], 4 * d2 * (4 * d2 + 2 * d1)),
        ([1, 1], 4 * d2 * d1 + d1 * (4 * d2 + 2 * d1)),
        ([0, 2], d1 * d1),
    ];
    let v = json(&run(&["flow-field", "G2/U(2)-short", "--reduced"]));
    assert_eq!(v["form"], "reduced");
    for (component, expected) in [(0, first), (1, second)] {
        let terms = v["components"][component].as_array().unwrap();
        assert_eq!(terms.len(), 3);
        for (exps, coeff) in expected {
            let t = terms.iter().find(|t| t["exponents"] == serde_json::json!(exps)).unwrap();
            assert_eq!(t["numerator"].as_i64().unwrap(), coeff);
            assert_eq!(t["denominator"].as_i64().unwrap(), 1);
        }
    }
    let chart = json(&run(&["flow-field", "G2/U(2)-long", "--chart", "U1"]));
    assert_eq!(chart["variables"], serde_json::json!(["z1", "z2", "z3"]));
    // μ₃ = 2d₁d₂d₃(d₁+d₂+d₃)(d₁+4d₂+9d₃) x₁²x₂x₃ with dims (4, 2, 4).
    assert_eq!(chart["scaling"]["coefficient"], serde_json::json!([2 * 4 * 2 * 4 * 10 * 48, 1]));
    assert_eq!(chart["scaling"]["exponents"], serde_json::json!([2, 1, 1]));
    assert_eq!(run(&["flow-field", "G2/U(2)-long", "--chart", "U9"]).status.code(), Some(2));
}

#[test]
fn portrait_samples() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&run_in(dir.path(), &["portrait", "G2/U(2)-short", "--samples", "20"]));
    let trajectories = v["trajectories"].as_array().unwrap();
    assert_eq!(trajectories.len(), 20);
    let files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(files.len(), 20);
    for t in trajectories {
        let x0 = xs(&t["initial"]);
        let end = xs(&t["final_state"]);
        let (r0, r1) = (x0[1] / x0[0], end[1] / end[0]);
        if r0 < 2.0 {
            // Below the Kähler ray the direction moves toward (1, 2/3),
            // slowly: starts close to the ray may still sit nearer g0.
            assert!((r1 - 2.0 / 3.0).abs() < (r0 - 2.0 / 3.0).abs());
            assert_eq!(t["termination"]["kind"], "completed");
            if r0 < 1.0 {
                assert_eq!(t["nearest_einstein"], "g1");
            }
        } else {
            // Above it, toward the x₂-axis.
            assert!(r1 > r0);
        }
        let csv = std::fs::read_to_string(dir.path().join(Path::new(t["file"].as_str().unwrap()).file_name().unwrap()))
            .unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("t,x1,x2,norm,d1,d2"));
        let first: Vec<f64> = lines.next().unwrap().split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(first[0], 0.0);
        // JSON carries 12 significant digits, the CSV full precision.
        assert!(first[1..3].iter().zip(&x0).all(|(a, b)| (a - b).abs() <= 1e-11 * b));
    }
}

#[test]
fn portrait_on_the_kahler_ray() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .env("FLAGRICCI_OUTPUT_DIR", dir.path())
        .args(["portrait", "--from", "1,2"])
        .output()
        .unwrap();
    let v = json(&out);
    let t = &v["trajectories"][0];
    assert!(t["max_ratio_drift"].as_f64().unwrap() <= 1e-7);
    assert_eq!(t["termination"]["kind"], "completed");
    assert_eq!(t["final_time"].as_f64().unwrap(), 50.0);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);

    let bad = run_in(dir.path(), &["portrait", "--from", "1,-1"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("strictly positive"));
    assert_eq!(run_in(dir.path(), &["portrait", "--from", "1,2,3"]).status.code(), Some(2));
}

#[test]
fn verify_single_and_all() {
    let v = json(&run(&["verify", "G2/U(2)-long"]));
    let checks = v["spaces"][0]["checks"].as_array().unwrap();
    let oracle = checks.iter().find(|c| c["name"] == "oracle agreement").unwrap();
    assert_eq!(oracle["pass"], true);

    let all = run(&["verify", "--all"]);
    let v = json(&all);
    assert_eq!(v["pass"], true);
    assert_eq!(v["spaces"].as_array().unwrap().len(), 20);

    let strict = run(&["verify", "--all", "--tol", "1e-30"]);
    assert_eq!(strict.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&strict.stderr);
    assert!(stderr.contains("check(s) failed"));
    assert!(stderr.contains("G2/U(2)-long: "));
    let report: Value = serde_json::from_slice(&strict.stdout).unwrap();
    assert_eq!(report["pass"], false);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["list", "--family", "Q", "--l", "2", "--p", "1"],
        vec!["list", "--family", "C", "--l", "2", "--p", "2"],
        vec!["--density", "4", "einstein", "G2/U(2)-long"],
        vec!["einstein"],
        vec!["frobnicate"],
        vec!["verify"],
    ] {
        assert_eq!(run(&args).status.code(), Some(2), "{args:?}");
    }
}
