use std::path::PathBuf;

use qhyper::cli::run;
use qhyper::geometry::Isometry;
use qhyper::mobius::embed_sl2;
use qhyper::{sample, Complex64, QMatrix, Tolerances};
use serde_json::{json, Value};

fn scratch(name: &str, content: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qhyper-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path
}

fn matrix_json(m: &QMatrix) -> String {
    let rows: Vec<Value> = (0..m.rows())
        .map(|r| Value::Array(m.row(r).iter().map(|q| json!([q.re, q.i, q.j, q.k])).collect()))
        .collect();
    json!({ "n": m.rows() - 1, "matrix": rows }).to_string()
}

fn iso_file(name: &str, g: &Isometry) -> String {
    scratch(name, &matrix_json(g.matrix())).display().to_string()
}

fn json_of(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["qhyper", "--format", "json"];
    full.extend_from_slice(args);
    let inv = run(full);
    let v = if inv.stdout.is_empty() { Value::Null } else { serde_json::from_str(&inv.stdout).unwrap() };
    (inv.exit, v)
}

#[test]
fn check_accepts_the_form_and_an_embedded_element() {
    let j = scratch("j.json", r#"{"n": 1, "matrix": [[1, 0], [0, -1]]}"#);
    let (code, v) = json_of(&["check", j.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["accepted"], true);

    let h = [Complex64::new(-1.5, 0.0), Complex64::new(0.0, 2.0), Complex64::new(0.0, 2.0), Complex64::new(2.0, 0.0)];
    let hh = embed_sl2(&h, &Tolerances::default()).unwrap();
    let (code, v) = json_of(&["check", &iso_file("hhat.json", &hh)]);
    assert_eq!(code, 0);
    assert!(v["report"]["worst"].as_f64().unwrap() < 1e-12);
}

#[test]
fn check_rejects_with_a_residual_report() {
    let f = scratch("stretch.json", "[[2, 0], [0, 1]]");
    let inv = run(["qhyper", "check", f.to_str().unwrap()]);
    assert_eq!(inv.exit, 3);
    assert!(inv.stdout.contains("REJECT"));
    for label in ["g*Jg = J", "-|beta|^2 + |a|^2 = 1", "-|alpha|^2 + |a|^2 = 1"] {
        assert!(inv.stdout.contains(label), "{label}");
    }
}

#[test]
fn delta_of_the_rotation_and_of_the_identity() {
    let g = scratch("rot.json", r#"[["sqrt(3)/2 + i/2", 0], [0, "sqrt(3)/2 - i/2"]]"#);
    let (code, v) = json_of(&["delta", g.to_str().unwrap(), "--oracle"]);
    assert_eq!(code, 0);
    let d = v["profile"]["delta"].as_f64().unwrap();
    assert!((d - 1.0).abs() < 1e-12, "{d}");
    assert!(v["oracle"]["difference"].as_f64().unwrap() <= 5e-3);

    let id = scratch("id.json", "[[1, 0, 0], [0, 1, 0], [0, 0, 1]]");
    let (code, v) = json_of(&["delta", id.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["profile"]["delta"].as_f64().unwrap(), 0.0);
    assert_eq!(v["profile"]["kind"], "boundary");
}

#[test]
fn delta_refuses_non_elliptic_input() {
    let boost = iso_file("boost.json", &sample::boost(1, 0, 1.0));
    let inv = run(["qhyper", "delta", &boost]);
    assert_eq!(inv.exit, 3, "{}", inv.stderr);
    assert!(inv.stderr.starts_with("error:"));
}

#[test]
fn test_command_covers_all_three_verdicts() {
    let g_small = iso_file("g_small.json", &sample::diagonal_elliptic(&[0.1, 0.25, 0.4]));
    let stab = iso_file("stab.json", &sample::diagonal_elliptic(&[1.0, 2.0, -0.5]));
    let (code, v) = json_of(&["test", &g_small, &stab]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["verdict"], "elementary");

    let g = iso_file("g.json", &sample::diagonal_elliptic(&[0.9, 0.4]));
    let far = iso_file("far.json", &sample::boost(1, 0, 1.5));
    let (_, v) = json_of(&["test", &g, &far]);
    assert_eq!(v["report"]["verdict"], "inconclusive");

    let g = iso_file("g2.json", &sample::diagonal_elliptic(&[0.9, 0.9, 0.0]));
    let near = iso_file("near.json", &sample::boost(2, 0, 0.3));
    let (_, v) = json_of(&["test", &g, &near]);
    assert_eq!(v["report"]["verdict"], "not_discrete");
    let steps = v["report"]["trace"]["steps"].as_array().unwrap();
    assert!(steps.len() >= 20);
    let c: Vec<f64> = steps.iter().map(|s| s["corner_modulus_sq"].as_f64().unwrap()).collect();
    assert!(c.windows(2).all(|w| w[1] <= w[0] + 1e-12));
}

#[test]
fn test_command_rejects_mixed_dimensions() {
    let g = iso_file("g1.json", &sample::diagonal_elliptic(&[0.3, 0.0]));
    let h = iso_file("h2.json", &sample::boost(2, 0, 0.3));
    assert_eq!(run(["qhyper", "test", &g, &h]).exit, 2);
}

#[test]
fn mobius_examples() {
    let (code, v) = json_of(&["mobius", "--theta", "pi/4", "--h", "-3/2", "2i", "2i", "2"]);
    assert_eq!(code, 0);
    let cmp = &v["comparison"];
    assert!((cmp["norm_sq_plus_two"].as_f64().unwrap() - 16.25).abs() < 1e-12);
    assert!((cmp["four_one_plus_bc"].as_f64().unwrap() - 20.0).abs() < 1e-12);

    let (_, v) = json_of(&["mobius", "--theta", "pi/4", "--h", "1", "sqrt2", "sqrt2", "3", "--grid", "64x64"]);
    let cmp = &v["comparison"];
    assert!((cmp["one_plus_bc"].as_f64().unwrap() - 3.0).abs() < 1e-12);
    assert!((cmp["f_grid_min"].as_f64().unwrap() - 4.0).abs() < 5e-3);

    let (_, v) = json_of(&["mobius", "--theta", "1", "--h", "1", "0", "0", "1", "--grid", "16"]);
    assert!((v["comparison"]["f_inf"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn mobius_input_file_and_grid_dump() {
    let f = scratch("pair.json", r#"{"theta": "pi/3", "h": ["1", "sqrt2", "sqrt2", 3]}"#);
    let csv = std::env::temp_dir().join(format!("qhyper-cli-{}", std::process::id())).join("grid.csv");
    let inv = run(["qhyper", "--grid", "10x12", "mobius", "--input", f.to_str().unwrap(), "--grid-csv", csv.to_str().unwrap()]);
    assert_eq!(inv.exit, 0, "{}", inv.stderr);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("radius,angle,f\n"));
    assert_eq!(text.lines().count(), 1 + 11 * 12);
}

#[test]
fn mobius_determinant_and_parse_errors_exit_two() {
    let inv = run(["qhyper", "mobius", "--theta", "1", "--h", "1", "1", "0", "2"]);
    assert_eq!(inv.exit, 2);
    assert!(inv.stderr.contains("determinant"));
    let inv = run(["qhyper", "mobius", "--theta", "1", "--h", "1", "0", "0", "1+x"]);
    assert_eq!(inv.exit, 2);
    assert!(inv.stderr.contains("position 2"), "{}", inv.stderr);
}

#[test]
fn reproduce_passes_and_fails_as_configured() {
    let (code, v) = json_of(&["reproduce"]);
    assert_eq!(code, 0);
    assert_eq!(v["passed"], true);

    let inv = run(["qhyper", "reproduce", "--tolerance", "1e-15"]);
    assert_eq!(inv.exit, 4);
    assert!(inv.stdout.contains("FAIL"));

    let inv = run(["qhyper", "reproduce", "--list"]);
    assert_eq!(inv.exit, 0);
    assert!(inv.stdout.contains("mobius.first.norm"));
}

#[test]
fn identical_invocations_give_identical_json() {
    let g = iso_file("det_g.json", &sample::diagonal_elliptic(&[0.3, -0.3]));
    let h = iso_file("det_h.json", &sample::boost(1, 0, 0.4));
    let a = run(["qhyper", "--format", "json", "test", &g, &h]);
    let b = run(["qhyper", "--format", "json", "test", &g, &h]);
    assert_eq!(a.exit, 0, "{}", a.stderr);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn output_file_and_csv_rendering() {
    let out = std::env::temp_dir().join(format!("qhyper-cli-{}", std::process::id())).join("out.csv");
    std::fs::create_dir_all(out.parent().unwrap()).unwrap();
    let inv = run(["qhyper", "--format", "csv", "--output", out.to_str().unwrap(), "reproduce", "--list"]);
    assert_eq!(inv.exit, 0);
    assert!(inv.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("path,value\n"));
    assert!(text.contains("claims.0.id,quaternion.zj"));
}

#[test]
fn malformed_files_exit_two() {
    let f = scratch("broken.json", "[[1, 0], [0");
    assert_eq!(run(["qhyper", "check", f.to_str().unwrap()]).exit, 2);
    assert_eq!(run(["qhyper", "check", "/nonexistent/qhyper.json"]).exit, 2);
    let f = scratch("rect.json", "[[1, 0, 0], [0, 1, 0]]");
    assert_eq!(run(["qhyper", "check", f.to_str().unwrap()]).exit, 2);
}
