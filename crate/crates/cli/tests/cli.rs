use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn rrmf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rrmf"))
        .args(args)
        .env_remove("RRMF_TOL_BISECTION")
        .env_remove("RRMF_TOL_MAX_ITER")
        .output()
        .expect("spawn rrmf")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const GENERIC1: &str = "x,y,z\n0,0,0\n-5,5,2\n0,10,-2\n8,12,5\n15,2,3\n2,0,7\n";

fn interpolate(dir: &TempDir, points: &str) -> (Output, PathBuf, PathBuf) {
    let input = write(dir, "in.csv", points);
    let out = dir.path().join("spline.json");
    let report = dir.path().join("report.json");
    let o = rrmf(&["interpolate", "--in", s(&input), "--out", s(&out), "--report", s(&report)]);
    (o, out, report)
}

#[test]
fn bad_stream_is_infeasible() {
    let dir = TempDir::new().unwrap();
    let (o, out, _) = interpolate(&dir, "0,0,0\n-5,5,2\n2,2,0\n");
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    let msg = stderr(&o);
    assert!(msg.contains("segment 1"), "{msg}");
    assert!(msg.contains("0.860 pi"), "{msg}");
    assert!(msg.contains("insert a middle point between p1 and p2"), "{msg}");
    assert!(!out.exists());
}

#[test]
fn inserted_point_fixes_bad_stream() {
    let dir = TempDir::new().unwrap();
    let (o, _, _) = interpolate(&dir, "0,0,0\n-5,5,2\n-4,6,-2\n2,2,0\n");
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn generic_stream_gives_five_segments() {
    let dir = TempDir::new().unwrap();
    let (o, out, report) = interpolate(&dir, GENERIC1);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r: serde_json::Value = serde_json::from_str(&fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(r["segments"], 5);
    assert_eq!(r["reports"].as_array().unwrap().len(), 5);
    assert!(r["reports"][0]["gamma"].as_f64().unwrap() > 0.0);
    let spline: serde_json::Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(spline["format"], "rrmf-spline");
    assert_eq!(spline["segments"].as_array().unwrap().len(), 5);
}

#[test]
fn eval_with_one_sample_gives_endpoints() {
    let dir = TempDir::new().unwrap();
    let (o, spline, _) = interpolate(&dir, GENERIC1);
    assert_eq!(code(&o), 0);
    let csv = dir.path().join("eval.csv");
    let o = rrmf(&["eval", "--in", s(&spline), "--samples", "1", "--out", s(&csv)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "u,x,y,z,f1x,f1y,f1z,f2x,f2y,f2z,f3x,f3y,f3z");
    assert_eq!(lines.len(), 3);
    let row = |l: &str| l.split(',').map(|x| x.parse::<f64>().unwrap()).collect::<Vec<_>>();
    let first = row(lines[1]);
    let last = row(lines[2]);
    assert_eq!(first[0], 0.0);
    assert!(first[1..4].iter().all(|x| x.abs() < 1e-9));
    for (got, want) in last[1..4].iter().zip([2.0, 0.0, 7.0]) {
        assert!((got - want).abs() < 1e-9, "{got} vs {want}");
    }
    for r in [&first, &last] {
        let f = |k: usize| [r[4 + 3 * k], r[5 + 3 * k], r[6 + 3 * k]];
        for a in 0..3 {
            for b in 0..3 {
                let d: f64 = (0..3).map(|i| f(a)[i] * f(b)[i]).sum();
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((d - want).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn fresh_spline_validates() {
    let dir = TempDir::new().unwrap();
    let (o, spline, _) = interpolate(&dir, GENERIC1);
    assert_eq!(code(&o), 0);
    let report = dir.path().join("validate.json");
    let o = rrmf(&["validate", "--in", s(&spline), "--report", s(&report), "--samples", "200"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r: serde_json::Value = serde_json::from_str(&fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(r["pass"], true);
}

#[test]
fn corrupted_spline_fails_validation() {
    let dir = TempDir::new().unwrap();
    let (o, spline, _) = interpolate(&dir, GENERIC1);
    assert_eq!(code(&o), 0);
    let mut v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&spline).unwrap()).unwrap();
    let a1 = &mut v["segments"][0]["a"][1];
    for c in a1.as_array_mut().unwrap() {
        *c = serde_json::json!(c.as_f64().unwrap() * 1.01);
    }
    fs::write(&spline, serde_json::to_string(&v).unwrap()).unwrap();
    let o = rrmf(&["validate", "--in", s(&spline), "--samples", "200"]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    assert!(stderr(&o).contains("class_i"), "{}", stderr(&o));
}

#[test]
fn empty_spline_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let empty = write(&dir, "empty.json", "");
    let o = rrmf(&["validate", "--in", s(&empty)]);
    assert_eq!(code(&o), 4, "{}", stderr(&o));
    let o = rrmf(&["eval", "--in", s(&dir.path().join("missing.json")), "--out", "x.csv"]);
    assert_eq!(code(&o), 4);
}

#[test]
fn malformed_points_report_the_line() {
    let dir = TempDir::new().unwrap();
    let (o, _, _) = interpolate(&dir, "0,0,0\n1,2\n3,4,5\n");
    assert_eq!(code(&o), 4);
    assert!(stderr(&o).contains(":2"), "{}", stderr(&o));
}

#[test]
fn sampled_curves_interpolate() {
    let dir = TempDir::new().unwrap();
    for (curve, n, segs) in [("helix", "5", 5), ("torus", "7", 7), ("spiral", "7", 7)] {
        let stream = dir.path().join(format!("{curve}.json"));
        let o = rrmf(&["sample", "--curve", curve, "--n", n, "--out", s(&stream)]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let spline = dir.path().join(format!("{curve}-spline.json"));
        let report = dir.path().join(format!("{curve}-report.json"));
        let o = rrmf(&["interpolate", "--in", s(&stream), "--out", s(&spline), "--report", s(&report)]);
        assert_eq!(code(&o), 0, "{curve}: {}", stderr(&o));
        let r: serde_json::Value = serde_json::from_str(&fs::read_to_string(report).unwrap()).unwrap();
        assert_eq!(r["segments"], segs);
    }
}

#[test]
fn unknown_curve_and_usage_errors() {
    let o = rrmf(&["sample", "--curve", "trefoil", "--n", "5", "--out", "x.json"]);
    assert_eq!(code(&o), 4);
    let o = rrmf(&["frobnicate"]);
    assert_eq!(code(&o), 4);
    let o = rrmf(&["--help"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn explicit_frame_is_honoured() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "in.csv", GENERIC1);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let frame = write(&dir, "frame.json", &format!(r#"{{"u":[{m},{h},0],"v":[{h},{h},0],"w":[0,0,-1]}}"#, m = -h));
    let out = dir.path().join("s.json");
    let report = dir.path().join("r.json");
    let o = rrmf(&["interpolate", "--in", s(&input), "--frame", s(&frame), "--out", s(&out), "--report", s(&report)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["initial_frame"]["u"][0].as_f64().unwrap(), -h);
    assert_eq!(v["initial_frame"]["w"][2].as_f64().unwrap(), -1.0);
}

#[test]
fn unreachable_start_tangent_is_infeasible() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "in.csv", GENERIC1);
    let frame = write(&dir, "frame.json", r#"{"u":[1,0,0],"v":[0,1,0],"w":[0,0,1]}"#);
    let out = dir.path().join("s.json");
    let o = rrmf(&["interpolate", "--in", s(&input), "--frame", s(&frame), "--out", s(&out)]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(stderr(&o).contains("segment 0"), "{}", stderr(&o));
}

#[test]
fn non_orthonormal_frame_is_rejected() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "in.csv", GENERIC1);
    let frame = write(&dir, "frame.json", r#"{"u":[1,0,0],"v":[1,1,0],"w":[0,0,1]}"#);
    let o = rrmf(&["interpolate", "--in", s(&input), "--frame", s(&frame), "--out", s(&dir.path().join("s.json"))]);
    assert_eq!(code(&o), 4, "{}", stderr(&o));
}
