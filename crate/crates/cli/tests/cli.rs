use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_linefield"))
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("spawn linefield")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn json(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join(name)).unwrap()).unwrap()
}

const ANNULUS: &str = r#"{"curve": {"type": "circle", "center": [0, 0], "radius": 1}, "delta": 0.4}"#;
const DISK: &str = r#"{"curve": {"type": "circle", "center": [0, 0], "radius": 1}, "mode": "raw"}"#;

fn stadium() -> String {
    // two half circles of radius 0.6 joined by straight sides of length 1.2
    let mut pts = Vec::new();
    let r = 0.6;
    for k in 0..60 {
        let t = -PI / 2.0 + PI * k as f64 / 60.0;
        pts.push((0.6 + r * t.cos(), r * t.sin()));
    }
    for k in 0..24 {
        pts.push((0.6 - 1.2 * k as f64 / 24.0, r));
    }
    for k in 0..60 {
        let t = PI / 2.0 + PI * k as f64 / 60.0;
        pts.push((-0.6 + r * t.cos(), r * t.sin()));
    }
    for k in 0..24 {
        pts.push((-0.6 + 1.2 * k as f64 / 24.0, -r));
    }
    let list: Vec<String> = pts.iter().map(|(x, y)| format!("[{x}, {y}]")).collect();
    format!(r#"{{"curve": {{"type": "polyline", "points": [{}]}}, "mode": "raw"}}"#, list.join(", "))
}

#[test]
fn solve_annulus_passes_self_verification() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "annulus.json", ANNULUS);
    let out = run(d, &["solve", "--domain", "annulus.json", "--h", "0.015625", "--out", "f.csv", "--report", "r.json"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(d.join("f.csv").exists() && d.join("f.grid.json").exists());
    let r = json(d, "r.json");
    let keys: Vec<&String> = r.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["conditions", "norms", "verdict"]);
    assert_eq!(r["verdict"]["status"], "pass");
}

#[test]
fn solve_rejects_bad_specs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "fat.json", r#"{"curve": {"type": "circle", "center": [0, 0], "radius": 1}, "delta": 1.0}"#);
    write(d, "nodelta.json", r#"{"curve": {"type": "circle", "center": [0, 0], "radius": 1}, "mode": "tubular"}"#);
    write(d, "disk.json", DISK);
    for dom in ["fat.json", "nodelta.json", "disk.json", "missing.json"] {
        let out = run(d, &["solve", "--domain", dom, "--h", "0.05", "--out", "f.csv"]);
        assert_eq!(code(&out), 2, "{dom}");
    }
    let out = run(d, &["solve", "--domain", "disk.json", "--h", "-1", "--out", "f.csv"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn verify_exact_solution_and_vortex() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "annulus.json", ANNULUS);
    write(d, "disk.json", DISK);
    assert_eq!(code(&run(d, &["solve", "--domain", "annulus.json", "--h", "0.015625", "--out", "s.csv"])), 0);
    let out = run(d, &["verify", "--field", "s.csv", "--domain", "annulus.json", "--report", "v.json"]);
    assert_eq!(code(&out), 0);
    // one resolution cannot decide the L2 condition
    assert_eq!(json(d, "v.json")["verdict"]["status"], "inconclusive");
    let out = run(d, &["verify", "--field", "s.csv", "--domain", "annulus.json", "--refine", "1", "--report", "v.json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(d, "v.json")["verdict"]["status"], "pass");

    assert_eq!(code(&run(d, &["pattern", "--name", "vortex", "--h", "0.015625", "--out", "vx.csv"])), 0);
    let out = run(d, &["verify", "--field", "vx.csv", "--domain", "disk.json", "--refine", "3", "--report", "vv.json"]);
    assert_eq!(code(&out), 1);
    let r = json(d, "vv.json");
    assert_eq!(r["verdict"]["status"], "fail");
    assert_eq!(r["conditions"]["divergence_l2"]["status"], "fail");
    assert!(r["verdict"]["reasons"][0].as_str().unwrap().contains("L2 growth"));
}

#[test]
fn verify_rejects_tampered_and_mismatched_fields() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "annulus.json", ANNULUS);
    write(d, "disk.json", DISK);
    assert_eq!(code(&run(d, &["solve", "--domain", "annulus.json", "--h", "0.03125", "--out", "s.csv"])), 0);
    // the disk raster has a different lattice
    let out = run(d, &["verify", "--field", "s.csv", "--domain", "disk.json", "--report", "v.json"]);
    assert_eq!(code(&out), 2);

    let text = std::fs::read_to_string(d.join("s.csv")).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let row = lines.iter().position(|l| l.ends_with(",1")).unwrap();
    let mut cols: Vec<String> = lines[row].split(',').map(String::from).collect();
    cols[4] = format!("{}", cols[4].parse::<f64>().unwrap() + 0.01);
    lines[row] = cols.join(",");
    std::fs::write(d.join("s.csv"), lines.join("\n") + "\n").unwrap();
    let out = run(d, &["verify", "--field", "s.csv", "--domain", "annulus.json", "--report", "v.json"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("invalid projection"));
}

#[test]
fn classify_catalog() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "annulus.json", ANNULUS);
    write(d, "disk.json", DISK);
    write(d, "stadium.json", &stadium());

    let out = run(d, &["classify", "--domain", "annulus.json", "--samples", "128", "--report", "a.json"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(d, "a.json");
    let keys: Vec<&String> = r.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["T_stats", "components", "delta", "gamma", "is_tubular", "reason"]);
    assert_eq!(r["is_tubular"], true);
    assert!((r["delta"].as_f64().unwrap() - 0.4).abs() < 1e-3);

    let out = run(d, &["classify", "--domain", "stadium.json", "--samples", "128", "--report", "s.json"]);
    assert_eq!(code(&out), 1);
    let r = json(d, "s.json");
    assert_eq!(r["is_tubular"], false);
    assert!(r["reason"].as_array().unwrap().iter().any(|x| x["kind"] == "class_a"));

    let out = run(d, &["classify", "--domain", "disk.json", "--samples", "128", "--report", "k.json"]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(d, "k.json")["components"], 1);

    let out = run(d, &["classify", "--domain", "disk.json", "--samples", "10", "--report", "k.json"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn pattern_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = run(d, &["pattern", "--name", "constant", "--params", "theta=0", "--h", "0.0625", "--out", "c.csv", "--image", "c.ppm"]);
    assert_eq!(code(&out), 0);
    let (field, meta) = linefield::io::load_field(d.join("c.csv")).unwrap();
    assert!(field.thetas().iter().all(|&t| t == 0.0));
    assert_eq!(meta.pattern.unwrap().name(), "constant");
    let img = std::fs::read(d.join("c.ppm")).unwrap();
    assert!(img.starts_with(b"P6\n"));

    let out = run(d, &["pattern", "--name", "vortex", "--h", "0.0078125", "--out", "v.csv"]);
    assert_eq!(code(&out), 0);
    let (field, _) = linefield::io::load_field(d.join("v.csv")).unwrap();
    use linefield::grid::{divergence_tensor, DivergenceMode};
    let div = divergence_tensor(&field.to_tensor(), DivergenceMode::Interior).unwrap().magnitude();
    let lat = field.lattice();
    for i in 0..lat.len() {
        let r = lat.center(i).norm();
        if div.is_defined(i) && r > 0.2 && r < 0.8 {
            assert!((div.value(i) * r - 1.0).abs() < 0.05, "r {r} |div| {}", div.value(i));
        }
    }

    assert_eq!(code(&run(d, &["pattern", "--name", "spiral", "--out", "x.csv"])), 2);
    assert_eq!(code(&run(d, &["pattern", "--name", "vortex", "--params", "theta=1", "--out", "x.csv"])), 2);
}

#[test]
fn scan_catalog() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for (name, file) in [("uturn", "u.csv"), ("constant", "c.csv"), ("vortex", "v.csv")] {
        assert_eq!(code(&run(d, &["pattern", "--name", name, "--h", "0.03125", "--out", file])), 0);
    }
    let out = run(d, &["scan", "--field", "u.csv", "--report", "u.json"]);
    assert_eq!(code(&out), 1);
    let r = json(d, "u.json");
    let defects = r["defects"].as_array().unwrap();
    assert_eq!(defects.len(), 1);
    assert_eq!(defects[0]["charge"].as_f64().unwrap(), 0.5);
    assert_eq!(r["lift"]["status"], "non_orientable");

    let out = run(d, &["scan", "--field", "c.csv", "--report", "c.json", "--map", "c.pgm"]);
    assert_eq!(code(&out), 0);
    assert!(json(d, "c.json")["defects"].as_array().unwrap().is_empty());
    assert!(std::fs::read(d.join("c.pgm")).unwrap().starts_with(b"P5\n"));

    let out = run(d, &["scan", "--field", "v.csv", "--report", "v.json"]);
    assert_eq!(code(&out), 0);
    let r = json(d, "v.json");
    let defects = r["defects"].as_array().unwrap();
    assert_eq!(defects.len(), 1);
    assert_eq!(defects[0]["charge"].as_f64().unwrap(), 1.0);
}

#[test]
fn norms_table() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&run(d, &["pattern", "--name", "vortex", "--h", "0.00390625", "--out", "v.csv"])), 0);
    let out = run(d, &["norms", "--field", "v.csv", "--p", "2", "--eps-list", "0.2,0.1,0.05,0.025", "--report", "n.json"]);
    assert_eq!(code(&out), 0);
    let r = json(d, "n.json");
    for row in r["rows"].as_array().unwrap() {
        let eps = row["eps"].as_f64().unwrap();
        let oracle = 2.0 * PI * (1.0 / eps).ln();
        assert!((row["value"].as_f64().unwrap() / oracle - 1.0).abs() < 0.05);
    }
    assert!((r["log_slope"].as_f64().unwrap() / (2.0 * PI) - 1.0).abs() < 0.05);

    let out = run(d, &["norms", "--field", "v.csv", "--p", "1", "--eps-list", "0.1,0.01", "--report", "n1.json"]);
    assert_eq!(code(&out), 0);
    // ∫_{ε<r<1} 1/r dx = 2π(1 − ε) stays bounded
    for row in json(d, "n1.json")["rows"].as_array().unwrap() {
        let eps = row["eps"].as_f64().unwrap();
        assert!((row["value"].as_f64().unwrap() / (2.0 * PI * (1.0 - eps)) - 1.0).abs() < 0.05);
    }

    assert_eq!(code(&run(d, &["norms", "--field", "v.csv", "--p", "2", "--eps-list"])), 2);
    assert_eq!(code(&run(d, &["norms", "--field", "v.csv", "--p", "2"])), 2);
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&run(d, &[])), 2);
    assert_eq!(code(&run(d, &["frobnicate"])), 2);
    assert_eq!(code(&run(d, &["pattern", "--name", "constant", "--out", "c.csv", "--bogus"])), 2);
    assert_eq!(code(&run(d, &["--help"])), 0);
    let out = bin()
        .current_dir(d)
        .env("LINEFIELD_THREADS", "zero")
        .args(["pattern", "--name", "constant", "--out", "c.csv"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn reports_are_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "annulus.json", ANNULUS);
    let mut reports = Vec::new();
    for (threads, tag) in [("1", "a"), ("3", "b")] {
        let out = bin()
            .current_dir(d)
            .env("LINEFIELD_THREADS", threads)
            .args(["solve", "--domain", "annulus.json", "--h", "0.03125", "--out", &format!("{tag}.csv")])
            .args(["--report", &format!("{tag}.json")])
            .output()
            .unwrap();
        assert_eq!(code(&out), 0);
        reports.push((
            std::fs::read(d.join(format!("{tag}.json"))).unwrap(),
            std::fs::read(d.join(format!("{tag}.csv"))).unwrap(),
        ));
        let out = bin()
            .current_dir(d)
            .env("LINEFIELD_THREADS", threads)
            .args(["scan", "--field", &format!("{tag}.csv"), "--report", &format!("{tag}.scan.json")])
            .output()
            .unwrap();
        assert_eq!(code(&out), 0);
        reports.push((std::fs::read(d.join(format!("{tag}.scan.json"))).unwrap(), Vec::new()));
    }
    assert_eq!(reports[0], reports[2]);
    assert_eq!(reports[1], reports[3]);
}
