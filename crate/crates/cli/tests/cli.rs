use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn widthlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_widthlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn experiment(kind: &str, cfg: &Path, out: &Path) -> Output {
    widthlab(&[
        kind,
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ])
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

const WIDTHS_1D: &str = "[condenser]\na = [1.0]\nb = [0.5]\n\n[widths]\ncount = 64\n";

#[test]
fn inverted_radii_are_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let cfg = config(
        dir.path(),
        "bad.toml",
        "[condenser]\na = [1.0]\nb = [1.5]\n[widths]\ncount = 8\n",
    );
    let out = experiment("widths", &cfg, &dir.path().join("out"));
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("condenser.b[0]"), "{err}");
}

#[test]
fn bad_flags_are_usage_errors() {
    assert_eq!(
        widthlab(&["verify", "--profile", "nonsense"]).status.code(),
        Some(2)
    );
    assert_eq!(widthlab(&["verify", "--jobs", "0"]).status.code(), Some(2));
    assert_eq!(widthlab(&["widths"]).status.code(), Some(2));
    let dir = TempDir::new().unwrap();
    let out = experiment("widths", &dir.path().join("missing.toml"), dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn one_dimensional_widths_are_powers_of_two() {
    let dir = TempDir::new().unwrap();
    let cfg = config(dir.path(), "w.toml", WIDTHS_1D);
    let out_dir = dir.path().join("out");
    let out = experiment("widths", &cfg, &out_dir);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = fs::read_to_string(out_dir.join("widths.csv")).unwrap();
    let table = rows(&csv);
    assert_eq!(table.len(), 64);
    for (i, row) in table.iter().enumerate() {
        let m = i + 1;
        assert_eq!(row[0], m.to_string());
        let d: f64 = row[1].parse().unwrap();
        assert_eq!(d, 0.5f64.powi(m as i32));
        assert_eq!(row[2], "hilbert-exact");
    }
    let summary = &json(&out_dir.join("widths.json"))["summary"];
    let slope = summary["fitted_slope"].as_f64().unwrap();
    assert!((slope - std::f64::consts::LN_2).abs() < 1e-6, "{slope}");
    assert!((summary["capacity"]["value"].as_f64().unwrap() - 9.0647).abs() < 1e-4);
}

#[test]
fn every_file_carries_schema_and_config() {
    let dir = TempDir::new().unwrap();
    let cfg = config(dir.path(), "w.toml", WIDTHS_1D);
    let out_dir = dir.path().join("out");
    assert!(experiment("widths", &cfg, &out_dir).status.success());
    let manifest = json(&out_dir.join("run.json"));
    assert_eq!(manifest["experiment"], "widths");
    let files: Vec<&str> = manifest["files"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| f.as_str().unwrap())
        .collect();
    assert!(files.contains(&"widths.csv") && files.contains(&"supnorm_upper.json"));
    for name in files.iter().chain(&["run.json"]) {
        let path = out_dir.join(name);
        if name.ends_with(".csv") {
            let text = fs::read_to_string(&path).unwrap();
            assert!(text.starts_with("# schema_version: 1\n"));
            assert!(text.contains("# config: count = 64\n"));
        } else {
            let doc = json(&path);
            assert_eq!(doc["schema_version"], 1);
            assert_eq!(doc["config"]["widths"]["count"], 64);
        }
    }
    // the sidecar documents each CSV column
    let sidecar = json(&out_dir.join("widths.json"));
    let names: Vec<&str> = sidecar["columns"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(names, ["m", "d_m", "kind"]);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let cases = [
        ("widths", WIDTHS_1D, vec!["widths.csv", "supnorm_lower.csv", "supnorm_upper.csv"]),
        ("bw-approx", "[condenser]\na = [1.0, 1.0]\nb = [0.5, 0.3]\n[bw]\nm_max = 100\n", vec!["bw_error.csv", "bw_error.json"]),
        (
            "toeplitz-scan",
            "[weight]\ntau = [1.0]\nradii = [1.0]\n[toeplitz]\nsymbol = \"disc\"\nrho = [0.6]\ngamma = 0.5\nk_list = [10.0, 50.0]\n",
            vec!["concentration.csv"],
        ),
    ];
    for (kind, text, files) in cases {
        let cfg = config(dir.path(), &format!("{kind}.toml"), text);
        let (a, b) = (
            dir.path().join(format!("{kind}-a")),
            dir.path().join(format!("{kind}-b")),
        );
        assert!(experiment(kind, &cfg, &a).status.success());
        let threads = widthlab(&[
            kind,
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            b.to_str().unwrap(),
            "--jobs",
            "1",
        ]);
        assert!(threads.status.success());
        for f in files {
            assert_eq!(
                fs::read(a.join(f)).unwrap(),
                fs::read(b.join(f)).unwrap(),
                "{kind}: {f}"
            );
        }
    }
}

#[test]
fn annulus_capacity_within_one_percent() {
    let dir = TempDir::new().unwrap();
    let cfg = config(
        dir.path(),
        "c.toml",
        "[condenser]\na = [1.0]\nb = [0.5]\n[capacity]\nshape = \"annulus\"\nouter = 1.0\ninner = 0.5\nn = 1024\nsublevel = [0.5]\n",
    );
    let out_dir = dir.path().join("out");
    let out = experiment("capacity", &cfg, &out_dir);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let s = &json(&out_dir.join("capacity.json"))["summary"];
    let fd = s["finite_difference"]["capacity"]["value"]
        .as_f64()
        .unwrap();
    assert!((fd / 9.0647 - 1.0).abs() < 0.01, "{fd}");
    assert!(s["relative_error"].as_f64().unwrap() < 0.01);
    let doubled = s["sublevel"][0]["capacity"]["value"].as_f64().unwrap();
    assert!((doubled / s["closed_form"]["value"].as_f64().unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn bergman_and_bw_experiments() {
    let dir = TempDir::new().unwrap();
    let cfg = config(
        dir.path(),
        "b.toml",
        "[weight]\ntau = [1.0]\nradii = [1.0]\n[bergman]\nk_list = [200.0]\npoints = [[0.3, 0.0]]\n",
    );
    let out_dir = dir.path().join("b");
    assert!(experiment("bergman-density", &cfg, &out_dir)
        .status
        .success());
    let table = rows(&fs::read_to_string(out_dir.join("density.csv")).unwrap());
    let ratio: f64 = table[0][3].parse().unwrap();
    assert!((0.98..=1.02).contains(&ratio), "{ratio}");

    let cfg = config(
        dir.path(),
        "p.toml",
        "[condenser]\na = [1.0]\nb = [0.5]\np = [2]\n[bw]\nm_max = 50\nrank_m = 3\n",
    );
    let out_dir = dir.path().join("p");
    assert!(experiment("bw-approx", &cfg, &out_dir).status.success());
    let s = &json(&out_dir.join("bw_error.json"))["summary"];
    assert_eq!(s["bound_dominates"], true);
    assert!(s["rank"]["numerical_rank"].as_u64().unwrap() <= s["rank"]["bound"].as_u64().unwrap());
    assert_eq!(
        rows(&fs::read_to_string(out_dir.join("bw_error.csv")).unwrap()).len(),
        50
    );
}

#[test]
fn verify_profiles_and_exit_codes() {
    let out = widthlab(&["verify", "--profile", "closed-form"]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(
        stdout.lines().filter(|l| l.starts_with("[PASS]")).count(),
        4,
        "{stdout}"
    );

    let dir = TempDir::new().unwrap();
    let cfg = config(dir.path(), "v.toml", "[verify]\ncriteria = [2]\n");
    let out = widthlab(&[
        "verify",
        "--profile",
        "strict-slope",
        "--config",
        cfg.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("[FAIL]  2"));

    let out_dir = dir.path().join("out");
    let out = widthlab(&[
        "verify",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let report = json(&out_dir.join("verify.json"));
    assert_eq!(report["summary"]["outcomes"][0]["pass"], true);
    assert_eq!(json(&out_dir.join("run.json"))["experiment"], "verify");
}
