//! End-to-end checks of the `selfnorm-lab` binary: exit codes, CSV output
//! and reproducibility.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_selfnorm-lab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

const SMALL: &str = r#"
[[experiment]]
name = "small"
kind = "theorem_main"
model = "rademacher"
n_grid = [100, 1000]
replicates = 2000
t_set = [0.5, 1.0]
seed = 5
thresholds = { final = 0.06 }
"#;

#[test]
fn run_passes_and_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", SMALL);
    let out_dir = dir.path().join("out");
    let o = run(&["run", &cfg, "--output", out_dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("small.json")).unwrap()).unwrap();
    for key in ["experiment", "model", "alpha", "n_grid", "distances", "threshold", "verdict", "seeds"] {
        assert!(report.get(key).is_some(), "missing {key}");
    }
    assert_eq!(report["verdict"], "pass");
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("manifest.json")).unwrap()).unwrap();
    let hash = selfnorm_lab::cli::config_hash(SMALL.as_bytes());
    assert_eq!(manifest["config_hash"], hash.as_str());
    assert_eq!(manifest["experiments"][0]["verdict"], "pass");
    assert!(!out_dir.join("small.json.tmp").exists());
}

#[test]
fn statistical_failure_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", &SMALL.replace("final = 0.06", "final = 0.0001"));
    let o = run(&["run", &cfg, "--output", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn unknown_model_exits_2_naming_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", &SMALL.replace("\"rademacher\"", "\"nonesuch\""));
    let o = run(&["run", &cfg, "--output", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("model") && err.contains("nonesuch"), "{err}");
}

#[test]
fn malformed_config_exits_2_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "[[experiment]]\nname = \"x\nkind = 3\n");
    let o = run(&["run", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));
    let cfg = write(dir.path(), "d.toml", &SMALL.replace("seed = 5", "sede = 5"));
    let o = run(&["run", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("sede"));
}

#[test]
fn hypothesis_violation_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", &SMALL.replace("\"rademacher\"", "\"slowvar_tail\""));
    let o = run(&["run", &cfg, "--output", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("domain of attraction"));
}

#[test]
fn resource_error_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.csv");
    let o = run(&["path", "--alpha", "1.5", "--epsilon", "1e-7", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn overrides_apply() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", SMALL);
    let a = dir.path().join("a");
    let o = run(&[
        "run", &cfg, "--output", a.to_str().unwrap(), "--seed", "99", "--replicates", "1000",
        "--n-grid", "50,500", "--set", "grid_size=512", "--set", "thresholds={final=0.5}",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(a.join("small.json")).unwrap()).unwrap();
    assert_eq!(r["n_grid"], serde_json::json!([50, 500]));
    assert_eq!(r["replicates"], 1000);
    assert_eq!(r["seeds"][0]["seed"], 99);
    assert_eq!(r["threshold"], 0.5);
    let o = run(&["run", &cfg, "--set", "bogus=1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn same_config_twice_gives_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", SMALL);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        assert_eq!(run(&["run", &cfg, "--output", d.to_str().unwrap(), "--dump"]).status.code(), Some(0));
    }
    assert_eq!(fs::read(a.join("small.json")).unwrap(), fs::read(b.join("small.json")).unwrap());
    let dumps: Vec<_> = fs::read_dir(&a).unwrap().filter_map(|e| e.ok()).collect();
    assert!(dumps.len() >= 2);
}

#[test]
fn sample_csv() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("s.csv");
    let o = run(&["sample", "--model", "rademacher", "--n", "5", "--seed", "3", "--out", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&p).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x");
    assert_eq!(lines.len(), 6);
    assert!(lines[1..].iter().all(|l| *l == "1" || *l == "-1"));
    assert!(text.ends_with('\n'));

    let o1 = run(&["sample", "--model", "pareto_sym:1.5", "--n", "1000", "--seed", "3"]);
    let o2 = run(&["sample", "--model", "pareto_sym:1.5", "--n", "1000", "--seed", "3"]);
    assert_eq!(o1.stdout, o2.stdout);
    let text = String::from_utf8(o1.stdout).unwrap();
    assert!(text.starts_with("x\n"));
    assert_eq!(text.lines().count(), 1001);
    assert!(text.lines().skip(1).all(|l| l.parse::<f64>().unwrap().abs() >= 1.0));
}

#[test]
fn path_csv_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bm.csv");
    let o = run(&["path", "--alpha", "2", "--seed", "4", "--out", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let path = fs::read_to_string(&p).unwrap();
    assert!(path.starts_with("time,value\n0,0\n"));
    assert_eq!(fs::read_to_string(dir.path().join("bm.jumps.csv")).unwrap(), "time,size\n");

    let p = dir.path().join("sub.csv");
    let args = ["path", "--alpha", "0.5", "--p", "1", "--seed", "4", "--out", p.to_str().unwrap()];
    assert_eq!(run(&args).status.code(), Some(0));
    let jumps = fs::read_to_string(dir.path().join("sub.jumps.csv")).unwrap();
    let sizes: Vec<f64> = jumps.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(!sizes.is_empty());
    assert!(sizes.iter().all(|&s| s > 0.0));
    let first = fs::read(&p).unwrap();
    assert_eq!(run(&args).status.code(), Some(0));
    assert_eq!(fs::read(&p).unwrap(), first);
}

#[test]
fn an_and_report_subcommands() {
    let o = run(&["an", "--model", "rademacher", "--n", "100,10000"]);
    assert_eq!(o.status.code(), Some(0));
    let s = String::from_utf8(o.stdout).unwrap();
    assert!(s.contains("1.000000000000e1") && s.contains("1.000000000000e2"), "{s}");

    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", SMALL);
    let out = dir.path().join("o");
    run(&["run", &cfg, "--output", out.to_str().unwrap()]);
    let o = run(&["report", out.join("small.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8(o.stdout).unwrap().contains("small"));
}
