use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const CONFIG: &str = r#"
s = 0.75
T = 0.5
dt = 0.05
stride = 2
seed = 7

[grid]
n = 16
L = 12.0

[recipe]
kind = "gaussian-bump"
amplitude = 0.0
width = 0.75
"#;

fn cwave(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cwave"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("exp.toml");
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn files_under(root: &Path, dir: &Path, out: &mut BTreeSet<String>) {
    for e in fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            files_under(root, &p, out);
        } else {
            out.insert(p.strip_prefix(root).unwrap().to_string_lossy().replace('\\', "/"));
        }
    }
}

fn manifest(dir: &Path) -> toml::Table {
    toml::from_str(&fs::read_to_string(dir.join("manifest.toml")).unwrap()).unwrap()
}

fn manifest_files(dir: &Path) -> BTreeSet<String> {
    manifest(dir)["files"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect()
}

#[test]
fn missing_config_is_a_usage_error() {
    let o = cwave(&["gwp"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--config"));
    assert_eq!(cwave(&[]).status.code(), Some(2));
}

#[test]
fn out_of_range_s_names_the_interval() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), CONFIG);
    let out = tmp.path().join("o");
    let o = cwave(&["gwp", "--config", &cfg, "--out", out.to_str().unwrap(), "s=0.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("(1/2, 1)"), "{}", stderr(&o));
    // nothing is computed or written before validation
    assert!(!out.exists());
}

#[test]
fn unknown_keys_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &format!("bogus = 1\n{CONFIG}"));
    let o = cwave(&["simulate", "--config", &cfg, "--out", tmp.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bogus"), "{}", stderr(&o));
}

#[test]
fn every_violation_gets_its_own_line() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), CONFIG);
    let o = cwave(&["simulate", "--config", &cfg, "s=2.0", "grid.n=12", "dt=1e3"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.lines().count() >= 2, "{err}");
    assert!(err.contains("s = 2") && err.contains("12"), "{err}");
}

#[test]
fn simulate_zero_datum_and_echo_override() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), CONFIG);
    let out = tmp.path().join("sim");
    let o = cwave(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap(), "T=0.4", "--seed", "11"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    let echo = fs::read_to_string(out.join("config.toml")).unwrap();
    let echoed: toml::Table = toml::from_str(&echo).unwrap();
    assert_eq!(echoed["T"].as_float(), Some(0.4));
    assert_eq!(echoed["seed"].as_integer(), Some(11));
    assert_eq!(echoed["grid"]["L"].as_float(), Some(12.0));
    let hash = echo.lines().next().unwrap().trim_start_matches("# config hash: ").to_string();
    assert_eq!(manifest(&out)["config_hash"].as_str(), Some(hash.as_str()));

    let csv = fs::read_to_string(out.join("energy.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(2).collect();
    assert_eq!(rows.len(), 5);
    for r in rows {
        for v in r.split(',').skip(1) {
            assert_eq!(v.parse::<f64>().unwrap(), 0.0, "{r}");
        }
    }
    let mut present = BTreeSet::new();
    files_under(&out, &out, &mut present);
    present.remove("manifest.toml");
    present.remove("run.log");
    assert_eq!(present, manifest_files(&out));
    assert!(present.contains("trajectory/manifest.toml"));

    // the echo alone reproduces the run
    let again = tmp.path().join("again");
    let o = cwave(&["simulate", "--config", out.join("config.toml").to_str().unwrap(), "--out", again.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for f in manifest_files(&out) {
        assert_eq!(fs::read(out.join(&f)).unwrap(), fs::read(again.join(&f)).unwrap(), "{f}");
    }
}

#[test]
fn verify_symbol_is_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = tmp.path().join(name);
        let o = cwave(&[
            "verify-symbol", "--s", "0.75", "--N", "16", "--samples", "2000", "--seed", "5", "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        out
    };
    let (a, b) = (run("a"), run("b"));
    for f in ["symbol.csv", "report.toml", "config.toml", "manifest.toml"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    assert_ne!(fs::read(a.join("run.log")).unwrap().len(), 0);
    let bad = cwave(&["verify-symbol", "--s", "0.75", "--N", "3", "--samples", "2000"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn gwp_writes_exactly_its_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), CONFIG);
    let out = tmp.path().join("gwp");
    let o = cwave(&[
        "gwp", "--config", &cfg, "--out", out.to_str().unwrap(), "recipe.amplitude=2.0", "stride=1",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("verdict"));
    let mut present = BTreeSet::new();
    files_under(&out, &out, &mut present);
    present.remove("manifest.toml");
    present.remove("run.log");
    let declared = manifest_files(&out);
    assert_eq!(present, declared);
    let expect: BTreeSet<String> = ["config.toml", "report.toml", "energy.csv", "intervals.csv"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    assert_eq!(declared, expect);
    let report: toml::Table = toml::from_str(&fs::read_to_string(out.join("report.toml")).unwrap()).unwrap();
    assert_eq!(report["verdict"].as_str(), Some("consistent"));
}

#[test]
fn sweep_breakdown_and_diagnose() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), CONFIG);
    let ac = tmp.path().join("ac");
    let o = cwave(&[
        "almost-conservation", "--config", &cfg, "--out", ac.to_str().unwrap(), "--sweep-N", "1,4",
        "recipe.amplitude=0.3", "T=1.0", "stride=1",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let summary = fs::read_to_string(ac.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 3);
    assert!(ac.join("N4/intervals.csv").exists());
    let bad = cwave(&["almost-conservation", "--config", &cfg, "--sweep-N", "3"]);
    assert_eq!(bad.status.code(), Some(2));

    let sim = tmp.path().join("sim");
    let o = cwave(&[
        "simulate", "--config", &cfg, "--out", sim.to_str().unwrap(), "recipe.amplitude=0.5", "T=1.0",
        "stride=1",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let traj = sim.join("trajectory");
    let bd = tmp.path().join("bd");
    let o = cwave(&[
        "breakdown", "--traj", traj.to_str().unwrap(), "--interval", "0,0.5", "--s", "0.75", "--N", "2",
        "--out", bd.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s: toml::Table = toml::from_str(&fs::read_to_string(bd.join("summary.toml")).unwrap()).unwrap();
    let (sum, total) = (s["row_sum"].as_float().unwrap(), s["total"].as_float().unwrap());
    assert!((sum - total).abs() <= 1e-9 * total.abs().max(1e-300));
    let o = cwave(&["breakdown", "--traj", traj.to_str().unwrap(), "--interval", "0;1", "--s", "0.75", "--N", "2"]);
    assert_eq!(o.status.code(), Some(2));

    let dg = tmp.path().join("dg");
    let o = cwave(&[
        "diagnose", "--traj", traj.to_str().unwrap(), "--s", "0.75", "--N", "2", "--interval", "0.5",
        "--out", dg.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = fs::read_to_string(dg.join("intervals.csv")).unwrap();
    assert_eq!(rows.lines().count(), 3);
}

#[test]
fn blow_up_leaves_partial_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), CONFIG);
    let out = tmp.path().join("boom");
    let o = cwave(&[
        "simulate", "--config", &cfg, "--out", out.to_str().unwrap(), "nonlinearity=\"focusing\"",
        "recipe.amplitude=300.0", "T=5.0", "dt=0.05",
    ]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(out.join("energy.csv.partial").exists());
    assert!(out.join("trajectory.partial/manifest.toml").exists());
    assert!(!out.join("energy.csv").exists());
    assert_eq!(manifest(&out)["status"].as_str(), Some("partial"));
}
