use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(dir: &Path, args: &[&str], config: &str) -> Output {
    let cfg = dir.join("run.toml");
    fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_ecotone"))
        .args(args)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .arg("--quiet")
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SMALL: &str = "[grid]\nextents = [1.0]\nnodes = [33]\n[stepper]\ndt = 1e-2\nhorizon = 0.5\nstride = 10\n";

#[test]
fn simulate_zero_state_writes_zero_csvs() {
    let tmp = TempDir::new().unwrap();
    let o = run(tmp.path(), &["simulate"], &format!("{SMALL}[initial]\nkind = \"zero\"\n[experiment]\nh_list = [0.125]\n"));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = tmp.path().join("out");
    // Leading columns are times, coordinates or separations.
    for (name, skip) in [("diagnostics.csv", 1), ("final_state.csv", 1), ("seminorms.csv", 2)] {
        let text = fs::read_to_string(out.join(name)).unwrap();
        let mut lines = text.lines();
        lines.next();
        for line in lines {
            let cells: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
            assert!(cells[skip..].iter().all(|&x| x == 0.0), "{name}: {line}");
        }
    }
    let manifest: Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "simulate");
    assert_eq!(manifest["status"], "ok");
    assert_eq!(manifest["config_sha256"].as_str().unwrap().len(), 64);
    assert!(manifest["files"].as_array().unwrap().iter().any(|f| f == "diagnostics.csv"));
}

#[test]
fn negative_dt_is_rejected_with_key() {
    let tmp = TempDir::new().unwrap();
    let o = run(tmp.path(), &["simulate"], "[stepper]\ndt = -0.1\n");
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("stepper.dt"), "{}", stderr(&o));
}

#[test]
fn unknown_key_is_rejected_with_key() {
    let tmp = TempDir::new().unwrap();
    let o = run(tmp.path(), &["simulate"], "[stepper]\ntimestep = 0.1\n");
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("timestep"), "{}", stderr(&o));
}

#[test]
fn unknown_subcommand_is_usage_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_ecotone")).arg("integrate").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_referenced_file_is_rejected() {
    let tmp = TempDir::new().unwrap();
    let o = run(tmp.path(), &["simulate"], "[initial]\nkind = \"file\"\npath = \"nowhere.csv\"\n");
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("initial.path"));
}

#[test]
fn identical_seed_gives_identical_bytes() {
    let cfg = format!("{SMALL}[initial]\nkind = \"random\"\n[experiment]\nh_list = [0.0625]\nnodes = [3, 16]\n");
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let c = TempDir::new().unwrap();
    for (dir, seed) in [(&a, "7"), (&b, "7"), (&c, "8")] {
        let o = run(dir.path(), &["simulate", "--seed", seed], &cfg);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    for name in ["diagnostics.csv", "final_state.csv", "seminorms.csv", "nodes.csv"] {
        let x = fs::read(a.path().join("out").join(name)).unwrap();
        let y = fs::read(b.path().join("out").join(name)).unwrap();
        assert_eq!(x, y, "{name}");
    }
    let x = fs::read(a.path().join("out/final_state.csv")).unwrap();
    let z = fs::read(c.path().join("out/final_state.csv")).unwrap();
    assert_ne!(x, z);
}

#[test]
fn blow_up_is_numerical_failure() {
    let tmp = TempDir::new().unwrap();
    // v'' + v' = v³ from v = 3 escapes in finite time.
    let cfg = "[model]\nf = [0.0, 0.0, 0.0, -1.0]\n[grid]\nnodes = [9]\n[stepper]\ndt = 1e-2\nhorizon = 5.0\n\
[initial]\nkind = \"constant\"\nvalue = 3.0\n";
    let o = run(tmp.path(), &["simulate"], cfg);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    let manifest: Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("out/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["status"], "numerical-failure");
}

const STABILIZE: &str = "[model]\nnonlinearity = \"bistable-cubic\"\nalpha = 0.01\n[grid]\nextents = [1.0]\nnodes = [65]\n\
[stepper]\ndt = 1e-2\nhorizon = 40.0\nstride = 100\n[initial]\nkind = \"tanh\"\nwidth = 0.1\n";

#[test]
fn stabilize_passes_and_misses_tolerance() {
    let tmp = TempDir::new().unwrap();
    let o = run(tmp.path(), &["stabilize"], &format!("{STABILIZE}[experiment]\ntolerance = 1e-3\n"));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("out/stabilize.json")).unwrap()).unwrap();
    assert_eq!(report["pass"], true);
    assert!(report["distance_l1"].as_f64().unwrap() <= 1e-3);

    let tmp = TempDir::new().unwrap();
    let o = run(tmp.path(), &["stabilize"], &format!("{STABILIZE}[experiment]\ntolerance = 1e-30\n"));
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn partition_equilibrium_exports() {
    let tmp = TempDir::new().unwrap();
    let cfg = "[model]\nnonlinearity = \"bistable-cubic\"\nalpha = 0.01\n[grid]\nextents = [1.0]\nnodes = [41]\n\
[experiment.partition]\ndefault_root = -1.0\nregions = [{ lower = [0.5], upper = [1.0], root = 1.0 }]\n";
    let o = run(tmp.path(), &["partition-eq"], cfg);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let summary: Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("out/equilibrium.json")).unwrap()).unwrap();
    for key in ["residual", "correction_norm", "margin", "source", "alpha"] {
        assert!(summary.get(key).is_some(), "{key}");
    }
    let csv = fs::read_to_string(tmp.path().join("out/equilibrium.csv")).unwrap();
    assert!(csv.starts_with("x,v0,w0\n"));
    assert_eq!(csv.lines().count(), 42);

    let tmp = TempDir::new().unwrap();
    let o = run(tmp.path(), &["partition-eq"], &cfg.replace("alpha = 0.01", "alpha = 0.5"));
    assert_eq!(o.status.code(), Some(2), "alpha above alpha_max is a precondition failure");
    let o = run(tmp.path(), &["partition-eq"], &cfg.replace("root = 1.0", "root = 0.5"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("experiment.partition.regions.root"));
}

#[test]
fn perturbation_report_fields() {
    let tmp = TempDir::new().unwrap();
    let o = run(tmp.path(), &["perturb-lab"], "[experiment]\nhorizons = [50.0, 100.0, 200.0]\n");
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r: Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("out/perturbation.json")).unwrap()).unwrap();
    for key in ["horizons", "int_du", "int_dh", "C1", "C2", "out_time", "pass"] {
        assert!(r.get(key).is_some(), "{key}");
    }
}

#[test]
fn forest_requires_section() {
    let tmp = TempDir::new().unwrap();
    let o = run(tmp.path(), &["forest"], SMALL);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("forest"));
}

#[test]
fn convergence_orders() {
    let tmp = TempDir::new().unwrap();
    let o = run(tmp.path(), &["convergence"], "");
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r: Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("out/convergence.json")).unwrap()).unwrap();
    assert!((r["spatial"]["order"].as_f64().unwrap() - 2.0).abs() < 0.1);
    assert!((r["temporal"]["order"].as_f64().unwrap() - 1.0).abs() < 0.15);
}
