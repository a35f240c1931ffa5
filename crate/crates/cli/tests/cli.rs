use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use qatm_cli::output::sha256_hex;
use serde_json::Value;

fn qatm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qatm"))
        .args(args)
        .env_remove("QATM_OUT")
        .output()
        .expect("binary runs")
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn heat_run_writes_four_tables_starting_at_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let o = qatm(&[
        "run",
        "--set",
        "t_max=2",
        "--measures",
        "heat",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    for site in ["M1", "M2", "S1", "S2"] {
        let rows = csv_rows(&out.join(format!("heat_{site}.csv")));
        assert_eq!(rows[0], vec!["t", "value"]);
        assert_eq!(rows[1], vec!["0.0", "0.0"]);
        assert_eq!(rows.len(), 22);
    }
    let m = manifest(&out);
    assert_eq!(m["format"], "qatm-manifest/1");
    assert_eq!(m["config"]["t_max"], 2.0);
    let files = m["files"].as_array().unwrap();
    assert_eq!(files.len(), 4);
    for f in files {
        let bytes = fs::read(out.join(f["path"].as_str().unwrap())).unwrap();
        assert_eq!(f["sha256"].as_str().unwrap(), sha256_hex(&bytes));
    }
}

#[test]
fn cycle_only_run_records_label() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("c");
    let o = qatm(&["run", "--measures", "cycle", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let m = manifest(&out);
    assert_eq!(m["cycle"]["label"], "A");
    assert_eq!(m["cycle"]["virtual_temperature"], -0.125);
    assert_eq!(m["cycle"]["boundary_T_M1"], 0.5);
}

#[test]
fn invalid_energies_are_a_validation_error() {
    let o = qatm(&["validate", "--set", "E_M1=10"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("E_M2 > E_M1"));
    let o = qatm(&["validate", "--set", "T_M1=0.8"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("cycle = B"));
}

#[test]
fn config_file_and_overrides_compose() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("s.cfg");
    fs::write(&cfg, "# cycle B\nT_M1 = 0.8\ng = 0.05\n").unwrap();
    let out = tmp.path().join("o");
    let o = qatm(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--set",
        "g=0.07",
        "--measures",
        "cycle",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let m = manifest(&out);
    assert_eq!(m["config"]["T_M1"], 0.8);
    assert_eq!(m["config"]["g"], 0.07);
    assert_eq!(m["cycle"]["label"], "B");

    fs::write(&cfg, "T_M1 = 0.8\nT_M1 = 0.9\n").unwrap();
    let o = qatm(&["validate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = qatm(&[
        "validate",
        "--config",
        tmp.path().join("missing").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn heat_sweep_changes_sign_across_the_boundary() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("sweep");
    let o = qatm(&[
        "sweep",
        "--param",
        "T_M1",
        "--values",
        "0.1,0.3,0.7,0.9",
        "--measures",
        "heat_M1",
        "--jobs",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let rows = csv_rows(&out.join("sweep.csv"));
    assert_eq!(rows[0], vec!["param", "t", "measure", "value"]);
    let mut means = Vec::new();
    for p in ["0.1", "0.3", "0.7", "0.9"] {
        let v: Vec<f64> = rows[1..]
            .iter()
            .filter(|r| r[0] == p)
            .map(|r| {
                assert_eq!(r[2], "heat_M1");
                r[3].parse().unwrap()
            })
            .collect();
        assert_eq!(v.len(), 501);
        means.push(v.iter().sum::<f64>() / v.len() as f64);
    }
    assert!(means[0] > 0.0 && means[1] > 0.0, "{means:?}");
    assert!(means[2] < 0.0 && means[3] < 0.0, "{means:?}");
    let m = manifest(&out);
    let sweep = &m["sweeps"][0];
    assert_eq!(sweep["boundary_T_M1"], 0.5);
    assert_eq!(sweep["points"][1]["cycle"]["label"], "A");
    assert_eq!(sweep["points"][2]["cycle"]["label"], "B");
}

#[test]
fn sweep_values_are_validated() {
    let o = qatm(&[
        "sweep",
        "--param",
        "g",
        "--values",
        "",
        "--out",
        "/tmp/never",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = qatm(&[
        "sweep",
        "--param",
        "g",
        "--values",
        "0.1,0.05,0.2",
        "--out",
        "/tmp/never",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = qatm(&[
        "sweep",
        "--param",
        "nope",
        "--values",
        "1",
        "--out",
        "/tmp/never",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!Path::new("/tmp/never").exists());
}

#[test]
fn failed_points_are_recorded_and_the_sweep_continues() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("partial");
    let o = qatm(&[
        "sweep",
        "--param",
        "E_S2",
        "--values",
        "10,11",
        "--set",
        "t_max=1",
        "--measures",
        "concurrence_S",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let m = manifest(&out);
    let points = m["sweeps"][0]["points"].as_array().unwrap();
    assert_eq!(points[0]["status"], "ok");
    assert_eq!(points[1]["status"], "failed");
    assert!(points[1]["error"].as_str().unwrap().contains("resonance"));
    let rows = csv_rows(&out.join("sweep.csv"));
    assert_eq!(rows.len(), 1 + 11);
}

#[test]
fn integration_failure_exits_three_and_leaves_no_files() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("boom");
    let o = qatm(&[
        "run",
        "--set",
        "dt=2",
        "--set",
        "t_max=200",
        "--set",
        "sample_stride=1",
        "--set",
        "gamma_1=5",
        "--set",
        "gamma_2=5",
        "--measures",
        "heat",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let leftovers = fs::read_dir(&out).map(|d| d.count()).unwrap_or(0);
    assert_eq!(leftovers, 0);
}

#[test]
fn output_directory_comes_from_flag_or_environment() {
    let o = qatm(&["run", "--measures", "cycle"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("QATM_OUT"));

    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("env");
    let o = Command::new(env!("CARGO_BIN_EXE_qatm"))
        .args(["run", "--measures", "cycle"])
        .env("QATM_OUT", &out)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(out.join("manifest.json").exists());
}

#[test]
fn unwritable_output_is_an_io_error() {
    let tmp = tempfile::tempdir().unwrap();
    let blocker = tmp.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let out = blocker.join("sub");
    let o = qatm(&["run", "--measures", "cycle", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains(out.to_str().unwrap()));
}

#[test]
fn trajectory_dump_has_full_state_columns() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("traj");
    let o = qatm(&[
        "run",
        "--set",
        "t_max=0.5",
        "--measures",
        "cycle",
        "--dump-trajectory",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&out.join("trajectory.csv"));
    assert_eq!(rows[0].len(), 1 + 2 * 256);
    assert_eq!(rows[0][1], "re_0_0");
    assert_eq!(rows[0][257], "im_0_0");
    assert_eq!(rows.len(), 1 + 6);
    let trace: f64 = (0..16)
        .map(|k| rows[6][1 + 17 * k].parse::<f64>().unwrap())
        .sum();
    assert!((trace - 1.0).abs() < 1e-12);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let mut contents = Vec::new();
    for name in ["a", "b"] {
        let out = tmp.path().join(name);
        let o = qatm(&[
            "sweep",
            "--param",
            "g",
            "--range",
            "0.03:0.09:4",
            "--set",
            "t_max=3",
            "--jobs",
            "3",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        contents.push((
            fs::read(out.join("sweep.csv")).unwrap(),
            fs::read(out.join("sweep_scalars.csv")).unwrap(),
            fs::read(out.join("manifest.json")).unwrap(),
        ));
    }
    assert!(contents[0] == contents[1]);
}
