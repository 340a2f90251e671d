use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use rcatenoid::export::{parse_obj, CsvTable};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_rcatenoid"));
    cmd.env_remove("RCATENOID_OUT_DIR");
    cmd
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin().args(args).arg("--out-dir").arg(dir).output().expect("binary runs")
}

fn col(table: &CsvTable, name: &str) -> Vec<f64> {
    let i = table.column(name).unwrap();
    table.rows.iter().map(|r| r[i]).collect()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn profile_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["p1.csv", "p2.csv"] {
        let out = run(&["profile", "--a", "0.7", "--n-t", "60", "-o", name], dir.path());
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let p1 = fs::read(dir.path().join("p1.csv")).unwrap();
    assert_eq!(p1, fs::read(dir.path().join("p2.csv")).unwrap());
    let table = CsvTable::parse(std::str::from_utf8(&p1).unwrap()).unwrap();
    assert_eq!(table.rows.len(), 2 * 60 + 1);
    assert_eq!(table.meta_value("n"), Some("4"));
}

#[test]
fn mesh_is_byte_identical_and_needs_n_two() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["m1.obj", "m2.obj"] {
        let out = run(&["-n", "2", "-r", "0", "mesh", "--a", "0.5", "--n-t", "20", "--n-theta", "16", "-o", name], dir.path());
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let m1 = fs::read_to_string(dir.path().join("m1.obj")).unwrap();
    assert_eq!(m1, fs::read_to_string(dir.path().join("m2.obj")).unwrap());
    let (vertices, faces) = parse_obj(&m1).unwrap();
    assert_eq!(vertices.len(), (2 * 20 + 1) * 16);
    assert_eq!(faces.len(), 2 * 20 * 16);

    let out = run(&["-n", "4", "mesh", "--a", "0.5"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("n = 2"));
}

#[test]
fn verify_report_without_timings_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["v1.json", "v2.json"] {
        let out = run(&["verify", "--no-timings", "-o", name], dir.path());
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let v1 = fs::read(dir.path().join("v1.json")).unwrap();
    assert_eq!(v1, fs::read(dir.path().join("v2.json")).unwrap());
    let report: serde_json::Value = serde_json::from_slice(&v1).unwrap();
    assert_eq!(report["summary"]["pass"], true);
    assert!(report["checks"].as_array().unwrap().iter().all(|c| c["seconds"] == 0.0));
}

#[test]
fn failing_check_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["verify", "--no-timings", "--conservation-tol", "1e-30"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("[FAIL]"));
    assert!(dir.path().join("verify_report.json").exists());
}

#[test]
fn bad_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["-n", "3", "-r", "3", "length", "--a", "1"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["length", "--a", "-1"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["profile"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"], dir.path()).status.code(), Some(2));
}

#[test]
fn unvalidated_heights_need_opt_in() {
    // (3, 1) has q = 1/2 and T < 0.9
    let dir = tempfile::tempdir().unwrap();
    let args = ["-n", "3", "-r", "1", "bvp", "--t0", "0.9", "--radius", "2"];
    assert_eq!(run(&args, dir.path()).status.code(), Some(2));
    let mut opted = args.to_vec();
    opted.push("--allow-unvalidated");
    let out = run(&opted, dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let res: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(res["validated"], false);
}

#[test]
fn flags_override_file_which_overrides_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "n = 6\nr = 2\na_list = [0.5, 1.0]\n[quadrature]\nrel_tol = 1e-11\n").unwrap();
    let cfg = cfg.to_str().unwrap();

    let out = run(&["--config", cfg, "length"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = CsvTable::parse(&stdout(&out)).unwrap();
    assert_eq!((table.meta_value("n"), table.meta_value("r")), (Some("6"), Some("2")));
    assert_eq!(table.rows.len(), 2);
    assert_eq!(table.meta_value("quad_rel_tol").map(|v| v.parse::<f64>().unwrap()), Some(1e-11));

    let out = run(&["--config", cfg, "-r", "1", "length", "--a", "2"], dir.path());
    let table = CsvTable::parse(&stdout(&out)).unwrap();
    assert_eq!((table.meta_value("n"), table.meta_value("r")), (Some("6"), Some("1")));
    assert_eq!(col(&table, "a"), vec![2.0]);

    let out = run(&["length", "--a", "1"], dir.path());
    let table = CsvTable::parse(&stdout(&out)).unwrap();
    assert_eq!((table.meta_value("n"), table.meta_value("r")), (Some("4"), Some("1")));
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .env("RCATENOID_OUT_DIR", dir.path())
        .args(["profile", "--a", "1", "--n-t", "10"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("profile.csv").exists());
}

#[test]
fn intersect_and_envelope_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["intersect", "--a", "0.5", "--b", "1.5"], dir.path());
    let table = CsvTable::parse(&stdout(&out)).unwrap();
    let t = col(&table, "t");
    assert_eq!(t.len(), 2);
    assert_eq!(t[0], -t[1]);

    let out = run(&["envelope", "--t-count", "4"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = CsvTable::parse(&stdout(&out)).unwrap();
    assert_eq!(table.rows.len(), 8);
    assert!(col(&table, "ok").iter().all(|&ok| ok == 1.0));
}
