use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fgs(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fgs"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn config(name: &str) -> String {
    format!("{}/../../configs/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("run.toml");
    std::fs::write(&path, text).unwrap();
    path
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn report(out: &Path, name: &str) -> serde_json::Value {
    serde_json::from_slice(&std::fs::read(out.join(name)).unwrap()).unwrap()
}

#[test]
fn solve_with_the_example_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = fgs(&["solve", "--config", &config("power_n2.toml")], &out);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = report(&out, "report.json");
    assert_eq!(r["converged"], true);
    assert_eq!(r["grid"]["M"], 256);
    for key in ["energy", "pohozaev_residual", "grad_norm", "c_mp_estimate", "boundary_mass", "wall_time_s"] {
        assert!(r[key].is_number(), "{key}");
    }
    let snapshot = std::fs::read(out.join("ground_state.fgs1")).unwrap();
    assert_eq!(snapshot.len(), 28 + 8 * 256 * 256);
    let field = fgs_core::spectral::read_fgs1(&mut snapshot.as_slice()).unwrap();
    assert!(field.min() > 0.0);
}

#[test]
fn verify_with_seed_42() {
    let dir = tempfile::tempdir().unwrap();
    let o = fgs(&["verify", "--seed", "42"], dir.path());
    let text = String::from_utf8_lossy(&o.stdout);
    assert_eq!(o.status.code(), Some(0), "{text}{}", stderr(&o));
    let summary = text.lines().last().unwrap();
    let (passed, total) = summary.split_once(" suites").unwrap().0.split_once('/').unwrap();
    assert_eq!(passed, total);
    assert!(passed.parse::<usize>().unwrap() >= 12);
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS ")).count(), fgs_cli::verify::suite_names().len());
    let r = report(dir.path(), "verify.json");
    assert_eq!(r["seed"], 42);
}

#[test]
fn malformed_config_leaves_no_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(dir.path(), "[grid]\nN = 2\nM = \"many\"\n");
    let o = fgs(&["solve", "--config", cfg.to_str().unwrap()], &out);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("ERROR:2:ConfigParse at line 3, column 5"), "{}", stderr(&o));
    assert!(!out.exists());
}

#[test]
fn out_of_range_values_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[grid]\nalpha = 1.5\n");
    let o = fgs(&["solve", "--config", cfg.to_str().unwrap()], &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("ConfigRange(\"alpha\")"));
    let o = fgs(&["kernel", "--M", "7"], &dir.path().join("out"));
    assert!(stderr(&o).starts_with("ERROR:2:ConfigRange(\"M\")"));
    let o = fgs(&["solve", "--config", "/nonexistent/run.toml"], &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_arguments_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = fgs(&["frobnicate"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("ERROR:2:"));
    let o = fgs(&["solve", "--M", "lots"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn numeric_failure_exits_with_code_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(dir.path(), "[grid]\nN = 1\nM = 64\nL = 10.0\n[solver]\nmax_iters = 1\n");
    let o = fgs(&["solve", "--config", cfg.to_str().unwrap()], &out);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).starts_with("ERROR:3:"));
    assert!(!out.exists());
}

#[test]
fn path_scan_writes_the_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("power_n2.toml");
    let args = ["path-scan", "--config", &cfg, "--samples", "33", "--tmin", "0.6", "--tmax", "1.4"];
    let o = fgs(&args, dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("path_scan.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,energy,g"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 33);
    assert_eq!(rows[0][0], 0.6);
    assert_eq!(rows[32][0], 1.4);
    assert!(rows.windows(2).all(|w| w[1][2] < w[0][2]));
    let peak = (0..33).max_by(|&a, &b| rows[a][1].total_cmp(&rows[b][1])).unwrap();
    assert_eq!(rows[peak][0], 1.0);
}

#[test]
fn kernel_from_json_config() {
    let dir = tempfile::tempdir().unwrap();
    let o = fgs(&["kernel", "--config", &config("kernel_bessel.json")], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("kernel.csv")).unwrap();
    assert!(text.starts_with("r,value\n"));
    assert_eq!(text.lines().count(), 201);
    let s = report(dir.path(), "kernel_summary.json");
    assert_eq!(s["positive"], true);
    assert!((s["l1_mass"].as_f64().unwrap() - 1.0).abs() < 1e-3);
}

#[test]
fn resolvent_kernel_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[grid]\nN = 2\nM = 128\nL = 16.0\n[kernel]\nkind = \"resolvent\"\ndelta0 = 0.25\n");
    let o = fgs(&["kernel", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s = report(dir.path(), "kernel_summary.json");
    assert_eq!(s["positive_resolved"], true);
    assert!(s["exp_rate"].as_f64().unwrap() > 0.0);
}

#[test]
fn spatial_report_carries_both_levels() {
    let dir = tempfile::tempdir().unwrap();
    let o = fgs(&["spatial", "--config", &config("spatial_bump.toml")], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = report(dir.path(), "spatial_report.json");
    let (d_inf, d_mp) = (r["d_inf"].as_f64().unwrap(), r["d_mp_bound"].as_f64().unwrap());
    assert!(0.0 < d_mp && d_mp < d_inf);
    assert_eq!(r["problem"], "gaussian_bump");
}

#[test]
fn single_thread_reports_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["solve", "--N", "1", "--alpha", "0.8", "--L", "16", "--M", "128", "--threads", "1", "--seed", "3"];
    let a = fgs(&args, &dir.path().join("a"));
    let b = fgs(&args, &dir.path().join("b"));
    assert_eq!((a.status.code(), b.status.code()), (Some(0), Some(0)));
    let read = |d: &str| std::fs::read(dir.path().join(d).join("report.json")).unwrap();
    assert_eq!(read("a"), read("b"));
    assert!(String::from_utf8(read("a")).unwrap().contains("\"wall_time_s\": 0.0000000000000000e0"));
}
