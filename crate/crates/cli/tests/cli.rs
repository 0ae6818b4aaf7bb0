use std::path::Path;
use std::process::{Command, Output};

fn fano(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fano")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn column(csv: &str, name: &str) -> Vec<Option<f64>> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let j = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(j).unwrap().parse().ok()).collect()
}

#[test]
fn profile_header_and_agreement() {
    let o = fano(&["profile", "--set", "sweep.count=9", "--oracle", "auto"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(out.starts_with("omega_L,epsilon,n_c_closed,n_c_effective,n_c_oracle\n"));
    let eff = column(&out, "n_c_effective");
    let orc = column(&out, "n_c_oracle");
    let peak = eff.iter().flatten().copied().fold(0.0, f64::max);
    for (a, b) in eff.iter().zip(&orc) {
        assert!((a.unwrap() - b.unwrap()).abs() <= 1e-2 * peak);
    }
}

#[test]
fn zero_field_profile_is_empty() {
    let o = fano(&["profile", "--set", "Omega=0", "--set", "sweep.count=5", "--oracle", "none"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(column(&out, "n_c_effective").iter().all(|v| *v == Some(0.0)));
    assert!(column(&out, "n_c_oracle").iter().all(|v| v.is_none()));
}

#[test]
fn lossy_profile_has_no_closed_form_column_values() {
    let o = fano(&["profile", "--set", "Gamma_e=0.3", "--set", "sweep.count=5", "--oracle", "none"]);
    assert!(o.status.success());
    assert!(column(&stdout(&o), "n_c_closed").iter().all(|v| v.is_none()));
}

#[test]
fn normalized_profile_peaks_at_one() {
    let o = fano(&["profile", "--set", "sweep.count=41", "--oracle", "none", "--normalize", "peak"]);
    let max = column(&stdout(&o), "n_c_effective").into_iter().flatten().fold(0.0, f64::max);
    assert_eq!(max, 1.0);
}

#[test]
fn sweep_crosses_null_point() {
    let o = fano(&["sweep", "--set", "sweep.start=0.5", "--set", "sweep.stop=0.9", "--set", "sweep.count=5"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("Omega,gamma_eff,q_eff_over_q,omega_eff,C\n"));
    let shift: Vec<f64> = column(&out, "omega_eff").into_iter().map(|v| v.unwrap() - 10.0).collect();
    assert!(shift[0] < 0.0 && shift[4] > 0.0);
    let ratio: Vec<f64> = column(&out, "q_eff_over_q").into_iter().flatten().collect();
    assert!(ratio.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn eit_zero_and_marker() {
    let o = fano(&["eit", "--set", "q=15", "--set", "sweep.start=0.5", "--set", "sweep.stop=1.5", "--set", "sweep.count=3"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("Omega,epsilon,Gamma_e,n_c,Omega_eit\n"));
    let n = column(&out, "n_c");
    assert!(n[1].unwrap().abs() < 1e-12 && n[0].unwrap() > 1e-3);
    assert!(column(&out, "Omega_eit").iter().all(|v| *v == Some(1.0)));
}

#[test]
fn output_is_deterministic_and_atomic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let o = fano(&["profile", "--set", "sweep.count=7", "--oracle", "101,10", "--out", p.to_str().unwrap()]);
        assert!(o.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let bad = dir.path().join("bad.csv");
    let o = fano(&["profile", "--set", "Gamma_c=-1", "--out", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!bad.exists());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 2);
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"model": {"q": 5}}"#).unwrap();
    assert_eq!(fano(&["profile", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(fano(&["profile", "--set", "nonsense=1"]).status.code(), Some(2));
    assert_eq!(fano(&["profile", "--oracle", "12"]).status.code(), Some(2));
    assert_eq!(fano(&["sweep", "--set", "Gamma_e=0.2"]).status.code(), Some(2));
    assert_eq!(fano(&["validate", "--only", "11"]).status.code(), Some(2));
}

#[test]
fn numerical_failures_exit_with_three() {
    // a grid this coarse cannot reach the requested tolerance
    let o = fano(&["profile", "--set", "Omega=10", "--set", "sweep.count=2", "--oracle", "tol=1e-7"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn config_file_is_used() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(
        &cfg,
        r#"{"model": {"q": 15, "Omega": 1, "Gamma_c": 1, "Gamma_e": 0, "gamma_eg": 0, "omega_e": 10},
            "sweep": {"axis": "Omega", "start": 0.9, "stop": 1.1, "count": 3},
            "eit": {"epsilon": [0, 5], "Gamma_e": [0]}}"#,
    )
    .unwrap();
    let o = fano(&["eit", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 7);
    let marker = column(&out, "Omega_eit");
    assert!((marker[5].unwrap() - (1.0f64 + 5.0 / 15.0).sqrt()).abs() < 1e-11);
}

fn write_samples(path: &Path, xs: &[f64], f: impl Fn(f64) -> f64) {
    let mut s = String::from("omega_L,value\n");
    for &x in xs {
        s.push_str(&format!("{x},{}\n", f(x)));
    }
    std::fs::write(path, s).unwrap();
}

#[test]
fn fit_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("s.csv");
    let xs: Vec<f64> = (0..120).map(|i| -12.0 + 0.2 * i as f64).collect();
    write_samples(&input, &xs, |x| {
        let e = (x - 0.5) / 1.5;
        0.3 * ((2.0 + e).powi(2) + 0.1) / (e * e + 1.0)
    });
    let out = dir.path().join("fit.json");
    let o = fano(&["fit", input.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    let p = &v["params"];
    for (k, want) in [("C", 0.3), ("D", 0.1), ("q_eff", 2.0), ("gamma_eff", 1.5), ("omega_eff", 0.5)] {
        assert!((p[k].as_f64().unwrap() - want).abs() < 1e-6, "{k}: {}", p[k]);
    }
    assert!(v["covariance_diag"].as_array().unwrap().len() == 5);
}

#[test]
fn malformed_samples_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("s.csv");
    std::fs::write(&input, "omega_L,value\n0,1\n1,2\n2,x\n").unwrap();
    let o = fano(&["fit", input.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 4"), "{}", String::from_utf8_lossy(&o.stderr));

    std::fs::write(&input, "x,y\n0,1\n").unwrap();
    let o = fano(&["fit", input.to_str().unwrap()]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));
}

#[test]
fn validate_subset_reports_json() {
    let o = fano(&["validate", "--only", "8,9"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["all_passed"], true);
    assert_eq!(v["criteria"].as_array().unwrap().len(), 2);
    let min_eig = v["criteria"][1]["checks"].as_array().unwrap().iter().find(|c| c["name"] == "min_eigenvalue").unwrap();
    assert!(min_eig["value"].as_f64().unwrap() >= -1e-12);
}
