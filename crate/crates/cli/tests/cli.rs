// Copyright 2026 The emech Authors
// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use std::time::Instant;

use emech::hilbert::{fock_state, ModeLayout};
use serde_json::Value;

fn emech(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_emech"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Rows of a CSV file as numbers, header dropped.
fn csv_rows(path: &Path) -> Vec<Vec<f64>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| {
            l.split(',')
                .map(|c| match c {
                    "true" => 1.0,
                    "false" => 0.0,
                    _ => c.parse().unwrap(),
                })
                .collect()
        })
        .collect()
}

fn csv_header(path: &Path) -> String {
    fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn params_reproduce_table_rows() {
    let t = Instant::now();
    let o = emech(&["params", "--preset", "set1", "--json"]);
    assert!(t.elapsed().as_secs_f64() < 1.0);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let g_t = v["derived"]["g_t"].as_f64().unwrap() / (2.0 * PI);
    assert!((g_t / 315e3 - 1.0).abs() < 0.01, "{g_t}");
    assert!((v["derived"]["chi"].as_f64().unwrap() / 3.14e7 - 1.0).abs() < 0.01);

    let o = emech(&["params", "--preset", "set2"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let line = stdout(&o).lines().find(|l| l.contains("g_t/2π")).unwrap().to_string();
    let g_t: f64 = line.split_whitespace().last().unwrap().parse().unwrap();
    assert!((g_t / 350e3 - 1.0).abs() < 0.01, "{line}");
}

#[test]
fn params_missing_field_names_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(
        &cfg,
        r#"{"zeta": 150, "E_C_hz": 0.5e9, "g0_hz": 18.2e3, "Omega_m_hz": 10e6,
            "omega_c_hz": 16.8e9, "kappa_c_hz": 10e3, "gamma_t_hz": 3e3,
            "gamma_phi_hz": 6e3, "Q_m": 1e6, "T_K": 0.01}"#,
    )
    .unwrap();
    let o = emech(&["params", "--config", p(&cfg)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("n_ac"), "{}", stderr(&o));
    assert_eq!(code(&emech(&["params"])), 2);
    assert_eq!(code(&emech(&["params", "--config", "/nonexistent.json"])), 2);
}

#[test]
fn params_with_overridden_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, r#"{"preset": "set1", "kappa_c_hz": 30e3}"#).unwrap();
    let out = dir.path().join("o");
    let o = emech(&["params", "--config", p(&cfg), "--out", p(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(&out.join("params.json"));
    assert!((v["params"]["kappa_c"].as_f64().unwrap() / (2.0 * PI * 30e3) - 1.0).abs() < 1e-12);
    let m = json(&out.join("params.manifest.json"));
    assert_eq!(m["outputs"][0]["path"], "params.json");
}

#[test]
fn cool_zero_drive_is_flat_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let args = [
        "cool", "--preset", "set1", "--e-l-rad", "0", "--n-bar", "1", "--dims", "2,2,10",
        "--sweep", "-2:0:5", "--out", p(&out),
    ];
    let o = emech(&args);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = out.join("cooling.csv");
    assert_eq!(csv_header(&csv), "delta_rad_s,delta_over_omega_m,n_final,converged");
    let x: f64 = 0.5;
    let oracle = (0..10).map(|k| k as f64 * x.powi(k)).sum::<f64>() / (0..10).map(|k| x.powi(k)).sum::<f64>();
    let rows = csv_rows(&csv);
    assert_eq!(rows.len(), 5);
    for r in &rows {
        assert!((r[2] - oracle).abs() < 1e-8, "{} vs {oracle}", r[2]);
        assert_eq!(r[3], 1.0);
    }
    assert!((rows[0][1] + 2.0).abs() < 1e-12);

    let first = fs::read(&csv).unwrap();
    let meta = json(&out.join("cooling.meta.json"));
    assert_eq!(meta["config"]["e_l_rad_s"], 0.0);
    assert!(meta["convergence_rule"].as_str().unwrap().contains("direct"));

    // The manifest lists every output with its checksum.
    let m = json(&out.join("cool.manifest.json"));
    for entry in m["outputs"].as_array().unwrap() {
        let bytes = fs::read(out.join(entry["path"].as_str().unwrap())).unwrap();
        if let Some(digest) = emech_sha(&bytes) {
            assert_eq!(entry["sha256"].as_str().unwrap(), digest);
        }
    }
    assert_eq!(m["dims"], serde_json::json!([2, 2, 10]));

    let mut verify = args.to_vec();
    verify.push("--verify");
    let o = emech(&verify);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("verified"));
    assert_eq!(fs::read(&csv).unwrap(), first);

    // A tampered checksum is caught.
    let mpath = out.join("cool.manifest.json");
    let text = fs::read_to_string(&mpath).unwrap();
    let digest = m["outputs"][0]["sha256"].as_str().unwrap();
    fs::write(&mpath, text.replace(digest, &"0".repeat(64))).unwrap();
    assert_eq!(code(&emech(&verify)), 4);
}

/// Checksum from the system `sha256sum`, when it exists.
fn emech_sha(bytes: &[u8]) -> Option<String> {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("b");
    fs::write(&f, bytes).unwrap();
    match Command::new("sha256sum").arg(&f).output() {
        Ok(o) if o.status.success() => String::from_utf8_lossy(&o.stdout)
            .split_whitespace()
            .next()
            .map(str::to_string),
        _ => None,
    }
}

#[test]
fn cool_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    assert_eq!(code(&emech(&["cool", "--preset", "set1", "--sweep", "-2:0", "--out", p(&out)])), 2);
    assert_eq!(code(&emech(&["cool", "--preset", "set1", "--sweep", "a:b:c", "--out", p(&out)])), 2);
    assert_eq!(code(&emech(&["cool", "--preset", "set1", "--dims", "2,2", "--out", p(&out)])), 2);
    // Outside ±2 Ω_m of the red sideband.
    assert_eq!(code(&emech(&["cool", "--preset", "set1", "--sweep", "0:2:3", "--dims", "2,2,3", "--out", p(&out)])), 2);
    assert_eq!(code(&emech(&["cool", "--preset", "set9", "--out", p(&out)])), 2);
    // --verify without an earlier run.
    assert_eq!(code(&emech(&["cool", "--preset", "set1", "--dims", "2,2,3", "--sweep", "-1:-1:1", "--verify", "--out", p(&out)])), 2);
}

#[test]
fn fock_then_wigner() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let state = dir.path().join("one.json");
    let o = emech(&[
        "fock", "--preset", "set1", "--lossless", "--n", "1", "--start", "ideal", "--out", p(&out),
        "--save-state", p(&state),
    ]);
    // Set1 never reaches the exact resonance, which is reported as a warning.
    assert!([0, 3].contains(&code(&o)), "{}", stderr(&o));
    let csv = out.join("fock.csv");
    assert_eq!(csv_header(&csv), "stage,time_s,fidelity,n_mech");
    let rows = csv_rows(&csv);
    assert_eq!(rows.len(), 2);
    assert!(rows[1][2] >= 0.99, "{}", rows[1][2]);

    let o = emech(&["wigner", "--load-state", p(&state), "--out", p(&out)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("--mode"));
    let o = emech(&["wigner", "--load-state", p(&state), "--mode", "mech", "--grid", "-1:1:3", "--out", p(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let w = csv_rows(&out.join("wigner.csv"));
    assert_eq!(w.len(), 9);
    let origin = w.iter().find(|r| r[0] == 0.0 && r[1] == 0.0).unwrap();
    assert!(origin[2] < 0.0);
    assert!((origin[2] + rows[1][2] / PI).abs() < 0.01);
}

#[test]
fn fock_trajectory_export() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let o = emech(&[
        "fock", "--preset", "set1", "--lossless", "--n", "1", "--record-every-s", "1e-7", "--out", p(&out),
    ]);
    assert!([0, 3].contains(&code(&o)), "{}", stderr(&o));
    let path = out.join("fock_trajectory.csv");
    assert!(csv_header(&path).starts_with("t_s,n_mech,p_transmon_1,n_cavity,trace,purity"));
    let rows = csv_rows(&path);
    assert!(rows.len() > 10);
    let last = rows.last().unwrap();
    assert!((last[1] - 1.0).abs() < 0.01, "{last:?}");
    assert!(rows.iter().all(|r| (r[4] - 1.0).abs() < 1e-6));
}

#[test]
fn fock_and_ghz_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    assert_eq!(code(&emech(&["fock", "--preset", "set1", "--n", "0", "--out", p(&out)])), 2);
    let o = emech(&["ghz", "--preset", "set2", "--pulses", "2", "--out", p(&out)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("even"));
    assert_eq!(code(&emech(&["ghz", "--preset", "set2", "--pulses", "1,3", "--save-state", "x.json", "--out", p(&out)])), 2);
}

#[test]
fn ghz_lossless_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let o = emech(&["ghz", "--preset", "set2", "--lossless", "--pulses", "1,3", "--out", p(&out)]);
    assert!([0, 3].contains(&code(&o)), "{}", stderr(&o));
    let csv = out.join("ghz.csv");
    assert_eq!(csv_header(&csv), "N_p,beta,P1_sim,P1_theory,fid_cat_odd,fid_ghz");
    let rows = csv_rows(&csv);
    assert_eq!(rows.len(), 2);
    for r in &rows {
        assert!((r[3] - 0.5 * (1.0 - (-2.0 * r[1] * r[1]).exp())).abs() < 1e-12);
        assert!((r[2] - r[3]).abs() <= 0.05);
    }
    assert_eq!(rows[1][0], 3.0);
}

#[test]
fn wigner_of_vacuum_and_single_point_grid() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("vac.json");
    let layout = ModeLayout::single(6, "mech").unwrap();
    fock_state(&layout, &[0]).unwrap().save(&path).unwrap();
    let out = dir.path().join("o");
    let o = emech(&["wigner", "--load-state", p(&path), "--grid", "0:0:1", "--out", p(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = csv_rows(&out.join("wigner.csv"));
    assert_eq!(rows.len(), 1);
    assert!((rows[0][2] - 1.0 / PI).abs() < 1e-6);
    let meta = json(&out.join("wigner.meta.json"));
    assert!(meta["convention"].as_str().unwrap().contains("unit integral"));
    assert_eq!(meta["x"]["n"], 1);

    let o = emech(&["wigner", "--load-state", p(&path), "--grid", "-6:6:121", "--out", p(&out)]);
    assert_eq!(code(&o), 0);
    let meta = json(&out.join("wigner.meta.json"));
    assert!((meta["integral"].as_f64().unwrap() - 1.0).abs() < 1e-3);
    assert_eq!(code(&emech(&["wigner", "--load-state", "/missing.json", "--out", p(&out)])), 2);
}

#[test]
fn jobs_flag_and_environment() {
    assert_eq!(code(&emech(&["--jobs", "0", "params", "--preset", "set1"])), 2);
    let o = Command::new(env!("CARGO_BIN_EXE_emech"))
        .args(["params", "--preset", "set1"])
        .env("EMECH_JOBS", "1")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
}
