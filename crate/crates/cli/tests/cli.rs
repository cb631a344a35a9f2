use std::fs;
use std::process::{Command, Output};

fn pite(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pite"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn maxcut_multistep_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("trace.csv");
    let o = pite(&[
        "maxcut",
        "--mode",
        "multistep",
        "--steps",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&fs::read_to_string(&out).unwrap());
    assert_eq!(rows[0].join(","), "step,tau,p_k,P_k,fidelity,energy,cnot,depth");
    assert_eq!(rows.len(), 4);
    for r in &rows[2..] {
        let p: f64 = r[2].parse().unwrap();
        assert!((p - 1.0).abs() < 1e-6);
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("trace.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["mode"], "multistep");
    assert_eq!(manifest["calibrations"].as_array().unwrap().len(), 2);
    assert!(manifest["benchmark_pite"]["justification"].as_str().unwrap().len() > 10);
}

#[test]
fn graph_file_and_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("tri.txt");
    fs::write(&g, "# triangle\n0 1 1\n1 2 1\n0 2 1.0\n").unwrap();
    let o = pite(&[
        "maxcut",
        "--graph",
        g.to_str().unwrap(),
        "--mode",
        "pite",
        "--gamma",
        "0.6",
        "--steps",
        "3",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&String::from_utf8(o.stdout).unwrap());
    assert_eq!(rows.len(), 5);
    let energy: f64 = rows[4][5].parse().unwrap();
    assert!(energy < -1.0);
}

#[test]
fn config_file_with_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "kind = \"harmonic\"\nmode = \"pite\"\nqubits = 4\nsteps = 5\n").unwrap();
    let o = pite(&["harmonic", "--config", cfg.to_str().unwrap(), "--steps", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 4);

    let o = pite(&["maxcut", "--config", cfg.to_str().unwrap()]);
    assert!(!o.status.success());
}

#[test]
fn conflicting_flags_are_rejected() {
    let o = pite(&["maxcut", "--gamma", "0.5", "--auto-gamma"]);
    assert!(!o.status.success());
    let o = pite(&["maxcut", "--mode", "pite", "--m-schedule", "1,2"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("m schedule"));
    let o = pite(&["maxcut", "--steps", "0"]);
    assert!(!o.status.success());
}

#[test]
fn cost_sweep_csv() {
    let o = pite(&["cost", "--n-min", "3", "--n-max", "5"]);
    assert!(o.status.success());
    let rows = csv_rows(&String::from_utf8(o.stdout).unwrap());
    assert_eq!(rows[0][..3].join(","), "n,cnot_Q,cnot_Qtilde");
    assert_eq!(rows.len(), 4);
    for r in &rows[1..] {
        let v: Vec<i64> = r.iter().map(|x| x.parse().unwrap()).collect();
        assert_eq!(v[1] - v[2], v[4], "Q - Q̃ = c_PITE at n={}", v[0]);
    }
}

#[test]
fn calibrate_prints_converged_json() {
    let o = pite(&["calibrate", "--dtau", "0.63"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["converged"], true);
    assert_eq!(v["m_star"], 1);
    let g = v["params"]["gamma"].as_f64().unwrap();
    assert!(g > 0.0 && g < 1.0);
}
