use std::process::{Command, Output};

fn klucas(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_klucas")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn seq_prints_terms() {
    let o = klucas(&["seq", "--k", "3", "--n", "-1", "--n-max", "6"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "0\n2\n1\n3\n6\n10\n19\n35\n");
}

#[test]
fn seq_json() {
    let o = klucas(&["seq", "--k", "4", "--n", "10", "--json"]);
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["k"], 4);
    assert_eq!(v["n"], 10);
    // 2, 1, 3, 6, 12, 22, 43, 83, 160, 308, 594
    assert_eq!(v["value"], "594");
}

#[test]
fn alpha_encloses_tribonacci_constant() {
    let o = klucas(&["alpha", "--k", "3", "--digits", "15", "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let lo: f64 = v["alpha"]["lo"].as_str().unwrap().parse().unwrap();
    let hi: f64 = v["alpha"]["hi"].as_str().unwrap().parse().unwrap();
    assert!(lo <= 1.839286755214161 && 1.839286755214161 <= hi + 1e-15);
    assert_eq!(v["alpha"]["lo"].as_str().unwrap().len(), 17);
}

#[test]
fn pal_check() {
    assert_eq!(stdout(&klucas(&["pal", "--check", "7757577"])), "none\n");
    assert_eq!(stdout(&klucas(&["pal", "--check", "7755577"])), "d1=7 d2=5 ell=2 m=3\n");
}

#[test]
fn pal_power_case_report() {
    let o = klucas(&["pal", "--power-case"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["searched"], 2916);
    assert_eq!(v["hits"].as_array().unwrap().len(), 0);
}

#[test]
fn matveev_json_fields() {
    let o = klucas(&["matveev", "--kind", "G1", "--k", "7", "--n", "50", "--d1", "4", "--json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["A"].as_array().unwrap().len(), 3);
    assert_eq!(v["B"], 50.0);
    assert!(v["log_lower_bound"].as_f64().unwrap() < 0.0);
}

#[test]
fn reduce_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = klucas(&[
        "reduce", "--form", "G1", "--k-range", "3:4", "--c", "2.1e178", "--n-bound", "8.8e58", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["form"], "G1");
    let cells = v["cells"].as_array().unwrap();
    assert_eq!(cells.len(), 18);
    for key in ["k", "d1", "d2", "ell", "C_used", "delta", "S", "T", "H"] {
        assert!(cells[0].get(key).is_some(), "missing {key}");
    }
    assert!(v["max_H"].as_f64().unwrap() < 130.0);
    assert_eq!(v["unresolved"].as_array().unwrap().len(), 0);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(klucas(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(klucas(&["pal"]).status.code(), Some(1));
    assert_eq!(klucas(&["seq", "--k", "3"]).status.code(), Some(1));
    assert_eq!(klucas(&["verify-all", "--preset", "huge"]).status.code(), Some(1));
    assert_eq!(klucas(&["reduce", "--form", "G1", "--k-range", "9:3", "--c", "1e10", "--n-bound", "10"]).status.code(), Some(1));
}

#[test]
fn config_with_small_k_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.toml");
    std::fs::write(&cfg, "k_min = 2\nk_max = 10\n").unwrap();
    let o = klucas(&["verify-all", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("k_min"));
}

#[test]
fn help_exits_zero() {
    assert_eq!(klucas(&["--help"]).status.code(), Some(0));
}

#[test]
fn verify_all_with_config_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.toml");
    let out = dir.path().join("report.json");
    std::fs::write(
        &cfg,
        "k_min = 3\nk_max = 6\nn_cap = 50\ngamma1_ks = [3]\ngamma2_ks = [3]\ngamma2_ell_step = 100\ngamma4_ell_step = 400\n",
    )
    .unwrap();
    let o = klucas(&["verify-all", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o), "no solutions (desk scale)\n");
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["config"]["k_max"], 6);
    assert_eq!(v["case1"]["search"]["hits"].as_array().unwrap().len(), 0);
}
