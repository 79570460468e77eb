use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_casimir-lab"))
        .args(args)
        .output()
        .expect("run casimir-lab")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&["kappas", "--no-such-flag"]).status.code(), Some(2));
    assert_eq!(run(&["kappas", "--n-max", "1"]).status.code(), Some(2));
    assert_eq!(run(&["continuum", "--ymin-grid", "2,1"]).status.code(), Some(2));
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn kappas_json_has_expected_shape() {
    let v = json(&["kappas", "--n-max", "60"]);
    assert_eq!(v["config_echo"]["command"]["name"], "kappas");
    assert_eq!(v["config_echo"]["command"]["n_max"], 60);
    assert!(v["timing"].is_null());
    for key in [
        "kappa1_discrete",
        "kappa2_discrete",
        "kappa1_continuum",
        "kappa2_continuum",
        "totals",
        "adopted",
    ] {
        assert!(v["results"].get(key).is_some(), "missing {key}");
    }
    assert!(v["results"]["kappa1_discrete"].get("partial_sums").is_none());
    assert!(!v["provenance"].as_array().unwrap().is_empty());

    let traced = json(&["kappas", "--n-max", "60", "--trace"]);
    assert_eq!(
        traced["results"]["kappa1_discrete"]["partial_sums"]
            .as_array()
            .unwrap()
            .len(),
        59
    );
}

#[test]
fn csv_rows_parse_as_numbers() {
    let out = run(&["kappas", "--n-max", "50", "--format", "csv"]);
    assert!(out.status.success());
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    assert_eq!(
        reader.headers().unwrap(),
        vec!["quantity", "value", "error", "provenance"]
    );
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert!(rows.len() >= 4);
    for r in &rows {
        r[1].parse::<f64>().unwrap();
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = ["polarizability", "--n-max", "120"];
    let a = run(&args).stdout;
    let b = run(&args).stdout;
    let single = Command::new(env!("CARGO_BIN_EXE_casimir-lab"))
        .args(args)
        .env("RAYON_NUM_THREADS", "1")
        .output()
        .unwrap()
        .stdout;
    assert_eq!(a, b);
    assert_eq!(a, single);
}

#[test]
fn config_dump_and_load_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let dumped = run(&["bethe", "--n-max", "80", "--log-value", "-8.0", "--config-dump"]);
    assert!(dumped.status.success());
    std::fs::write(&cfg, &dumped.stdout).unwrap();

    let direct = run(&["bethe", "--n-max", "80", "--log-value", "-8.0"]).stdout;
    let loaded = run(&["--config-load", cfg.to_str().unwrap()]).stdout;
    assert_eq!(direct, loaded);
    assert_eq!(
        run(&["--config-load", cfg.to_str().unwrap(), "verify"]).status.code(),
        Some(2)
    );
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rho.json");
    let out = run(&["rho-c", "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let ratio = v["results"]["ratio_to_reference"].as_f64().unwrap();
    assert!((0.1..=10.0).contains(&ratio.abs()));
}

#[test]
fn budget_without_pseudo_momentum() {
    let v = json(&["budget", "--E0", "1e5,0,0", "--B0", "0,1,0"]);
    let b = &v["results"]["budget"];
    let pa = b["abraham"].as_array().unwrap();
    assert_eq!(pa[0].as_f64().unwrap(), 0.0);
    assert!((pa[2].as_f64().unwrap() / -7.419497734621287e-36 - 1.0).abs() < 1e-12);
    for x in b["kinetic_mass_correction"].as_array().unwrap() {
        assert_eq!(x.as_f64().unwrap(), 0.0);
    }
    let shift = b["casimir_relative_shift"].as_f64().unwrap();
    assert!((shift.abs() - 6.518e-6).abs() < 1e-9);
}

#[test]
fn timing_is_opt_in() {
    let v = json(&["continuum", "--kappa", "kappa2", "--timing"]);
    assert!(v["timing"].as_f64().unwrap() >= 0.0);
    assert_eq!(v["results"]["kappa2"].as_array().unwrap().len(), 4);
}

#[test]
fn text_format_and_renorm() {
    let out = run(&["renorm", "--format", "text"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("casimir-lab "));
    assert!(text.contains("doubling_limit"));
}
