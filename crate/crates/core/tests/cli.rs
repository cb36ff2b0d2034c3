use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_twomm"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("twomm-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write_config(name: &str, body: &str) -> String {
    let p = scratch(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

const GAUSSIAN: &str = r#"{"measure": {"kind": "gaussian_coupled", "c": 0.5}, "N": 1}"#;

#[test]
fn zn_gaussian() {
    let cfg = write_config("g.json", GAUSSIAN);
    let o = run(&["zn", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert!((v["value"][0].as_f64().unwrap() - 7.255197456936871).abs() < 1e-12);
    let o = run(&["zn", "--config", &cfg, "--N", "0", "--engine", "direct"]);
    assert_eq!(json(&o)["value"][0].as_f64(), Some(1.0));
}

#[test]
fn zn_rational_mode() {
    let cfg = write_config("gr.json", GAUSSIAN);
    let o = run(&["zn", "--config", &cfg, "--N", "2", "--mode", "rational"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["exact"]["rational"], "4/3");
    assert_eq!(v["exact"]["power"], 2);
}

#[test]
fn config_errors() {
    let cfg = write_config(
        "bad.json",
        r#"{"measure": {"kind": "gaussian_coupled", "c": 0.5}, "deform": {"tbar1": [0.1]}}"#,
    );
    let o = run(&["zn", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json(&o)["error"], "NegativeIndexUnsupported");
    let cfg = write_config(
        "unknown.json",
        r#"{"measure": {"kind": "gaussian_coupled", "c": 0.5}, "colour": 1}"#,
    );
    let o = run(&["zn", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json(&o)["error"], "Config");
    let o = run(&[
        "zn",
        "--config",
        &write_config("g3.json", GAUSSIAN),
        "--engine",
        "direct",
        "--N",
        "3",
    ]);
    assert_eq!(json(&o)["error"], "NUnsupported");
    let o = run(&["zn"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn truncation_failure_exits_three() {
    let cfg = write_config(
        "circle.json",
        r#"{"measure": {"kind": "circle_product", "coupling": {"kind": "exponential", "scale": 1.0}},
            "deform": {"t1": [0.3], "t2": [0.2]}, "engine": "double_series++", "N": 2, "d": 2}"#,
    );
    let o = run(&["zn", "--config", &cfg, "--tol", "1e-12"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(json(&o)["error"], "TruncationNotConverged");
    let o = run(&["zn", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn bimoments_reload_into_zn() {
    let cfg = write_config("gb.json", GAUSSIAN);
    let win = scratch("window.json");
    let o = run(&[
        "bimoments",
        "--config",
        &cfg,
        "--rect",
        "0,2,0,2",
        "--out",
        win.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let w: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&win).unwrap()).unwrap();
    let values = w["values"].as_array().unwrap();
    assert_eq!(values.iter().map(|r| r.as_array().unwrap().len()).sum::<usize>(), 9);
    // odd total degree vanishes
    assert_eq!(w["values"][0][1], serde_json::json!([0.0, 0.0]));
    let direct = json(&run(&["zn", "--config", &cfg, "--N", "2"]));
    let with_window = write_config(
        "gw.json",
        &format!(
            r#"{{"measure": {{"kind": "gaussian_coupled", "c": 0.5}}, "N": 2, "window": {:?}}}"#,
            win.to_str().unwrap()
        ),
    );
    let reloaded = json(&run(&["zn", "--config", &with_window]));
    assert_eq!(direct["value"], reloaded["value"]);
    let o = run(&["bimoments", "--config", &cfg, "--rect", "-1,1,0,1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn output_is_deterministic_across_threads() {
    let cfg = write_config(
        "det.json",
        r#"{"measure": {"kind": "circle_product", "coupling": {"kind": "exponential", "scale": 0.8}},
            "deform": {"t1": [0.1, 0.02], "tbar2": [0.05]}, "engine": "double_series+-", "N": 2, "d": 5}"#,
    );
    let outputs: Vec<Vec<u8>> = ["1", "3"]
        .iter()
        .map(|t| {
            bin()
                .args(["series", "--config", &cfg, "--format", "csv"])
                .env("RAYON_NUM_THREADS", t)
                .output()
                .unwrap()
                .stdout
        })
        .collect();
    assert!(!outputs[0].is_empty());
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn fermion_vev_and_verify() {
    let o = run(&[
        "fermion-vev",
        "--identity",
        "--",
        "--N",
        "2",
        "--lambda",
        "2+1",
        "--mu",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["holds"], true);
    let o = run(&["verify", "schur", "--trunc", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["failed"], 0);
}
