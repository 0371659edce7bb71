use std::process::{Command, Output};

use serde_json::Value;

fn bls(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bls")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn bernoulli_dimension_table_contains_a_fifth_at_pi() {
    let out = bls(&["dim", "--beta-min", "0", "--beta-max", "6.283185307179586", "--steps", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], "bls/1");
    let row = &v["result"]["rows"][1];
    assert!((row["beta"].as_f64().unwrap() - std::f64::consts::PI).abs() < 1e-15);
    assert!((row["delta"].as_f64().unwrap() - 0.2).abs() < 1e-15);
    assert!((row["delta_w"].as_f64().unwrap() - 0.125).abs() < 1e-12);
}

#[test]
fn empty_sweep_is_a_usage_error() {
    assert_eq!(bls(&["dim", "--steps", "0"]).status.code(), Some(2));
    assert_eq!(bls(&["dim", "--dist", "nonsense"]).status.code(), Some(2));
    assert_eq!(bls(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn gaussian_dimension_is_monotone_in_beta() {
    let out = bls(&["--dist", "gaussian:2", "--format", "csv", "dim", "--beta-max", "4", "--steps", "41"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# schema: bls/1 dim"));
    assert_eq!(lines.next(), Some("beta,delta,delta_w"));
    let deltas: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(deltas.len(), 41);
    assert!(deltas.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn identities_pass_and_fail_under_injected_fault() {
    let ok = bls(&["identities", "--configs", "20"]);
    assert_eq!(ok.status.code(), Some(0));
    let v = json(&ok);
    assert_eq!(v["result"]["all_passed"], true);
    let crossing = &v["result"]["checks"][0];
    assert!(crossing["name"].as_str().unwrap().starts_with("crossing"));
    assert!(crossing["max_deviation"].as_f64().unwrap() < 1e-10);

    let bad = bls(&["identities", "--configs", "20", "--inject-fault"]);
    assert_eq!(bad.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("crossing"));
    assert_eq!(json(&bad)["result"]["checks"][0]["passed"], false);
}

#[test]
fn mc_output_is_determined_by_the_seed() {
    let args = ["--seed", "17", "mc", "--soups", "300", "--segments", "256"];
    let (a, b) = (bls(&args), bls(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["result"]["target"].as_f64().unwrap(), 0.2);
    assert_eq!(v["config"]["mc"]["n_soups"], 300);
    let other = bls(&["--seed", "18", "mc", "--soups", "300", "--segments", "256"]);
    assert_ne!(other.stdout, a.stdout);
}

#[test]
fn winding_target_and_partials() {
    let dir = tempfile::tempdir().unwrap();
    let partials = dir.path().join("partials.csv");
    let out = bls(&[
        "mc",
        "--estimator",
        "winding",
        "--k",
        "-1",
        "--soups",
        "300",
        "--segments",
        "256",
        "--batch",
        "100",
        "--partials",
        partials.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let target = json(&out)["result"]["target"].as_f64().unwrap();
    assert!((target - 1.0 / (2.0 * std::f64::consts::PI.powi(2))).abs() < 1e-15);
    let text = std::fs::read_to_string(&partials).unwrap();
    assert_eq!(text.lines().nth(1), Some("batch,n,mean,m2"));
    assert_eq!(text.lines().count(), 2 + 3);
}

#[test]
fn indeterminate_enclosures_exit_with_mc_code() {
    let out = bls(&["mc", "--soups", "1000", "--segments", "256", "--grid-factor", "0.5", "--seed", "111"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--grid-factor"));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    std::fs::write(
        &path,
        r#"{"lambda": 2.0, "distribution": {"kind": "gaussian", "sigma": 1.0},
            "points": [{"re": 0, "im": 0, "beta": 1}, {"re": 2, "im": 0, "beta": -1}]}"#,
    )
    .unwrap();
    let cfg = path.to_str().unwrap();
    let from_file = json(&bls(&["--config", cfg, "corr"]));
    assert_eq!(from_file["config"]["lambda"], 2.0);
    let overridden = json(&bls(&["--config", cfg, "--lambda", "3", "corr"]));
    assert_eq!(overridden["config"]["lambda"], 3.0);
    // ⟨O O⟩ = |z12|^{−4Δ} with Δ = (λ/10)(1 − e^{−1/2})
    let delta = 0.3 * (1.0 - (-0.5f64).exp());
    let expected = 2f64.powf(-4.0 * delta);
    assert!((overridden["result"]["value"].as_f64().unwrap() / expected - 1.0).abs() < 1e-12);
    // the echoed config reproduces the run
    let echo = dir.path().join("echo.json");
    std::fs::write(&echo, overridden["config"].to_string()).unwrap();
    let again = json(&bls(&["--config", echo.to_str().unwrap(), "corr"]));
    assert_eq!(again["result"], overridden["result"]);
}

#[test]
fn blocks_csv_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("c.csv");
    let out = bls(&[
        "--format",
        "csv",
        "--out",
        out_path.to_str().unwrap(),
        "blocks",
        "--point",
        "0,0,0.9",
        "--point",
        "1,0,-0.4",
        "--point",
        "3,1,0.7",
        "--point",
        "-1,2,-1.2",
        "--pmax",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&out_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# schema: bls/1 blocks"));
    assert_eq!(lines.next(), Some("p,p_bar,delta,delta_bar,coeff,residual"));
    assert_eq!(lines.count(), 9);
}

#[test]
fn halfplane_and_vanishing_correlators() {
    let out = bls(&["halfplane", "--point", "0,1,3.141592653589793", "--point", "1,1,3.141592653589793"]);
    let v = json(&out)["result"]["value"].as_f64().unwrap();
    // mpmath reference
    assert!((v - 0.635_800_751_905_882_113_84).abs() < 1e-10);
    let zero = json(&bls(&["--dist", "gaussian:1", "corr", "--point", "0,0,1", "--point", "1,0,0.5"]));
    assert_eq!(zero["result"]["value"], 0.0);
    assert_eq!(zero["result"]["flags"][0], "vanishes_by_charge_conservation");
}
