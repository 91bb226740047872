use std::process::{Command, Output};

use serde_json::Value;
use young_core::format::{to_csv, to_json};
use young_core::{random_density, sample_gaussian, GaussianFn, Grid};

fn young(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_young"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json_lines(out: &Output) -> Vec<Value> {
    stdout(out).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn num(v: &Value, key: &str) -> f64 {
    v[key].as_f64().unwrap_or_else(|| panic!("{key} missing in {v}"))
}

#[test]
fn constants_symmetric_classical() {
    let out = young(&["constants", "--p", "1.3333333333", "--q", "1.3333333333"]);
    assert_eq!(out.status.code(), Some(0));
    let v = &json_lines(&out)[0];
    assert!((num(v, "r") - 2.0).abs() < 1e-8);
    assert!((num(v, "c") - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-6);
    assert!((num(v, "s") - num(v, "c")).abs() < 1e-15);
    assert_eq!(v["regime"], "Classical");
}

#[test]
fn constants_fraction_input_is_exact() {
    let v = &json_lines(&young(&["constants", "--p", "4/3", "--q", "4/3"]))[0];
    assert_eq!(num(v, "r"), 2.0);
    assert!((num(v, "k") - 1.0433897200488582).abs() < 1e-14);
    assert!((num(v, "young_constant") - 0.8773826753016616).abs() < 1e-14);
}

#[test]
fn constants_reverse() {
    let v = &json_lines(&young(&["constants", "--p", "0.5", "--q", "0.5"]))[0];
    assert!((num(v, "r") - 1.0 / 3.0).abs() < 1e-15);
    assert_eq!(v["regime"], "Reverse");
}

#[test]
fn forbidden_triple_exits_two() {
    let out = young(&["constants", "--p", "2", "--q", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("r not positive finite"));
    assert!(out.stdout.is_empty());
}

#[test]
fn inconsistent_r_is_rejected_at_parse() {
    let out = young(&["verify", "--p", "3/2", "--q", "3/2", "--r", "2.9", "--gaussian"]);
    assert_eq!(out.status.code(), Some(2));
    let out = young(&["constants", "--p", "3/2", "--q", "3/2", "--r", "3"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn malformed_flags_exit_two() {
    assert_eq!(young(&["constants", "--p", "4/0", "--q", "2"]).status.code(), Some(2));
    assert_eq!(young(&["constants", "--p", "abc", "--q", "2"]).status.code(), Some(2));
    assert_eq!(young(&["verify", "--p", "4/3", "--q", "4/3"]).status.code(), Some(2));
    assert_eq!(young(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn verify_gaussian_pair_is_an_equality() {
    for (p, q) in [("4/3", "4/3"), ("1/2", "1/2")] {
        let out = young(&["verify", "--p", p, "--q", q, "--gaussian"]);
        assert_eq!(out.status.code(), Some(0));
        let v = &json_lines(&out)[0];
        assert_eq!(v["status"], "Pass");
        assert!((num(v, "ratio") - 1.0).abs() < 5e-3);
    }
}

#[test]
fn verify_twenty_random_classical_pairs() {
    let args = [
        "verify", "--p", "5/4", "--q", "3/2", "--random", "--count", "20", "--seed", "11", "--n", "512",
    ];
    let out = young(&args);
    assert_eq!(out.status.code(), Some(0));
    let lines = json_lines(&out);
    assert_eq!(lines.len(), 20);
    for (i, v) in lines.iter().enumerate() {
        assert_eq!(v["check"], i);
        assert_eq!(v["status"], "Pass");
        assert_eq!(v["seed_f"], 11 + 2 * i as u64);
    }
}

#[test]
fn output_is_reproducible() {
    let args = [
        "verify", "--p", "0.8", "--q", "0.8", "--random", "--count", "3", "--seed", "5", "--n", "256",
    ];
    assert_eq!(young(&args).stdout, young(&args).stdout);
    let sweep = ["sweep", "--p", "1.1:2:4", "--q", "1.1:2:4"];
    assert_eq!(young(&sweep).stdout, young(&sweep).stdout);
}

#[test]
fn verify_file_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let grid = Grid::standard();
    let f = dir.path().join("f.csv");
    let g = dir.path().join("g.json");
    std::fs::write(&f, to_csv(&random_density(1, &grid, 0.4).unwrap())).unwrap();
    let gauss = sample_gaussian(&GaussianFn::unit_mass(1.0).unwrap(), &grid);
    std::fs::write(&g, to_json(&gauss)).unwrap();
    let (fs, gs) = (f.to_str().unwrap(), g.to_str().unwrap());

    let out = young(&["verify", "--p", "4/3", "--q", "4/3", "--f", fs, "--g", gs, "--n", "512"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_lines(&out)[0]["status"], "Pass");

    let out = young(&[
        "verify",
        "--p",
        "4/3",
        "--q",
        "4/3",
        "--f",
        fs,
        "--g",
        gs,
        "--transport-bound",
        "--n",
        "512",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_lines(&out)[0]["kind"], "transport_bound");

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "x,value\n0,1\n1,oops\n").unwrap();
    let out = young(&[
        "verify",
        "--p",
        "4/3",
        "--q",
        "4/3",
        "--f",
        bad.to_str().unwrap(),
        "--g",
        gs,
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v = &json_lines(&out)[0];
    assert_eq!(v["status"], "Degenerate");
    assert!(v["error"].as_str().unwrap().contains("parse"));
}

#[test]
fn transport_bound_in_reverse_regime_is_degenerate() {
    let out = young(&[
        "verify",
        "--p",
        "1/2",
        "--q",
        "1/2",
        "--random",
        "--transport-bound",
        "--n",
        "128",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json_lines(&out)[0]["status"], "Degenerate");
}

#[test]
fn verify_csv_format() {
    let out = young(&[
        "verify",
        "--p",
        "4/3",
        "--q",
        "4/3",
        "--gaussian",
        "--format",
        "csv",
        "--n",
        "256",
    ]);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("check,kind,lhs,rhs,ratio,regime,tolerance,status,n"));
    assert!(lines.next().unwrap().ends_with(",Pass,256"));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    let out = young(&["constants", "--p", "4/3", "--q", "4/3", "--out", path.to_str().unwrap()]);
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(num(&v, "r"), 2.0);
}

fn sweep_rows(args: &[&str]) -> Vec<Vec<String>> {
    let out = young(args);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("p,q,r,K,young_constant"));
    lines.map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn single_point_sweep_matches_constants() {
    let rows = sweep_rows(&["sweep", "--p", "5/4", "--q", "3/2"]);
    assert_eq!(rows.len(), 1);
    let v = &json_lines(&young(&["constants", "--p", "5/4", "--q", "3/2"]))[0];
    assert_eq!(rows[0][2].parse::<f64>().unwrap(), num(v, "r"));
    assert_eq!(rows[0][3].parse::<f64>().unwrap(), num(v, "k"));
    assert_eq!(rows[0][4].parse::<f64>().unwrap(), num(v, "young_constant"));
}

#[test]
fn symmetric_sweep_is_symmetric() {
    let rows = sweep_rows(&["sweep", "--p", "1.1:1.9:5", "--q", "1.1:1.9:5"]);
    assert_eq!(rows.len(), 25);
    for i in 0..5 {
        for j in 0..5 {
            assert_eq!(rows[5 * i + j][3], rows[5 * j + i][3]);
        }
    }
}

#[test]
fn forbidden_region_rows_are_marked() {
    let rows = sweep_rows(&["sweep", "--p", "1.5:3:4", "--q", "2"]);
    assert_eq!(rows.len(), 4);
    assert!((rows[0][2].parse::<f64>().unwrap() - 6.0).abs() < 1e-12);
    assert!(rows[1..].iter().all(|r| r[2] == "invalid" && r[4] == "invalid"));
}

#[test]
fn young_constant_is_continuous_through_the_boundary() {
    let rows = sweep_rows(&["sweep", "--p", "0.98:1.02:41", "--q", "0.98:1.02:41"]);
    let diagonal: Vec<f64> = (0..41).map(|i| rows[42 * i][4].parse().unwrap()).collect();
    assert_eq!(diagonal[20], 1.0);
    for w in diagonal.windows(2) {
        assert!((w[1] - w[0]).abs() < 5e-3);
    }
    assert!((diagonal[19] - 1.0).abs() < 1e-3 && (diagonal[21] - 1.0).abs() < 1e-3);
}

#[test]
fn transport_table() {
    let out = young(&["transport", "--seed", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,u,uprime,residual"));
    assert_eq!(lines.count(), 2048);

    let out = young(&["transport", "--seed", "4", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(num(&v, "residual") < 1e-4);

    assert_eq!(
        young(&["transport", "--seed", "4", "--tol", "1e-14"]).status.code(),
        Some(1)
    );
}

#[test]
fn extremize_scan_and_fit() {
    let out = young(&[
        "extremize",
        "--p",
        "3/2",
        "--q",
        "3/2",
        "--direction",
        "none",
        "--n",
        "128",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("epsilon,ratio"));
    let ratios: Vec<&str> = lines.map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(ratios.len(), 5);
    assert!(ratios.iter().all(|r| *r == ratios[0]));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.csv");
    let g = GaussianFn::new(2.0, 1.5, 0.25).unwrap();
    std::fs::write(&path, to_csv(&sample_gaussian(&g, &Grid::standard()))).unwrap();
    let out = young(&["extremize", "--p", "3/2", "--q", "3/2", "--fit", path.to_str().unwrap()]);
    let v = &json_lines(&out)[0];
    assert!((num(v, "rate") - 1.5).abs() < 1e-6);
    assert!(num(v, "residual") < 1e-8);
}

#[test]
fn extremize_json_summary() {
    let out = young(&[
        "extremize",
        "--p",
        "3/2",
        "--q",
        "3/2",
        "--direction",
        "quartic",
        "--n",
        "256",
        "--format",
        "json",
    ]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["points"].as_array().unwrap().len(), 5);
    assert!(num(&v["summary"], "second_difference") < 0.0);
}
