use std::process::{Command, Output};

use polyhahn::domains::check_admissible;
use polyhahn::operators::{import_triplets, LatticeOperators};
use serde_json::Value;

fn polyhahn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polyhahn")).args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

#[test]
fn hexagon_domain_has_seven_points() {
    let out = polyhahn(&["domain", "-d", "2", "-N", "3", "--ell", "2,2,2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["schema"], "polyhahn/1");
    assert_eq!(v["count"], "7");
    assert_eq!(v["N"], 3);
    assert_eq!(v["points"].as_array().unwrap().len(), 7);
}

#[test]
fn truncated_tetrahedron_index_count() {
    let out = polyhahn(&["index", "-d", "3", "-N", "10", "--ell", "6,7,5,8"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["count"], "217");
}

#[test]
fn inadmissible_spec_names_the_pair() {
    let out = polyhahn(&["domain", "-d", "2", "-N", "6", "--ell", "3,5,2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("(1,3)"));
}

#[test]
fn all_suites_pass_on_hexagon() {
    let out = polyhahn(&["verify", "--suite", "all", "-d", "2", "-N", "3", "--ell", "2,2,2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(stdout_json(&out)["passed"], true);
}

#[test]
fn counting_sweep_passes_and_is_reproducible() {
    let args = ["verify", "--suite", "counting", "--sweep", "d=2..4,N<=8", "--seed", "7"];
    let a = polyhahn(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, polyhahn(&args).stdout);
    assert_eq!(stdout_json(&a)["seed"], 7);
}

#[test]
fn sampled_sweep_depends_only_on_seed() {
    let run = |seed: &str| polyhahn(&["verify", "--suite", "counting", "--sweep", "d=4..5,N<=9,samples=5", "--seed", seed]).stdout;
    assert_eq!(run("3"), run("3"));
    assert_ne!(run("3"), run("4"));
}

#[test]
fn spectra_report_contains_worked_eigenvalue() {
    let out = polyhahn(&["verify", "--suite", "spectra", "-d", "2", "-N", "3", "--ell", "2,2,2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let eig = v["sections"][0]["detail"]["eigenvalues"].as_array().unwrap();
    let entry = eig.iter().find(|e| e["nu"] == serde_json::json!([1, 1])).unwrap();
    assert_eq!(entry["lambda"], serde_json::json!([10, 4]));
}

#[test]
fn limit_scans_exit_codes() {
    let out = polyhahn(&["limits", "charlier-hermite", "--n", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let scan = &stdout_json(&out)["scan"];
    assert!(scan["probes"].as_array().unwrap().iter().all(|p| p["exact_zero"] == true));

    let out = polyhahn(&["limits", "krawtchouk-charlier", "--a", "2", "--ladder", "16,32,64,128"]);
    assert_eq!(out.status.code(), Some(0));
    let orders: Vec<f64> = stdout_json(&out)["scan"]["probes"]
        .as_array()
        .unwrap()
        .iter()
        .filter_map(|p| p["fitted_order"].as_f64())
        .collect();
    assert!(!orders.is_empty() && orders.iter().all(|o| (o - 1.0).abs() <= 0.25));

    assert_eq!(polyhahn(&["limits", "no-such-scan"]).status.code(), Some(2));
}

#[test]
fn unknown_suite_and_bad_flags_are_config_errors() {
    assert_eq!(polyhahn(&["verify", "--suite", "bogus", "-d", "2", "-N", "3"]).status.code(), Some(2));
    assert_eq!(polyhahn(&["verify", "--suite", "shuffle", "-d", "3", "-N", "4"]).status.code(), Some(2));
    assert_eq!(polyhahn(&["verify", "--family", "krawtchouk", "--p", "2/3,1/2", "-N", "3"]).status.code(), Some(2));
    assert_eq!(polyhahn(&["domain", "-N", "3"]).status.code(), Some(2));
}

#[test]
fn missed_threshold_exits_one() {
    // pre-asymptotic rungs: the fitted order is outside 0.5 +- 0.15
    let out = polyhahn(&["limits", "charlier-hermite", "--ladder", "2,8"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["scan"]["passes"], false);
}

#[test]
fn relation_needing_four_indices_is_a_config_error() {
    let out = polyhahn(&["verify", "--suite", "generator-relation", "-d", "2", "-N", "3", "--ell", "2,2,2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_file_written_atomically() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("domain.csv");
    let out = polyhahn(&["domain", "-d", "2", "-N", "3", "--ell", "2,2,2", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().next(), Some("x1,x2"));
    assert_eq!(text.lines().count(), 8);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn operator_triplets_round_trip() {
    let out = polyhahn(&["operator", "-d", "2", "-N", "3", "--ell", "2,2,2", "--pair", "1,3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let (header, m) = import_triplets(&text, 7).unwrap();
    assert_eq!(header["family"], "hahn");
    assert_eq!(header["indices"]["pair"], serde_json::json!([1, 3]));
    let ops = LatticeOperators::hahn(&check_admissible(2, 3, &[2, 2, 2]).unwrap()).unwrap();
    assert!(m == *ops.l(1, 3).unwrap());
}

#[test]
fn polynomial_families_verify() {
    for args in [
        vec!["verify", "--suite", "kohno-drinfeld", "--family", "charlier", "--a", "1,2,3", "--degree", "4"],
        vec!["verify", "--suite", "generator-relation", "--family", "oscillator", "-d", "3", "--degree", "4"],
        vec!["verify", "--suite", "meixner-decomp", "--family", "meixner", "--s", "2", "--c", "1/4,1/5", "--degree", "4"],
        vec!["verify", "--suite", "all", "--family", "krawtchouk", "--p", "1/3,1/4,1/5", "-N", "3"],
    ] {
        let out = polyhahn(&args);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stdout));
    }
}

#[test]
fn heights_and_experiment() {
    let out = polyhahn(&["heights", "-d", "2", "-N", "9", "--ell", "7,6,7"]);
    assert_eq!(out.status.code(), Some(0));
    let h = &stdout_json(&out)["heights"];
    assert_eq!(h["v"], serde_json::json!([5, 6, 7, 7, 6, 5, 4, 3]));
    assert_eq!(h["h"], serde_json::json!([7, 7, 6, 6, 5, 5, 4, 3]));

    let out = polyhahn(&["experiment-d3", "-d", "3", "-N", "4", "--ell", "3,3,3,3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["report_only"], true);
}

#[test]
fn eval_table_and_gram_csv() {
    let out = polyhahn(&["eval", "-d", "2", "-N", "3", "--ell", "2,2,2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 8);
    assert!(text.lines().skip(1).all(|l| l.split(',').nth(2) == Some("1")));

    let out = polyhahn(&["gram", "-d", "2", "-N", "3", "--ell", "2,2,2", "--basis", "backward"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["gram"]["exact"], true);
}

#[test]
fn thread_cap_is_validated() {
    let run = |v: &str| {
        Command::new(env!("CARGO_BIN_EXE_polyhahn"))
            .env("POLYHAHN_THREADS", v)
            .args(["domain", "-d", "1", "-N", "2"])
            .output()
            .unwrap()
            .status
            .code()
    };
    assert_eq!(run("2"), Some(0));
    assert_eq!(run("0"), Some(2));
}
