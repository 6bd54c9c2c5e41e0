use serde_json::Value;
use tqm_cli::{run, Outcome, EXIT_DOMAIN, EXIT_PARSE};

fn tqm(args: &[&str]) -> Outcome {
    run(std::iter::once("tqm").chain(args.iter().copied()))
}

fn sample(name: &str) -> String {
    format!("{}/../../samples/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn bracket_json_for_two_strand_trefoil() {
    let out = tqm(&["bracket", "--braid", "n=2: -1 -1 -1", "--closure", "trace", "--json"]);
    assert_eq!(out.status, 0, "{}", out.stderr);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["writhe"], -3);
    assert_eq!(v["raw"]["variable"], "A");
    let exps: Vec<i64> = v["raw"]["terms"].as_array().unwrap().iter().map(|t| t[0].as_i64().unwrap()).collect();
    assert_eq!(exps, [-7, -3, 1, 9]);
    assert_eq!(v["jones_q"]["variable"], "q");
}

#[test]
fn jones_from_pd_file() {
    let out = tqm(&["jones", "--pd", &sample("trefoil.pd")]);
    assert_eq!(out.status, 0, "{}", out.stderr);
    assert_eq!(out.stdout.trim(), "q + q^3 - q^4");
}

#[test]
fn bell_ladder_entropy() {
    let out = tqm(&["entropy", "--state", &sample("bell_ladder.json"), "--party", "left", "--k", "1000"]);
    assert_eq!(out.status, 0, "{}", out.stderr);
    let s: f64 = out.stdout.trim().parse().unwrap();
    assert!((s - 2f64.ln()).abs() < 1e-9, "{s}");
}

#[test]
fn integer_level_warns_about_truncation() {
    let out = tqm(&["gram", "--points", "4", "--k", "1"]);
    assert_eq!(out.status, 0);
    assert!(!out.stderr.is_empty());
}

#[test]
fn exit_codes() {
    assert_eq!(tqm(&["frobnicate"]).status, EXIT_PARSE);
    assert_eq!(tqm(&["bracket", "--braid", "n=2: 1 x"]).status, EXIT_PARSE);
    let out = tqm(&["gram", "--points", "3"]);
    assert_eq!(out.status, EXIT_DOMAIN);
    assert!(out.stderr.starts_with("error:"));
    assert_eq!(tqm(&["entropy", "--state", &sample("ghz_connectome.json"), "--party", "5"]).status, EXIT_DOMAIN);
}

#[test]
fn bench_csv_shapes() {
    let empty = tqm(&["bench", "--family", "empty"]);
    assert_eq!(empty.stdout.trim(), tqm_cli::bench::CSV_HEADER);
    let random = tqm(&["bench", "--family", "random", "--max-crossings", "8", "--samples", "50", "--seed", "1"]);
    assert_eq!(random.status, 0, "{}", random.stderr);
    assert_eq!(random.stdout.lines().count(), 51);
    let torus = tqm(&["bench", "--family", "torus", "--max-crossings", "12"]);
    let crossings: Vec<usize> = torus
        .stdout
        .lines()
        .skip(1)
        .map(|l| l.rsplitn(3, ',').nth(2).unwrap().rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(crossings, (1..=12).collect::<Vec<_>>());
}

#[test]
fn seeded_runs_are_deterministic() {
    for args in [
        &["teleport", "--seed", "3", "--json"][..],
        &["ineq", "--seed", "9", "--parties", "4", "--pairs", "6"][..],
        &["densecode", "--bits", "1,1", "--braided"][..],
    ] {
        let (a, b) = (tqm(args), tqm(args));
        assert_eq!(a.status, 0, "{args:?}: {}", a.stderr);
        assert_eq!(a.stdout, b.stdout);
    }
}
