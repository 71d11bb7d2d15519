use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

use ns_sigma::algebra::rational::int;
use ns_sigma::algebra::{Family, LambdaPolynomial, Param};
use ns_sigma::schur::{schur, Partition};
use ns_sigma::sigma::weierstrass_oracle;
use ns_sigma::tau::build_tau;
use ns_sigma_cli::emit::parse_series;
use ns_sigma_cli::run;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("ns-sigma").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = call(args);
    assert_eq!(code, 0, "{err}");
    serde_json::from_str(&out).unwrap()
}

fn golden(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(path).unwrap()
}

const SYM_2_5: [&str; 6] = ["--n", "2", "--s", "5", "--lambda", "*=sym"];

#[test]
fn curve_summaries() {
    let v = json(&["curve", "--n", "2", "--s", "5"]);
    assert_eq!(v["gaps"], serde_json::json!([1, 3]));
    assert_eq!(v["lambda_ns"], serde_json::json!([2, 1]));
    assert_eq!(v["genus"], 2);
    let v = json(&["curve", "--n", "3", "--s", "4"]);
    assert_eq!(v["gaps"], serde_json::json!([1, 2, 5]));
    let (code, _, err) = call(&["curve", "--n", "2", "--s", "4"]);
    assert_eq!(code, 2);
    assert!(err.contains("gcd"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["tau", "--n", "2", "--s", "5", "--weight", "2"],
        vec!["tau", "--n", "2", "--s", "5", "--weight", "6", "--jobs", "0"],
        vec!["tau", "--n", "2", "--s", "5", "--weight", "6", "--lambda", "9,9=1"],
        vec!["tau", "--n", "2", "--s", "5", "--weight", "6", "--lambda", "4,0=one"],
        vec!["tau", "--n", "2", "--s", "5"],
        vec!["bogus"],
    ] {
        let (code, _, err) = call(&args);
        assert_eq!(code, 2, "{args:?}: {err}");
    }
}

#[test]
fn degenerate_tau_is_schur() {
    let v = json(&["tau", "--n", "3", "--s", "4", "--weight", "9"]);
    let lam = Partition::new(vec![3, 1, 1]).unwrap();
    assert_eq!(parse_series(&v).unwrap(), schur(&lam, 9).unwrap());
}

#[test]
fn numeric_curve_round_trips() {
    let args = ["tau", "--n", "2", "--s", "5", "--lambda", "4,0=1/2", "--lambda", "2,1=-3", "--weight", "9"];
    let (_, first, _) = call(&args);
    let doc: Value = serde_json::from_str(&first).unwrap();
    let parsed = parse_series(&doc).unwrap();
    let curve = ns_sigma_cli::config::parse_curve(2, 5, &["4,0=1/2".into(), "2,1=-3".into()]).unwrap();
    assert_eq!(&parsed, build_tau(&curve, 9).unwrap().series());
    let again = ns_sigma_cli::emit::series_json(doc["header"].clone(), &parsed, &(1..=9).collect::<Vec<_>>(), &[]);
    assert_eq!(ns_sigma_cli::emit::render(&again), first);
}

#[test]
fn output_is_independent_of_jobs_and_runs() {
    for cmd in ["tau", "sigma", "forms"] {
        let mut outputs = Vec::new();
        for jobs in ["1", "3", "1"] {
            let mut args = vec![cmd];
            args.extend(SYM_2_5);
            args.extend(["--weight", "8", "--jobs", jobs]);
            outputs.push(call(&args).1);
        }
        assert!(!outputs[0].is_empty());
        assert!(outputs.windows(2).all(|w| w[0] == w[1]), "{cmd}");
    }
}

#[test]
fn golden_files() {
    let mut args = vec!["tau"];
    args.extend(SYM_2_5);
    args.extend(["--weight", "8"]);
    assert_eq!(call(&args).1, golden("tau_2_5_w8.json"));
    args[0] = "sigma";
    assert_eq!(call(&args).1, golden("sigma_2_5_w8.json"));
}

#[test]
fn elliptic_golden_matches_the_weierstrass_oracle() {
    let doc: Value = serde_json::from_str(&golden("sigma_2_3_elliptic_w13.json")).unwrap();
    let l10 = LambdaPolynomial::var(Param::new(1, 0));
    let l00 = LambdaPolynomial::var(Param::new(0, 0));
    let oracle = weierstrass_oracle(&l10.scale(&int(-4)), &l00.scale(&int(-4)), 13);
    let parsed = parse_series(&doc).unwrap();
    assert_eq!(parsed.family(), Family::U);
    assert_eq!(parsed, oracle);
    let (_, out, _) = call(&["sigma", "--n", "2", "--s", "3", "--lambda", "1,0=sym 0,0=sym", "--weight", "13"]);
    assert_eq!(out, golden("sigma_2_3_elliptic_w13.json"));
}

#[test]
fn cache_returns_identical_output() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let mut args = vec!["sigma"];
    args.extend(SYM_2_5);
    args.extend(["--weight", "8", "--cache", cache]);
    let fresh = call(&args).1;
    let entries: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(entries.len(), 1);
    let cached = call(&args).1;
    assert_eq!(fresh, cached);
    args.extend(["--format", "text"]);
    let text = call(&args).1;
    assert_ne!(text, fresh);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 2);
}

#[test]
fn environment_overrides_cache_flag() {
    let flag_dir = tempfile::tempdir().unwrap();
    let env_dir = tempfile::tempdir().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_ns-sigma"))
        .args(["tau", "--n", "2", "--s", "3", "--weight", "5", "--cache"])
        .arg(flag_dir.path())
        .env("NS_SIGMA_CACHE", env_dir.path())
        .output()
        .unwrap();
    assert!(status.status.success());
    assert_eq!(std::fs::read_dir(flag_dir.path()).unwrap().count(), 0);
    assert_eq!(std::fs::read_dir(env_dir.path()).unwrap().count(), 1);
}

#[test]
fn verify_exit_codes() {
    let mut args = vec!["verify"];
    args.extend(SYM_2_5);
    args.extend(["--weight", "8", "--format", "text"]);
    let (code, out, _) = call(&args);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("0 failed"));

    args.extend(["--perturb", "2,2=1"]);
    let (code, out, _) = call(&args);
    assert_eq!(code, 1);
    let kp = out.lines().find(|l| l.contains("KP:")).unwrap();
    assert!(kp.starts_with("FAIL") && kp.contains("coefficient of t"), "{kp}");

    let bin = Command::new(env!("CARGO_BIN_EXE_ns-sigma"))
        .args(["verify", "--n", "2", "--s", "3", "--weight", "6", "--perturb", "3=1"])
        .output()
        .unwrap();
    assert_eq!(bin.status.code(), Some(1));
}

#[test]
fn degenerate_verify_is_fast() {
    let start = std::time::Instant::now();
    for (n, s) in [("2", "3"), ("2", "5"), ("3", "4")] {
        let (code, out, _) = call(&["verify", "--n", n, "--s", s, "--weight", "8"]);
        assert_eq!(code, 0, "{out}");
    }
    assert!(start.elapsed().as_secs_f64() < 3.0);
}

#[test]
fn gauge_file_is_applied() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gauge.json");
    std::fs::write(
        &path,
        r#"{"parameters": ["l4_0", "l1_1"],
            "gap_block": [[{"[1,0]": "3/1"}, {"[0,1]": "1/2"}],
                          [{"[0,1]": "1/2"}, {}]]}"#,
    )
    .unwrap();
    let gauge = path.to_str().unwrap();
    let mut args = vec!["sigma"];
    args.extend(SYM_2_5);
    args.extend(["--weight", "8", "--gauge", gauge]);
    let moved = json(&args);
    assert!(moved["header"]["gauge"].as_str().unwrap().contains("(3)*l4_0"));
    args[0] = "verify";
    let (code, out, _) = call(&args);
    assert_eq!(code, 0, "{out}");

    std::fs::write(&path, r#"{"gap_block": [[{"[]": "1/1"}]]}"#).unwrap();
    let (code, _, err) = call(&args);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn text_format() {
    let (code, out, _) = call(&["tau", "--n", "2", "--s", "3", "--weight", "5", "--format", "text"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("# tau\n"));
    assert!(out.contains("(1) * t1\n"));
}
