use std::path::PathBuf;

use affcert_cli::group_file::{builtin, GroupFile, BUILTINS};
use affcert_cli::{run, Outcome, EXIT_BUDGET, EXIT_INPUT, EXIT_OK};
use serde_json::Value;

fn affcert(args: &[&str]) -> Outcome {
    run(std::iter::once("affcert").chain(args.iter().copied()))
}

fn results(out: &Outcome) -> Value {
    out.report.as_ref().expect("a report").results.clone()
}

fn temp_path(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("affcert-cli-{}-{name}", std::process::id()))
}

#[test]
fn decompose_reports_dimensions_and_profile() {
    let out = affcert(&[
        "decompose",
        "--input",
        "builtin:opposite-sign",
        "--element",
        "g",
    ]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    let r = results(&out);
    assert_eq!(
        r["dims"],
        serde_json::json!({ "a_plus": 1, "a_minus": 1, "a_zero": 1 })
    );
    assert!((r["profile"]["s"].as_f64().unwrap() - 0.5).abs() < 1e-12);

    let conj = affcert(&[
        "decompose",
        "--input",
        "builtin:opposite-sign",
        "--word",
        "g h g^-1",
    ]);
    assert_eq!(results(&conj)["dims"], r["dims"]);

    let id = affcert(&[
        "decompose",
        "--input",
        "builtin:opposite-sign",
        "--word",
        "e",
    ]);
    assert_eq!(results(&id)["dims"]["a_zero"], 3);
}

#[test]
fn sign_of_an_inverse_flips_in_three_dimensions() {
    let a = affcert(&["sign", "--input", "builtin:opposite-sign", "--element", "h"]);
    let b = affcert(&["sign", "--input", "builtin:opposite-sign", "--word", "h^-1"]);
    let (a, b) = (
        results(&a)["alpha"].as_f64().unwrap(),
        results(&b)["alpha"].as_f64().unwrap(),
    );
    assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    let p = affcert(&["sign", "--input", "builtin:product", "--element", "b"]);
    assert_eq!(results(&p)["setting"], "product");
}

#[test]
fn certify_exit_codes() {
    let cases = [
        ("builtin:opposite-sign", EXIT_OK, "opposite_sign_search"),
        ("builtin:margulis3d", EXIT_BUDGET, "exhausted"),
        ("builtin:fixed-point", EXIT_OK, "eigenvalue_one_screen"),
    ];
    for (input, code, stage) in cases {
        let out = affcert(&[
            "certify",
            "--input",
            input,
            "--max-word-len",
            "4",
            "--n-max",
            "50",
        ]);
        assert_eq!(out.code, code, "{input}: {}", out.stderr);
        assert_eq!(results(&out)["stage"], stage, "{input}");
    }
}

#[test]
fn check_accepts_a_written_report_and_rejects_a_tampered_one() {
    let path = temp_path("report.json");
    let p = path.to_str().unwrap();
    let out = affcert(&[
        "certify",
        "--input",
        "builtin:opposite-sign",
        "--n-max",
        "40",
        "--output",
        p,
    ]);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.is_empty());

    let ok = affcert(&["check", "--input", p]);
    assert_eq!(ok.code, EXIT_OK, "{}", ok.stderr);
    assert_eq!(results(&ok)["all_verified"], true);

    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let alpha = &mut v["certificates"][0]["alphas"][0];
    assert!(alpha.is_number(), "unexpected certificate layout");
    *alpha = serde_json::json!(-5.0);
    std::fs::write(&path, serde_json::to_string(&v).unwrap()).unwrap();
    let bad = affcert(&["check", "--input", p]);
    assert_eq!(bad.code, EXIT_INPUT);
    assert_eq!(results(&bad)["all_verified"], false);
    std::fs::remove_file(&path).ok();
}

#[test]
fn group_files_round_trip() {
    for name in BUILTINS {
        let spec = builtin(name).unwrap();
        let text = GroupFile::from_spec(&spec).to_toml();
        let back = GroupFile::parse(&text).unwrap().to_spec().unwrap();
        assert_eq!(back.names(), spec.names(), "{name}");
        assert_eq!(back.ambient.kind, spec.ambient.kind, "{name}");
        for (a, b) in spec.generators.iter().zip(&back.generators) {
            assert_eq!(a.linear, b.linear, "{name}");
            assert_eq!(a.translation, b.translation, "{name}");
        }
    }
}

#[test]
fn example_group_file_drives_certify() {
    let out = affcert(&["example", "product"]);
    let path = temp_path("product.toml");
    std::fs::write(&path, results(&out)["group_file"].as_str().unwrap()).unwrap();
    let c = affcert(&[
        "certify",
        "--input",
        path.to_str().unwrap(),
        "--max-word-len",
        "4",
        "--n-max",
        "20",
    ]);
    assert_eq!(c.code, EXIT_OK, "{}", c.stderr);
    assert_eq!(results(&c)["words"], serde_json::json!(["a^-1", "b"]));
    std::fs::remove_file(&path).ok();
}

#[test]
fn input_errors_exit_with_two() {
    let missing = affcert(&["certify"]);
    assert_eq!(missing.code, EXIT_INPUT);
    assert!(missing.stderr.contains("--input"));

    let path = temp_path("broken.toml");
    std::fs::write(&path, "dim = 3\n[[generator]\n").unwrap();
    let broken = affcert(&["scan", "--input", path.to_str().unwrap()]);
    assert_eq!(broken.code, EXIT_INPUT);
    assert!(broken.stderr.contains("line 2"), "{}", broken.stderr);
    std::fs::remove_file(&path).ok();

    assert_eq!(affcert(&["classify", "5", "G2"]).code, EXIT_INPUT);
    assert_eq!(
        affcert(&["certify", "--input", "builtin:nothing"]).code,
        EXIT_INPUT
    );
    assert_eq!(affcert(&["frobnicate"]).code, EXIT_INPUT);
    assert_eq!(affcert(&["--help"]).code, EXIT_OK);
}

#[test]
fn reports_are_deterministic_apart_from_timing() {
    let args = [
        "certify",
        "--input",
        "builtin:product",
        "--max-word-len",
        "3",
        "--n-max",
        "30",
    ];
    let a = affcert(&args).report.unwrap();
    let b = affcert(&args).report.unwrap();
    assert_eq!(a.without_timing(), b.without_timing());
    let v: Value = serde_json::from_str(&a.render()).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert!(v["timing"]["seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn classify_prints_a_single_verdict_or_the_table() {
    let one = affcert(&["classify", "5", "SO(3,2)"]);
    assert_eq!(one.code, EXIT_OK);
    let all = affcert(&["classify"]);
    assert!(results(&all)["table"].as_array().unwrap().len() > 10);
}
