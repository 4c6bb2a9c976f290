use assert_cmd::Command;
use predicates::prelude::*;
use realgauge::spaces::Factor;

fn bin() -> Command {
    Command::cargo_bin("realgauge").unwrap()
}

#[test]
fn pi_zero_of_multi_pointed_group() {
    bin()
        .args([
            "pi", "--family", "real", "--flavor", "multi", "--type", "3,2,0",
        ])
        .args(["--rank", "5", "--degree", "0"])
        .assert()
        .success()
        .stdout("Z^3 x Z/2^2\n");
}

#[test]
fn validate_reports_violated_clause() {
    bin()
        .args(["validate", "--type", "2,2,0"])
        .assert()
        .code(2)
        .stdout("invalid: r != g+1 mod 2\n");
    bin()
        .args(["validate", "--type", "2,1,0"])
        .assert()
        .success()
        .stdout("valid\n");
}

#[test]
fn invalid_input_names_the_flag() {
    bin()
        .args(["decompose", "--type", "2,2,0", "--rank", "5"])
        .assert()
        .code(2)
        .stderr(predicate::str::contains("--type"));
    bin()
        .args([
            "decompose",
            "--type",
            "1,2,0",
            "--rank",
            "5",
            "--class",
            "1:00",
        ])
        .assert()
        .code(2)
        .stderr(predicate::str::contains("--class"));
    bin()
        .args([
            "pi",
            "--type",
            "1,2,0",
            "--rank",
            "5",
            "--degree",
            "0",
            "--at-prime",
            "9",
        ])
        .assert()
        .code(2)
        .stderr(predicate::str::contains("--at-prime"));
    bin()
        .args([
            "decompose",
            "--family",
            "quat",
            "--type",
            "1,2,0",
            "--rank",
            "5",
        ])
        .assert()
        .code(2)
        .stderr(predicate::str::contains("--rank"));
}

#[test]
fn out_of_range_degree_exits_3() {
    bin()
        .args(["pi", "--type", "3,2,0", "--rank", "5", "--degree", "9"])
        .assert()
        .code(3)
        .stdout(predicate::str::contains("?pi_"))
        .stderr(predicate::str::contains("stable range"));
}

#[test]
fn table_bound_violation_exits_3() {
    bin()
        .args([
            "table", "--which", "2", "--type", "3,2,0", "--rank", "13", "--j", "1",
        ])
        .assert()
        .code(3)
        .stderr(predicate::str::contains("n > i+2"));
}

#[test]
fn decompose_json_round_trips() {
    let out = bin()
        .args([
            "decompose",
            "--flavor",
            "unpointed",
            "--type",
            "5,2,0",
            "--rank",
            "3",
            "--json",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let factors: Vec<Factor> = serde_json::from_value(v["expr"].clone()).unwrap();
    assert_eq!(factors.len(), 4);
    let rules: Vec<String> = serde_json::from_value(v["provenance"].clone()).unwrap();
    assert_eq!(rules, ["ThmD.1-row(g,r,0)", "ThmD.3-row(r-1,r,0)"]);
}

#[test]
fn decompose_text_and_explain() {
    bin()
        .args([
            "decompose",
            "--type",
            "2,0,1",
            "--rank",
            "5",
            "--at-prime",
            "3",
        ])
        .assert()
        .success()
        .stdout("O^2(U/O) (p-local: p≠2) x (O(U/O))^1 (p-local: p≠2) x (OU)^2\n");
    bin()
        .args([
            "explain",
            "--type",
            "2,0,1",
            "--rank",
            "5",
            "--at-prime",
            "3",
        ])
        .assert()
        .success()
        .stdout(predicate::str::contains("ThmC.1").and(predicate::str::contains("[x] n odd")));
}

#[test]
fn canonicalize_against_other_class() {
    bin()
        .args([
            "canonicalize",
            "--flavor",
            "unpointed",
            "--type",
            "0,1,0",
            "--rank",
            "3",
        ])
        .args(["--class", "1:1", "--against", "7:1"])
        .assert()
        .success()
        .stdout(predicate::str::contains("equivalent via"));
    bin()
        .args([
            "canonicalize",
            "--flavor",
            "unpointed",
            "--type",
            "1,2,0",
            "--rank",
            "4",
        ])
        .args(["--class", "0:11", "--against", "0:00"])
        .assert()
        .success()
        .stdout(predicate::str::ends_with("unknown\n"));
}

#[test]
fn enumerate_lists_types() {
    bin()
        .args(["enumerate", "--g-max", "1"])
        .assert()
        .success()
        .stdout("(0,1,0)\n(0,0,1)\n(1,2,0)\n(1,0,1)\n(1,1,1)\n");
}

#[test]
fn help_exits_cleanly() {
    bin()
        .arg("--help")
        .assert()
        .success()
        .stdout(predicate::str::contains("decompose"));
}
