//! CLI output compared against files in `tests/fixtures`.
//! Run with `REGENERATE_GOLDEN=1` to rewrite them.

use std::path::PathBuf;

use assert_cmd::Command;

const CASES: &[(&str, &[&str])] = &[
    (
        "table1_real_n5.md",
        &["table", "--which", "1", "--rank", "5", "--g-max", "3"],
    ),
    (
        "table1_quat_rank6.md",
        &[
            "table", "--which", "1", "--family", "quat", "--rank", "6", "--g-max", "3",
        ],
    ),
    (
        "table1_real_n5.json",
        &[
            "table", "--which", "1", "--rank", "5", "--g-max", "1", "--json",
        ],
    ),
    (
        "table2_320_n13_j0.md",
        &["table", "--which", "2", "--type", "3,2,0", "--rank", "13"],
    ),
    (
        "table2_421_n19_j1.json",
        &[
            "table", "--which", "2", "--type", "4,2,1", "--rank", "19", "--j", "1", "--json",
        ],
    ),
    (
        "table3_521_rank6_j0.md",
        &["table", "--which", "3", "--type", "5,2,1", "--rank", "6"],
    ),
    (
        "decompose_520_unpointed.json",
        &[
            "decompose",
            "--flavor",
            "unpointed",
            "--type",
            "5,2,0",
            "--rank",
            "3",
            "--json",
        ],
    ),
    (
        "explain_111_single_p3.txt",
        &[
            "explain",
            "--flavor",
            "single",
            "--type",
            "1,1,1",
            "--rank",
            "5",
            "--class",
            "3:1",
            "--at-prime",
            "3",
        ],
    ),
    (
        "pi_quat_201_rank4.json",
        &[
            "pi", "--family", "quat", "--type", "2,0,1", "--rank", "4", "--degree", "2", "--json",
        ],
    ),
];

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

#[test]
fn outputs_match_fixtures() {
    let regenerate = std::env::var_os("REGENERATE_GOLDEN").is_some();
    let mut stale = Vec::new();
    for (name, args) in CASES {
        let out = Command::cargo_bin("realgauge")
            .unwrap()
            .args(*args)
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "{name}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let got = String::from_utf8(out.stdout).unwrap();
        let path = fixture(name);
        if regenerate {
            std::fs::write(&path, &got).unwrap();
            continue;
        }
        match std::fs::read_to_string(&path) {
            Ok(want) if want == got => {}
            _ => stale.push(*name),
        }
    }
    assert!(stale.is_empty(), "outputs differ from fixtures: {stale:?}");
}
