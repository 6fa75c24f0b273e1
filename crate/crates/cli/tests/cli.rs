use std::fs;
use std::process::{Command, Output};

use skb_core::{BasisDescriptor, Certificate, Section};

fn skb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_skb"))
        .args(args)
        .env_remove("SKB_TRUNC_MARGIN")
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn cost_values() {
    for (t, tv) in [("0", "3/2"), ("0", "0"), ("-3", "0")] {
        let out = skb(&["cost", "--t", t, "--tv", tv]);
        assert!(out.status.success());
        assert_eq!(stdout(&out).lines().next(), Some("0"));
    }
    let out = skb(&["cost", "--t", "1/2", "--tv", "1", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["k"], 0);
    assert!(v["value"].is_string());
}

#[test]
fn scalar_commands() {
    assert_eq!(stdout(&skb(&["phi0", "--t", "1/2"])).trim(), "1/2");
    assert_eq!(stdout(&skb(&["phi0", "--t", "0"])).trim(), "-1");
    assert_eq!(stdout(&skb(&["legendre", "--tv", "0"])).trim(), "1");
    assert_eq!(
        stdout(&skb(&["pairing", "--t", "1", "--tv", "9"])).trim(),
        "9"
    );
}

#[test]
fn bad_rational_is_a_usage_error() {
    let out = skb(&["cost", "--t", "1/0", "--tv", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--t"));
}

#[test]
fn lambda_listing() {
    let out = stdout(&skb(&["lambda", "--a", "5", "--b", "3"]));
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("[(1, 3)]"));
    assert!(lines.next().unwrap().ends_with("= 1: ok"));
    let out = stdout(&skb(&["lambda", "--a", "6", "--b", "3"]));
    assert!(out.starts_with("[]\n"));
    assert!(out.contains("a multiple of b"));
    assert_eq!(
        skb(&["lambda", "--a", "3", "--b", "3"]).status.code(),
        Some(2)
    );
}

#[test]
fn expansion_prefix() {
    let out = stdout(&skb(&[
        "expand", "--a", "1", "--b", "1", "--edge", "1", "--D", "8",
    ]));
    assert!(out.starts_with("u^4*v + u*v^4 - "), "{out}");
    assert!(out.trim_end().ends_with("O(deg > 8)"));
}

#[test]
fn degree_one_basis() {
    let out = skb(&["build", "--degree", "1"]);
    assert!(out.status.success());
    let basis: BasisDescriptor = serde_json::from_slice(&out.stdout).unwrap();
    let got: Vec<Section> = basis.entries.into_iter().map(|e| e.section).collect();
    assert_eq!(got, vec![Section::var(1), Section::var(2), Section::var(0)]);
}

#[test]
fn build_is_deterministic_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let p1 = dir.path().join("a.json");
    let p2 = dir.path().join("b.json");
    assert!(
        skb(&["build", "--degree", "5", "--out", p1.to_str().unwrap()])
            .status
            .success()
    );
    assert!(
        skb(&["build", "--degree", "5", "--out", p2.to_str().unwrap()])
            .status
            .success()
    );
    assert_eq!(fs::read(&p1).unwrap(), fs::read(&p2).unwrap());
    let basis: BasisDescriptor = serde_json::from_slice(&fs::read(&p1).unwrap()).unwrap();
    assert_eq!(basis.len(), 15);

    let c1 = dir.path().join("c1.json");
    let c2 = dir.path().join("c2.json");
    let out = skb(&[
        "verify",
        "--file",
        p1.to_str().unwrap(),
        "--out",
        c1.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let out = skb(&["verify", "--degree", "5", "--out", c2.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(fs::read(&c1).unwrap(), fs::read(&c2).unwrap());
    let cert: Certificate = serde_json::from_slice(&fs::read(&c1).unwrap()).unwrap();
    assert!(cert.verdict);
}

#[test]
fn corrupted_basis_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    let out = skb(&["build", "--degree", "2"]);
    let mut basis: BasisDescriptor = serde_json::from_slice(&out.stdout).unwrap();
    let m = basis.entries[1].m;
    let s = basis.entries[1].section.t_free_part();
    basis.replace(&m, s);
    fs::write(&path, serde_json::to_string(&basis).unwrap()).unwrap();
    let out = skb(&["verify", "--file", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("differs on"));
}

#[test]
fn truncation_failures_exit_three() {
    let out = skb(&["val", "--a", "3", "--b", "2", "--edge", "1", "--D", "19"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--D 20"));
    assert_eq!(
        skb(&["val", "--a", "3", "--b", "2", "--edge", "1", "--D", "20"])
            .status
            .code(),
        Some(0)
    );

    let out = skb(&["build", "--degree", "3", "--truncation-margin", "-1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("S(2, 1)"));
}

#[test]
fn margin_from_environment() {
    let run = |v: &str| {
        Command::new(env!("CARGO_BIN_EXE_skb"))
            .args(["verify", "--degree", "2", "--out", "/dev/null"])
            .env("SKB_TRUNC_MARGIN", v)
            .output()
            .unwrap()
    };
    assert_eq!(run("2").status.code(), Some(0));
    assert_eq!(run("-2").status.code(), Some(2));
    assert_eq!(run("x").status.code(), Some(2));
}

#[test]
fn cost_csv() {
    let out = stdout(&skb(&[
        "sample-cost",
        "--t-min",
        "-1",
        "--t-max",
        "0",
        "--tv-min",
        "0",
        "--tv-max",
        "1/2",
        "--step",
        "1/2",
    ]));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "t,tv,cost");
    assert_eq!(lines.len(), 1 + 3 * 2);
    assert_eq!(lines[2], "-1,1/2,1/2");
    assert_eq!(
        skb(&[
            "sample-cost",
            "--t-min",
            "0",
            "--t-max",
            "1",
            "--tv-min",
            "0",
            "--tv-max",
            "1",
            "--step",
            "0"
        ])
        .status
        .code(),
        Some(2)
    );
}
