use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn rfgrowth(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rfgrowth"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

/// The whole document minus wall-clock fields.
fn without_timing(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timing");
    if let Some(radii) = v.pointer_mut("/result/radii") {
        for r in radii.as_array_mut().unwrap() {
            r.as_object_mut().unwrap().remove("elapsed_ms");
        }
    }
    v
}

#[test]
fn sequences_prints_the_identity_table() {
    let out = rfgrowth(&["sequences", "--K", "3"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let d: Vec<&str> = v["result"]["table"]["d"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_str().unwrap())
        .collect();
    assert_eq!(d, ["33", "8021", "1461144071"]);
    assert_eq!(v["result"]["clauses"]["pass"], true);

    let csv = rfgrowth(&["sequences", "--K", "2", "--format", "csv"]);
    let text = String::from_utf8(csv.stdout).unwrap();
    assert_eq!(text, "k,p,q,d\n1,1,31,33\n2,3,2673,8021\n3,69,,\n");
}

#[test]
fn configuration_errors_exit_2() {
    assert_eq!(code(&rfgrowth(&["sequences", "--K", "0"])), 2);
    assert_eq!(code(&rfgrowth(&["sequences", "--f", "nonsense"])), 2);
    assert_eq!(
        code(&rfgrowth(&["verify", "--table", "/nonexistent/table.json"])),
        2
    );
    assert_eq!(code(&rfgrowth(&["rfgrowth", "/nonexistent/p.txt"])), 2);
}

#[test]
fn verify_accepts_good_tables() {
    for args in [
        vec!["verify", "--K", "3"],
        vec!["verify", "--f", "poly:2", "--K", "3"],
        vec!["verify", "--f", "exp2", "--K", "2"],
    ] {
        let out = rfgrowth(&args);
        assert_eq!(code(&out), 0, "{args:?}");
        let v = json(&out);
        assert_eq!(v["result"]["diagonal"], true);
        assert_eq!(v["result"]["clauses_pass"], true);
    }
}

#[test]
fn verify_rejects_a_tampered_table() {
    let dir = tempfile::tempdir().unwrap();
    let full = json(&rfgrowth(&["sequences", "--K", "2"]));
    let good = write(dir.path(), "good.json", &full.to_string());
    assert_eq!(
        code(&rfgrowth(&["verify", "--table", good.to_str().unwrap()])),
        0
    );

    let mut table = full["result"]["table"].clone();
    table["p"][1] = "5".into();
    let bad = write(dir.path(), "bad.json", &table.to_string());
    let out = rfgrowth(&["verify", "--table", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["result"]["clauses_pass"], false);
}

#[test]
fn certificate_levels_and_errors() {
    let out = rfgrowth(&["certificate", "--n", "8"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["result"]["certificate"]["k"], 1);
    assert_eq!(v["result"]["valid"], true);

    assert_eq!(code(&rfgrowth(&["certificate", "--n", "7"])), 2);
    assert_eq!(code(&rfgrowth(&["certificate"])), 2);
    assert_eq!(
        code(&rfgrowth(&["certificate", "--K", "1", "--n", "300"])),
        3
    );
}

#[test]
fn certificate_check_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.json");
    let out = rfgrowth(&["certificate", "--n", "280", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let check = rfgrowth(&["certificate", "--check", path.to_str().unwrap()]);
    assert_eq!(code(&check), 0);
    assert_eq!(json(&check)["result"]["valid"], true);

    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    v["result"]["certificate"]["k"] = 2.into();
    let bad = write(dir.path(), "bad.json", &v.to_string());
    let check = rfgrowth(&["certificate", "--check", bad.to_str().unwrap()]);
    assert_eq!(code(&check), 1);
    assert_eq!(json(&check)["result"]["valid"], false);
}

/// Worst case over 1 <= k <= n of the least modulus not dividing k.
fn integers_oracle(n: u64) -> u64 {
    (1..=n)
        .map(|k| (2..).find(|m| k % m != 0).unwrap())
        .max()
        .unwrap()
}

#[test]
fn integers_growth_csv() {
    let dir = tempfile::tempdir().unwrap();
    let z = write(dir.path(), "z.txt", "gens: a\n");
    let out = rfgrowth(&[
        "rfgrowth",
        z.to_str().unwrap(),
        "--radius",
        "1..12",
        "--max-degree",
        "8",
        "--format",
        "csv",
    ]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,D,elapsed_ms,witness_element,witness_min_order"
    );
    for (n, line) in (1..=12u64).zip(lines) {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols[0], n.to_string());
        assert_eq!(cols[1], integers_oracle(n).to_string(), "n={n}");
        assert_eq!(cols[4], cols[1]);
    }
}

#[test]
fn free_group_radius_two() {
    let dir = tempfile::tempdir().unwrap();
    let f2 = write(dir.path(), "f2.txt", "gens: a b\n");
    let out = rfgrowth(&["rfgrowth", f2.to_str().unwrap(), "--radius", "2"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["result"]["oracle"], "free");
    assert_eq!(v["result"]["radii"][0]["D"], "3");
}

#[test]
fn unknown_presentation_has_no_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let bs = write(dir.path(), "bs.txt", "gens: a b\nrel: baBa^-2\n");
    assert_eq!(code(&rfgrowth(&["rfgrowth", bs.to_str().unwrap()])), 4);
    let z = write(dir.path(), "z.txt", "gens: a\n");
    let out = rfgrowth(&["rfgrowth", z.to_str().unwrap(), "--oracle", "cyclic"]);
    assert_eq!(code(&out), 4);
}

#[test]
fn quotients_finds_s3_for_the_commutator() {
    let dir = tempfile::tempdir().unwrap();
    let f2 = write(dir.path(), "f2.txt", "# free group\ngens: a b\n");
    let out = rfgrowth(&[
        "quotients",
        f2.to_str().unwrap(),
        "--element",
        "abAB",
        "--element",
        "a^2",
    ]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["result"][0]["min_order"], 6);
    assert_eq!(v["result"][1]["min_order"], 3);
}

#[test]
fn output_does_not_depend_on_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let z2 = write(dir.path(), "z2.txt", "gens: a b\nrel: abAB\n");
    let run = |workers: &str| {
        let out = rfgrowth(&[
            "rfgrowth",
            z2.to_str().unwrap(),
            "--radius",
            "1..3",
            "--workers",
            workers,
        ]);
        assert_eq!(code(&out), 0);
        without_timing(json(&out))
    };
    assert_eq!(run("1"), run("4"));

    let f2 = write(dir.path(), "f2.txt", "gens: a b\n");
    let run = |workers: &str| {
        let out = rfgrowth(&[
            "quotients",
            f2.to_str().unwrap(),
            "--element",
            "ab^2AB^2",
            "--unpruned",
            "--workers",
            workers,
        ]);
        without_timing(json(&out))
    };
    assert_eq!(run("1"), run("4"));
}
