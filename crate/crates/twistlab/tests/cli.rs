//! End-to-end runs of the binary: file round trips and exit codes.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_twistlab"))
}

fn tmpdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("twistlab-cli-{name}-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn classify_then_compare_agrees() {
    let dir = tmpdir("agree");
    let classified = dir.join("classified.json");
    let out = run(&[
        "classify",
        "--shape",
        "full",
        "--n",
        "2",
        "--m",
        "2",
        "--field",
        "p:2",
        "-o",
        path_str(&classified),
    ]);
    assert!(out.status.success(), "{out:?}");
    let out = run(&[
        "oracle",
        "--n",
        "2",
        "--m",
        "2",
        "--p",
        "2",
        "--compare",
        path_str(&classified),
    ]);
    assert!(out.status.success(), "{out:?}");
    assert!(String::from_utf8_lossy(&out.stdout).contains("sets agree"));
}

#[test]
fn verify_build_extract_round_trip() {
    let dir = tmpdir("roundtrip");
    let grids = dir.join("cycle.json");
    let out = run(&[
        "classify",
        "--shape",
        "2cycle",
        "--m",
        "2",
        "--field",
        "p:3",
        "-o",
        path_str(&grids),
    ]);
    assert!(out.status.success());

    // pick the last grid (a genuine 2-cycle one) out of the set
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&grids).unwrap()).unwrap();
    let set = doc["payload"].as_array().unwrap();
    let grid_file = dir.join("one.json");
    fs::write(&grid_file, set.last().unwrap().to_string()).unwrap();

    let out = run(&["verify", path_str(&grid_file)]);
    assert!(out.status.success(), "{out:?}");
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    assert!(text.contains("all axioms pass"));

    let algebra_file = dir.join("algebra.json");
    assert!(
        run(&["build", path_str(&grid_file), "-o", path_str(&algebra_file)])
            .status
            .success()
    );
    let alg: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&algebra_file).unwrap()).unwrap();
    assert_eq!(alg["payload"]["dim"], serde_json::json!(4));

    let datum_file = dir.join("datum.json");
    assert!(
        run(&["extract", path_str(&grid_file), "-o", path_str(&datum_file)])
            .status
            .success()
    );
    let datum: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&datum_file).unwrap()).unwrap();
    assert!(datum["payload"]["u"].is_array());

    let out = run(&["export", path_str(&grid_file), "--dot"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("digraph"));
}

#[test]
fn exit_codes_are_distinct() {
    let dir = tmpdir("exits");

    // input error: unreadable file
    let out = run(&["verify", path_str(&dir.join("missing.json"))]);
    assert_eq!(out.status.code(), Some(2));

    // math failure: corrupt a valid grid
    let grids = dir.join("set.json");
    assert!(run(&[
        "classify",
        "--shape",
        "full",
        "--n",
        "2",
        "--m",
        "2",
        "--field",
        "p:2",
        "-o",
        path_str(&grids)
    ])
    .status
    .success());
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&grids).unwrap()).unwrap();
    let mut grid = doc["payload"].as_array().unwrap()[0].clone();
    // flip one entry of E_11: the column-sum axiom must now fail
    let old = grid["E"][0][0][0][0].as_i64().unwrap();
    grid["E"][0][0][0][0] = serde_json::json!(1 - old);
    let bad = dir.join("bad.json");
    fs::write(&bad, grid.to_string()).unwrap();
    let out = run(&["verify", path_str(&bad)]);
    assert_eq!(out.status.code(), Some(1));

    // budget exceeded
    let out = run(&[
        "oracle", "--n", "2", "--m", "2", "--p", "2", "--budget", "3",
    ]);
    assert_eq!(out.status.code(), Some(3));

    // comparison mismatch: rank-one grids of a single path shape miss the
    // 2-cycle and reverse-path grids
    let shape = dir.join("path.json");
    fs::write(&shape, r#"{"n": 2, "arrows": [[1, 1], [2, 2], [1, 2]]}"#).unwrap();
    let partial = dir.join("partial.json");
    assert!(run(&[
        "classify",
        "--shape",
        path_str(&shape),
        "--m",
        "2",
        "--field",
        "p:2",
        "-o",
        path_str(&partial)
    ])
    .status
    .success());
    let out = run(&[
        "oracle",
        "--n",
        "2",
        "--m",
        "2",
        "--p",
        "2",
        "--compare",
        path_str(&partial),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn seeded_classification_is_reproducible() {
    let dir = tmpdir("seed");
    let a = dir.join("a.json");
    let b = dir.join("b.json");
    for out in [&a, &b] {
        assert!(run(&[
            "classify",
            "--shape",
            "2cycle",
            "--m",
            "3",
            "--field",
            "q",
            "--seed",
            "42",
            "-o",
            path_str(out)
        ])
        .status
        .success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&a).unwrap()).unwrap();
    assert_eq!(doc["seed"], serde_json::json!(42));
    assert_eq!(doc["schema_version"], serde_json::json!(1));
}
