use std::process::{Command, Output};

use serde_json::Value;

fn cuboid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cuboid"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = cuboid(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn code(args: &[&str]) -> Option<i32> {
    cuboid(args).status.code()
}

#[test]
fn graph_output() {
    assert_eq!(
        json(&["graph", "--group", "gamma0", "--level", "2", "--format", "json"])["n"],
        3
    );
    assert_eq!(json(&["graph", "--group", "gamma", "--level", "1"])["n"], 1);
    let dot = cuboid(&[
        "graph", "--group", "gamma1", "--level", "5", "--format", "dot",
    ]);
    let text = String::from_utf8(dot.stdout).unwrap();
    assert!(text.starts_with("graph") || text.starts_with("digraph"));
    assert!(text.trim_end().ends_with('}'));
}

#[test]
fn outputs_are_byte_identical() {
    for args in [
        &["graph", "--group", "gamma_upper1", "--level", "8"][..],
        &[
            "graph", "--group", "gamma", "--level", "4", "--format", "dot",
        ][..],
        &["polygon", "--group", "gamma0", "--level", "13"][..],
        &[
            "polygon", "--group", "gamma0", "--level", "13", "--format", "svg",
        ][..],
    ] {
        assert_eq!(cuboid(args).stdout, cuboid(args).stdout);
    }
}

#[test]
fn polygon_output() {
    let p = json(&[
        "polygon", "--group", "gamma", "--level", "1", "--format", "json",
    ]);
    assert_eq!(p["triangles"].as_array().unwrap().len(), 1);
    assert_eq!(p["generators"].as_array().unwrap().len(), 2);
    let p = json(&[
        "polygon", "--group", "gamma", "--level", "5", "--format", "json",
    ]);
    assert_eq!(p["triangles"].as_array().unwrap().len(), 60);

    let out = cuboid(&[
        "polygon", "--group", "gamma0", "--level", "11", "--format", "svg",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let svg = String::from_utf8(out.stdout).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    assert_eq!(svg.matches("<svg").count(), svg.matches("</svg>").count());
}

#[test]
fn writes_to_a_file() {
    let path = std::env::temp_dir().join(format!("cuboid-cli-{}.json", std::process::id()));
    let p = path.to_str().unwrap();
    assert_eq!(
        code(&["graph", "--group", "gamma0", "--level", "6", "-o", p]),
        Some(0)
    );
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["n"], 12);
    std::fs::remove_file(path).unwrap();
}

#[test]
fn invariants_output() {
    let v = json(&["invariants", "--group", "gamma0", "--level", "11"]);
    assert_eq!(v["invariants"]["genus"], 1);
    assert_eq!(v["invariants"]["cusp_count"], 2);
    assert_eq!(v["invariants"]["index"], 12);
}

#[test]
fn express_output() {
    let v = json(&[
        "express", "--group", "gamma0", "--level", "11", "--matrix", "1,1,0,1",
    ]);
    assert_eq!(v["verified"], true);
    assert_eq!(v["evaluates_to"], "1,1,0,1");
    let t = json(&[
        "express", "--group", "gamma0", "--level", "11", "--matrix", "1,1,0,1", "--trace",
    ]);
    assert_eq!(t["evaluates_to"], "1,1,0,1");
    let v = json(&[
        "express",
        "--group",
        "gamma",
        "--level",
        "2",
        "--matrix",
        "-1,2,-2,3",
    ]);
    assert_eq!(v["evaluates_to"], "1,-2,2,-3");

    let out = cuboid(&[
        "express", "--group", "gamma", "--level", "2", "--matrix", "1,1,0,1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("mod 2"));
}

#[test]
fn locate_output() {
    let v = json(&[
        "locate", "--group", "gamma0", "--level", "5", "--x", "-7/3", "--y", "0.02",
    ]);
    assert_eq!(v["point"][1], "1/50");
    assert!(v["word"].is_array());
}

#[test]
fn bench_rows() {
    let out = cuboid(&["bench", "--group", "gamma0", "--levels", "5,7"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].split_whitespace().nth(1), Some("6"));
    assert_eq!(rows[1].split_whitespace().nth(1), Some("8"));
}

#[test]
fn exit_codes() {
    assert_eq!(
        code(&["graph", "--group", "gamma0", "--level", "0"]),
        Some(1)
    );
    assert_eq!(
        code(&["graph", "--group", "gamma7", "--level", "3"]),
        Some(1)
    );
    assert_eq!(code(&["graph", "--group", "gamma0"]), Some(1));
    assert_eq!(
        code(&["express", "--group", "gamma0", "--level", "3", "--matrix", "1,2,x,4"]),
        Some(1)
    );
    assert_eq!(
        code(&["express", "--group", "gamma0", "--level", "3", "--matrix", "2,1,1,2"]),
        Some(1)
    );
    assert_eq!(
        code(&["express", "--group", "gamma0", "--level", "3", "--matrix", "0,-1,1,0"]),
        Some(2)
    );
    assert_eq!(
        code(&["locate", "--group", "gamma0", "--level", "3", "--x", "0", "--y", "-1"]),
        Some(2)
    );
    assert_eq!(
        code(&["locate", "--group", "gamma0", "--level", "3", "--x", "a", "--y", "1"]),
        Some(1)
    );
    assert_eq!(code(&["--help"]), Some(0));
    assert_eq!(code(&["--version"]), Some(0));
}
