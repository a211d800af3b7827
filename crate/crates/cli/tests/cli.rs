use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rigidity_core::fixtures;
use rigidity_core::framework::FrameworkData;
use rigidity_core::{Graph, VertexSet};
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn rigid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rigid")).args(args).output().expect("binary runs")
}

fn report(args: &[&str]) -> Value {
    let out = rigid(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("rigid-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

fn read<T: serde::de::DeserializeOwned>(name: &str) -> T {
    serde_json::from_str(&std::fs::read_to_string(fixture(name)).unwrap()).unwrap()
}

#[test]
fn fixture_files_match_the_catalog() {
    for (name, _, g) in fixtures::catalog() {
        assert_eq!(read::<Graph>(&format!("{name}.json")), g, "{name}");
    }
    let s = fixtures::strong_separation();
    assert_eq!(read::<Graph>("strong-separation/g1.json"), s.g1);
    assert_eq!(read::<Graph>("strong-separation/g2.json"), s.g2);
    assert_eq!(read::<Vec<VertexSet>>("strong-separation/f1.json"), s.f1);
    assert_eq!(read::<Vec<VertexSet>>("strong-separation/f2.json"), s.f2);
    let p = fixtures::non_generic_path();
    assert_eq!(read::<Graph>("non-generic-path.json"), p.graph);
    assert_eq!(read::<Vec<VertexSet>>("non-generic-path-steps.json"), p.steps);
    assert_eq!(read::<FrameworkData>("non-generic-path-framework.json").coords, p.coords);
}

#[test]
fn analyze_k5() {
    let k5 = scratch("k5.json", &serde_json::to_string(&Graph::complete(1..=5)).unwrap());
    let r = &report(&["analyze", "--d", "3", path(&k5)])["result"];
    assert_eq!(r["rank"], 9);
    assert_eq!(r["rigid"], true);
    assert_eq!(r["globally_rigid"], true);
    assert_eq!(r["certified"], true);
    assert_eq!(r["c_d"], 0);
}

#[test]
fn analyze_double_banana() {
    let r = &report(&["analyze", "--d", "3", path(&fixture("double-banana.json"))])["result"];
    assert_eq!(r["rank"], 17);
    assert_eq!(r["rigid"], false);
    assert_eq!(r["rd_connected"], true);
    assert_eq!(r["certified"], false);
    assert!(r["note"].as_str().unwrap().starts_with("not certified"));
}

#[test]
fn chordal_chain_certifies_with_a_gluing_tree() {
    let g = fixture("k4-chain-3.json");
    let out = report(&["certify", "--d", "2", path(&g)]);
    assert_eq!(out["result"]["kind"], "gluing-tree");
    let cert = scratch("chain-cert.json", &out["result"]["certificate"].to_string());
    let closure = report(&["closure", "--d", "2", path(&g), path(&cert)]);
    assert_eq!(closure["result"]["characterization"], true);
    let linked = report(&["linked", "--d", "2", path(&g), path(&cert), "3", "4"]);
    assert_eq!(linked["result"]["globally_linked"], true);
}

#[test]
fn strong_separation_fixture_is_incompatible() {
    let s = |f: &str| fixture(&format!("strong-separation/{f}.json"));
    let (g1, g2, f1, f2) = (s("g1"), s("g2"), s("f1"), s("f2"));
    let r = &report(&["compat", path(&g1), path(&g2), path(&f1), path(&f2)])["result"];
    assert_eq!(r["d"], 1);
    assert_eq!(r["verdict"]["compatible"], false);
    assert!(r["merged"].is_null());
}

#[test]
fn realize_enumerate_and_oracle() {
    let g = fixture("two-k4-on-edge.json");
    let fw = report(&["--seed", "7", "realize", "--d", "2", path(&g)]);
    let fw = scratch("two-k4-fw.json", &fw["result"].to_string());
    let e = report(&["enumerate", path(&g), path(&fw)]);
    assert_eq!(e["result"]["realizations"].as_array().unwrap().len(), 2);
    let frags = scratch("two-k4-frags.json", "[[1,2]]");
    let r = report(&["reflect", "--graph", path(&g), path(&fw), path(&frags)]);
    assert_eq!(r["result"]["equivalent"], true);
    let o = report(&["oracle", "--graph", path(&g), path(&fw), "--match"]);
    assert_eq!(o["result"]["matching"]["perfect"], true);
}

#[test]
fn reports_are_reproducible_apart_from_timing() {
    let g = fixture("planar-banana-pair.json");
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("timing");
        v
    };
    let a = strip(report(&["--seed", "11", "analyze", "--d", "2", path(&g)]));
    let b = strip(report(&["--seed", "11", "analyze", "--d", "2", path(&g)]));
    assert_eq!(a, b);
    assert!(a["randomized"].as_array().unwrap().iter().all(|v| v["seed"].is_u64() && v["error_bound"].is_f64()));
    assert_eq!(a["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn exit_codes() {
    let g = fixture("path-3.json");
    assert_eq!(rigid(&["rank", "--d", "0", path(&g)]).status.code(), Some(2));
    assert_eq!(rigid(&["rank", "--d", "2", "/nonexistent/graph.json"]).status.code(), Some(2));
    let bad = scratch("bad.json", "{\"vertices\": [1]");
    assert_eq!(rigid(&["analyze", "--d", "2", path(&bad)]).status.code(), Some(2));
    assert_eq!(rigid(&["verify-paper", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(rigid(&["verify-paper", "--suite", "A-lemmas", "--trials", "5"]).status.code(), Some(0));

    // One restart cannot find both classes of two K4s on an edge.
    let two = fixture("two-k4-on-edge.json");
    let fw = report(&["realize", "--d", "2", path(&two)]);
    let fw = scratch("two-k4-fw-short.json", &fw["result"].to_string());
    let out = rigid(&["oracle", "--graph", path(&two), path(&fw), "--restarts", "1", "--match"]);
    assert_eq!(out.status.code(), Some(1));
}
