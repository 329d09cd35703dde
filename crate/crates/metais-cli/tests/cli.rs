//! Command-line behavior: exit codes, output files, determinism of reruns,
//! and the interplay of flags, config files and environment fallbacks.

use std::path::Path;
use std::process::{Command, Output};

use metais::dataset::write_keel;
use metais::synth;

fn metais(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_metais"))
        .args(args)
        .output()
        .expect("spawn CLI")
}

fn assert_code(out: &Output, want: i32, what: &str) {
    assert_eq!(
        out.status.code(),
        Some(want),
        "{what}: exit {:?}\nstdout: {}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn bytes(p: &Path) -> Vec<u8> {
    std::fs::read(p).unwrap_or_else(|e| panic!("read {}: {e}", p.display()))
}

fn json(p: &Path) -> serde_json::Value {
    serde_json::from_slice(&bytes(p)).unwrap_or_else(|e| panic!("parse {}: {e}", p.display()))
}

#[test]
fn select_writes_outputs_and_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("moons.dat");
    write_keel(&synth::moons(200, 0.3, 11).unwrap(), &data).unwrap();

    for out in ["o1", "o2"] {
        let out = dir.path().join(out);
        let res = metais(&[
            "select",
            "--data",
            data.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--algorithm",
            "enn",
            "-k",
            "3",
        ]);
        assert_code(&res, 0, "select");
    }
    for file in ["mask.csv", "stats.json", "run_config.json"] {
        assert_eq!(
            bytes(&dir.path().join("o1").join(file)),
            bytes(&dir.path().join("o2").join(file)),
            "{file} differs between reruns"
        );
    }
    let stats = json(&dir.path().join("o1/stats.json"));
    assert_eq!(stats["algorithm"], "enn");
    assert_eq!(stats["n"], 200);
    assert!(stats["reduction_rate"].as_f64().unwrap() > 0.0);
    assert!(dir.path().join("o1/timing.json").exists());
}

#[test]
fn exit_codes_distinguish_usage_and_runtime_errors() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.dat");
    write_keel(&synth::moons(80, 0.2, 5).unwrap(), &data).unwrap();
    let out = dir.path().join("out");
    let out_s = out.to_str().unwrap();

    // Unknown algorithm name and unknown flag: usage errors.
    let res = metais(&["select", "--data", data.to_str().unwrap(), "--out", out_s, "--algorithm", "nosuch"]);
    assert_code(&res, 2, "unknown algorithm");
    let res = metais(&["select", "--no-such-flag"]);
    assert_code(&res, 2, "unknown flag");
    let res = metais(&[]);
    assert_code(&res, 2, "missing subcommand");

    // Missing input file: a runtime error.
    let res = metais(&["select", "--data", "absent.dat", "--out", out_s]);
    assert_code(&res, 1, "missing dataset");
    // Malformed config file: also runtime.
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "no_such_key = 1\n").unwrap();
    let res = metais(&[
        "select",
        "--config",
        cfg.to_str().unwrap(),
        "--data",
        data.to_str().unwrap(),
        "--out",
        out_s,
    ]);
    assert_code(&res, 1, "unknown config key");
    // Zero worker threads is rejected.
    let res = metais(&["select", "--data", data.to_str().unwrap(), "--out", out_s, "--jobs", "0"]);
    assert_code(&res, 1, "jobs 0");
}

#[test]
fn meta_train_then_meta_select_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.dat");
    let b = dir.path().join("b.dat");
    write_keel(&synth::moons(250, 0.3, 21).unwrap(), &a).unwrap();
    write_keel(&synth::spirals(250, 0.3, 22).unwrap(), &b).unwrap();
    let bundle = dir.path().join("bundle");

    let res = metais(&[
        "meta-train",
        "--data",
        a.to_str().unwrap(),
        "--data",
        b.to_str().unwrap(),
        "--out",
        bundle.to_str().unwrap(),
        "--trees",
        "40",
        "--seed",
        "3",
    ]);
    assert_code(&res, 0, "meta-train");
    for file in ["model.json", "selector.json", "training_log.json", "run_config.json"] {
        assert!(bundle.join(file).exists(), "missing {file}");
    }
    let log = json(&bundle.join("training_log.json"));
    assert_eq!(log["meta_columns"], 48);
    assert!(log["meta_rows"].as_u64().unwrap() > 0);

    let query = dir.path().join("q.dat");
    write_keel(&synth::moons(150, 0.25, 23).unwrap(), &query).unwrap();
    let sel_out = dir.path().join("sel");
    let res = metais(&[
        "meta-select",
        "--bundle",
        bundle.to_str().unwrap(),
        "--data",
        query.to_str().unwrap(),
        "--out",
        sel_out.to_str().unwrap(),
        "--theta",
        "0.4",
    ]);
    assert_code(&res, 0, "meta-select");

    let probs = String::from_utf8(bytes(&sel_out.join("probabilities.csv"))).unwrap();
    let mut lines = probs.lines();
    assert_eq!(lines.next(), Some("index,probability"));
    assert_eq!(lines.count(), 150);
    let mask = metais::isalgos::read_mask_csv(sel_out.join("mask.csv")).unwrap();
    assert_eq!(mask.len(), 150);
    let stats = json(&sel_out.join("stats.json"));
    assert_eq!(stats["theta"], 0.4);
    assert_eq!(
        stats["n_kept"].as_u64().unwrap(),
        mask.iter().filter(|&&k| k).count() as u64
    );
}

#[test]
fn config_file_applies_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.dat");
    write_keel(&synth::moons(150, 0.3, 31).unwrap(), &data).unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "algorithm = \"icf\"\nk = 5\n").unwrap();

    let out = dir.path().join("out");
    let res = metais(&[
        "select",
        "--config",
        cfg.to_str().unwrap(),
        "--data",
        data.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--algorithm",
        "enn",
    ]);
    assert_code(&res, 0, "select with config");
    let rc = json(&out.join("run_config.json"));
    assert_eq!(rc["algorithm"], "enn", "flag overrides the config file");
    assert_eq!(rc["k"], 5, "config fills what flags leave unset");
}

#[test]
fn data_dir_environment_fallback() {
    let dir = tempfile::tempdir().unwrap();
    let data_home = dir.path().join("corpus");
    std::fs::create_dir(&data_home).unwrap();
    write_keel(&synth::moons(120, 0.25, 41).unwrap(), &data_home.join("m.dat")).unwrap();

    let out = dir.path().join("out");
    let res = Command::new(env!("CARGO_BIN_EXE_metais"))
        .args(["select", "--data", "m.dat", "--out", out.to_str().unwrap()])
        .env("METAIS_DATA_DIR", &data_home)
        .output()
        .expect("spawn CLI");
    assert_code(&res, 0, "data dir fallback");
}

#[test]
fn graph_cache_writes_a_loadable_graph() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.dat");
    write_keel(&synth::blobs(120, 2, 3, 1.0, 51).unwrap(), &data).unwrap();
    let out = dir.path().join("gc");
    let res = metais(&[
        "graph-cache",
        "--data",
        data.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "-k",
        "9",
    ]);
    assert_code(&res, 0, "graph-cache");
    let g = metais::nng::load_graph(out.join("graph.json")).unwrap();
    assert_eq!(g.n_rows(), 120);
    assert_eq!(g.k_max(), 9);
}
