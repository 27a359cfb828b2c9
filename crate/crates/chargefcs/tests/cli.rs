use std::path::Path;
use std::process::Command;

use chargefcs::Manifest;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chargefcs"))
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

fn code(cmd: &mut Command) -> i32 {
    cmd.output().unwrap().status.code().unwrap()
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    write(&p.join("cap.json"), r#"{"engine": "quantum-cgf", "params": {"l": 30}}"#);
    let out = bin().arg("run").arg(p.join("cap.json")).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap of 24"));

    write(&p.join("bad.json"), r#"{"engine": "warp-drive"}"#);
    assert_eq!(code(bin().arg("run").arg(p.join("bad.json"))), 2);
    write(&p.join("odd.json"), r#"{"engine": "sep-mc", "params": {"l": 9}}"#);
    assert_eq!(code(bin().arg("run").arg(p.join("odd.json"))), 2);
    assert_eq!(code(bin().arg("run").arg(p.join("missing.json"))), 2);
    assert_eq!(code(bin().args(["schema", "nope"])), 2);
    assert_eq!(code(bin().args(["figure", "fig9"]).arg("--out").arg(p)), 2);
    assert_eq!(code(bin().args(["schema", "quantum-fluct"])), 0);
}

#[test]
fn analytic_rerun_is_identical() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("a.json");
    write(
        &spec,
        r#"{"engine": "analytic", "params": {"mu": 2.0}, "options": {"t_list": [4, 9], "lambda_grid": [-1.5, 0.0, 0.5]}, "output": "out/a.csv"}"#,
    );
    assert_eq!(code(bin().arg("run").arg(&spec)), 0);
    let first = std::fs::read(dir.path().join("out/a.csv")).unwrap();
    assert_eq!(code(bin().arg("run").arg(&spec)), 0);
    assert_eq!(first, std::fs::read(dir.path().join("out/a.csv")).unwrap());
    let m = Manifest::read(&dir.path().join("out/a.manifest.json")).unwrap();
    assert_eq!(m.outputs["a.csv"].sha256, chargefcs::manifest::sha256_hex(&first));
}

#[test]
fn manifest_round_trip_reproduces_hashes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let spec = a.path().join("mc.json");
    write(
        &spec,
        r#"{"engine": "sep-mc", "params": {"l": 32, "t": 8, "mu": 0, "seed": 5}, "options": {"n_samples": 20000, "n_batches": 4, "n_bootstrap": 10}, "output": "mc.csv"}"#,
    );
    assert_eq!(code(bin().args(["--threads", "2", "run"]).arg(&spec)), 0);
    let original = Manifest::read(&a.path().join("mc.manifest.json")).unwrap();
    std::fs::copy(a.path().join("mc.manifest.json"), b.path().join("again.json")).unwrap();
    assert_eq!(code(bin().args(["--threads", "1", "run"]).arg(b.path().join("again.json"))), 0);
    let rerun = Manifest::read(&b.path().join("mc.manifest.json")).unwrap();
    assert_eq!(original.outputs, rerun.outputs);
    assert_eq!(original.spec, rerun.spec);
    assert_eq!(
        std::fs::read(a.path().join("mc.csv")).unwrap(),
        std::fs::read(b.path().join("mc.csv")).unwrap()
    );
}

#[test]
fn seed_override_changes_samples_only() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("s.json");
    write(
        &spec,
        r#"{"engine": "coupled-mc", "params": {"l": 12, "t": 4, "mu": 2.0}, "options": {"n_samples": 5000}}"#,
    );
    let csv = dir.path().join("coupled-mc.csv");
    assert_eq!(code(bin().arg("run").arg(&spec)), 0);
    let base = std::fs::read(&csv).unwrap();
    assert_eq!(code(bin().args(["--seed", "9", "run"]).arg(&spec)), 0);
    assert_ne!(base, std::fs::read(&csv).unwrap());
    let m = Manifest::read(&dir.path().join("coupled-mc.manifest.json")).unwrap();
    assert_eq!(m.seed, 9);
}

#[test]
fn manifest_keys_are_sorted() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("m.json");
    write(&spec, r#"{"engine": "magnon-discrete", "params": {"l": 12, "t": 3}}"#);
    assert_eq!(code(bin().arg("run").arg(&spec)), 0);
    let text = std::fs::read_to_string(dir.path().join("magnon-discrete.manifest.json")).unwrap();
    let top: Vec<&str> = text
        .lines()
        .filter(|l| l.starts_with("  \""))
        .map(|l| l.trim().split('"').nth(1).unwrap())
        .collect();
    let mut sorted = top.clone();
    sorted.sort();
    assert_eq!(top, sorted);
    assert!(top.contains(&"wall_time_s") && top.contains(&"engine_version"));
}
