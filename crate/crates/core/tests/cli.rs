//! CLI contract: flags, exit codes, file outputs, and byte determinism.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_iqmimo"))
}

fn tmp(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join("iqmimo-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn preset_run_writes_csv_and_manifest() {
    let out = tmp("basic.csv");
    let status = bin()
        .args([
            "--preset",
            "fig1",
            "--trials",
            "3",
            "--seed",
            "7",
            "--n-list",
            "8,12",
            "--receivers",
            "iqu_mmse",
            "--no-asymptotics",
            "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("scenario,receiver,iqi_mode"));
    assert_eq!(lines.count(), 2, "one row per (N, receiver)");
    let manifest = out.with_file_name("basic.manifest.toml");
    let mtext = std::fs::read_to_string(&manifest).unwrap();
    assert!(mtext.contains("[config]"));
    assert!(mtext.contains("seed = 7"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let out1 = tmp("rep1.csv");
    let out2 = tmp("rep2.csv");
    for out in [&out1, &out2] {
        let status = bin()
            .args([
                "--preset",
                "fig3",
                "--trials",
                "2",
                "--seed",
                "9",
                "--eps-list",
                "0.0,0.2",
                "--receivers",
                "iqa_wlmmse",
                "--no-asymptotics",
                "--out",
            ])
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    }
    let a = std::fs::read(&out1).unwrap();
    let b = std::fs::read(&out2).unwrap();
    assert_eq!(a, b);
}

#[test]
fn manifest_round_trips_as_config() {
    let out = tmp("round1.csv");
    assert!(bin()
        .args([
            "--preset", "fig1", "--trials", "2", "--seed", "5", "--n-list", "8",
            "--receivers", "iqu_mmse", "--no-asymptotics", "--out",
        ])
        .arg(&out)
        .status()
        .unwrap()
        .success());
    let manifest = out.with_file_name("round1.manifest.toml");
    let out2 = tmp("round2.csv");
    assert!(bin()
        .args(["--config"])
        .arg(&manifest)
        .args(["--out"])
        .arg(&out2)
        .status()
        .unwrap()
        .success());
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(&out2).unwrap());
}

#[test]
fn unknown_preset_fails_without_writing_files() {
    let out = tmp("bogus.csv");
    let _ = std::fs::remove_file(&out);
    let status = bin().args(["--preset", "bogus", "--out"]).arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(2));
    assert!(!Path::new(&out).exists());
}

#[test]
fn missing_inputs_are_usage_errors() {
    let status = bin().status().unwrap();
    assert_eq!(status.code(), Some(2));
    let status = bin().args(["--preset", "fig1", "--config", "/nonexistent.toml"]).status().unwrap();
    assert_eq!(status.code(), Some(2));
}
