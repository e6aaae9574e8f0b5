use std::path::Path;
use std::process::{Command, Output};

use padic_kinetics::ScenarioConfig;

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_padic-kinetics"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("PADIC_KINETICS_OUT")
        .output()
        .unwrap()
}

fn write_config(dir: &Path, cfg: &ScenarioConfig) -> String {
    let path = dir.join("scenario.json");
    std::fs::write(&path, cfg.to_json()).unwrap();
    path.to_str().unwrap().to_string()
}

fn manifest(path: &Path) -> serde_json::Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

#[test]
fn protein_run_writes_bundle_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["protein"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["protein_rates.csv", "protein_p1.csv", "protein_S.csv", "protein.json"] {
        assert!(dir.path().join(f).is_file(), "missing {f}");
    }
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(!stdout.contains("FAIL"));
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(run(&["protein"], a.path()).status.success());
    assert!(run(&["protein"], b.path()).status.success());
    let mut names: Vec<_> = std::fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(!names.is_empty());
    for name in names {
        let x = std::fs::read(a.path().join(&name)).unwrap();
        let y = std::fs::read(b.path().join(&name)).unwrap();
        assert_eq!(x, y, "{name:?}");
    }
}

#[test]
fn invalid_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ScenarioConfig::protein_default();
    cfg.p = 4;
    let path = write_config(dir.path(), &cfg);
    let out = run(&["protein", "--config", &path], &dir.path().join("out"));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("p"));

    std::fs::write(dir.path().join("broken.json"), "{ not json").unwrap();
    let broken = dir.path().join("broken.json");
    let out = run(&["glass", "--config", broken.to_str().unwrap()], &dir.path().join("out"));
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["custom"], &dir.path().join("out"));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn corrupted_oracle_convention_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ScenarioConfig::protein_default();
    cfg.oracle.eigenlevel_convention = padic_kinetics::EigenlevelConvention::Shifted;
    let path = write_config(dir.path(), &cfg);
    let out = run(&["oracle-compare", "--config", &path, "--paths", "0"], &dir.path().join("out"));
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8(out.stdout).unwrap().contains("[FAIL] dense eigenvalues"));
}

#[test]
fn unwritable_output_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, b"").unwrap();
    let out = run(&["protein"], &blocker.join("sub"));
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ScenarioConfig::protein_default();
    cfg.oracle.paths = 2000;
    cfg.oracle.seed = 1;
    let path = write_config(dir.path(), &cfg);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(run(&["mc", "--config", &path, "--seed", "99"], &a).status.code().is_some());
    assert!(run(&["mc", "--config", &path], &b).status.code().is_some());
    let ma = manifest(&a.join("protein_mc.json"));
    let mb = manifest(&b.join("protein_mc.json"));
    assert_eq!(ma["config"]["oracle"]["seed"], 99);
    assert_eq!(mb["config"]["oracle"]["seed"], 1);
    assert_ne!(std::fs::read(a.join("mc.csv")).unwrap(), std::fs::read(b.join("mc.csv")).unwrap());
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_padic-kinetics"))
        .arg("protein")
        .env("PADIC_KINETICS_OUT", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("protein.json").is_file());
}
