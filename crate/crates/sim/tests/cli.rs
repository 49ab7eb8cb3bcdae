use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_iontrap-sim"))
}

fn default_config() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/default.conf")
}

fn run_scenario(config: &Path, scenario: &str, out: &Path, seed: Option<u64>) -> Output {
    let mut cmd = bin();
    cmd.args(["run", "--scenario", scenario, "--config"]).arg(config).arg("--out").arg(out);
    if let Some(s) = seed {
        cmd.args(["--seed", &s.to_string()]);
    }
    cmd.output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn list_names_every_scenario() {
    let out = bin().arg("list-scenarios").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 9);
    assert!(text.contains("eit-spectrum"));
}

#[test]
fn missing_required_key_exits_2_and_names_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.conf", "[chain]\nn_ions = 3\n");
    let out = run_scenario(&cfg, "chain-geometry", &dir.path().join("o"), None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("trap.axial_freq_hz"));
}

#[test]
fn unknown_key_and_scenario_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.conf", "[trap]\naxial_freq_hz = 1e6\naxial_frq = 3\n[chain]\nn_ions = 2\n");
    let out = run_scenario(&cfg, "chain-geometry", &dir.path().join("o"), None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
    let out = run_scenario(&default_config(), "no-such", &dir.path().join("o"), None);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn domain_error_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.conf", "[trap]\naxial_freq_hz = -1e6\n[chain]\nn_ions = 2\n");
    let out = run_scenario(&cfg, "chain-geometry", &dir.path().join("o"), None);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn unreadable_config_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_scenario(&dir.path().join("absent.conf"), "timescales", &dir.path().join("o"), None);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn seeded_runs_repeat_and_compare() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    for (out, seed) in [(&a, 3), (&b, 3), (&c, 4)] {
        let o = run_scenario(&default_config(), "detection-histogram", out, Some(seed));
        assert!(o.status.success());
    }
    for name in ["histogram.csv", "errors.csv"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap());
    }
    let manifest = fs::read_to_string(a.join("manifest.txt")).unwrap();
    assert!(manifest.contains("run.seed = 3e0    # command line"));
    assert!(manifest.contains("detection.window_s = 2e-3    # config"));
    assert!(manifest.contains("detection.shots = 1e5    # default"));

    let same = bin().arg("compare").arg(&a).arg(&b).args(["--tol", "0"]).output().unwrap();
    assert_eq!(same.status.code(), Some(0));
    let differ = bin().arg("compare").arg(&a).arg(&c).args(["--tol", "1e-12"]).output().unwrap();
    assert_eq!(differ.status.code(), Some(1));
    // the exact columns do not depend on the seed
    let exact = bin()
        .arg("compare")
        .arg(&a)
        .arg(&c)
        .args(["--tol", "0", "--column", "p_bright_exact", "--column", "p_dark_exact"])
        .output()
        .unwrap();
    assert_eq!(exact.status.code(), Some(0), "{}", String::from_utf8_lossy(&exact.stdout));
}

#[test]
fn compare_rejects_different_scenarios() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(run_scenario(&default_config(), "timescales", &a, None).status.success());
    assert!(run_scenario(&default_config(), "eit-cooling", &b, None).status.success());
    let out = bin().arg("compare").arg(&a).arg(&b).args(["--tol", "1e-6"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn eit_mean_is_stable_under_probe_scaling() {
    let dir = tempfile::tempdir().unwrap();
    let base = fs::read_to_string(default_config()).unwrap();
    let scaled = base.replace("probe_ratio = 1e-3", "probe_ratio = 5e-4");
    assert_ne!(base, scaled);
    let cfg = write(dir.path(), "half.conf", &scaled);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(run_scenario(&default_config(), "eit-cooling", &a, None).status.success());
    assert!(run_scenario(&cfg, "eit-cooling", &b, None).status.success());
    let out = bin()
        .arg("compare")
        .arg(&a)
        .arg(&b)
        .args(["--tol", "1e-2", "--column", "nbar_ss"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}
