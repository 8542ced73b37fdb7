use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use squeezed_vdp::scenario::{sha256_hex, RunManifest, MANIFEST_FILE, OUTPUT_DIR_ENV};

const SWEEP: &str = r#"
name = "small-sweep"
kind = "entrainment-sweep"

[system]
gamma1 = [1.0, 1.0]
gamma2 = [3.0, 3.0]
delta = [0.3, 0.3]
coupling = 1.0
coupling_kind = "reactive"
truncation = [5, 5]

[sweep]
parameter = "eta"
values = [0.0, 0.5, 1.0]

[spectrum]
mode = 1
omega_points = 201
"#;

const DEGENERATE: &str = r#"
name = "degenerate"
kind = "wigner"

[system]
gamma1 = [0.0, 0.0]
gamma2 = [1.0, 0.0]
loss = [1.0, 0.0]
coupling_kind = "none"
truncation = [6]

[sweep]
parameter = "loss"
values = [1.0, 0.0]

[wigner]
points = 21
"#;

fn qvdp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qvdp")).args(args).env_remove(OUTPUT_DIR_ENV).output().unwrap()
}

fn write_scenario(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn manifest(dir: &Path) -> RunManifest {
    RunManifest::read(&dir.join(MANIFEST_FILE)).unwrap()
}

#[test]
fn lists_and_validates_bundled_scenarios() {
    let out = qvdp(&["list-scenarios"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 26);
    assert!(text.lines().all(|l| !l.contains("invalid")));
    let out = qvdp(&["validate", "fig2b"]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("ok: fig2b"));
}

#[test]
fn invalid_configuration_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_scenario(dir.path(), "bad.toml", &SWEEP.replace("mode = 1", "mode = 1\nwindow = 3"));
    let out = qvdp(&["validate", &bad]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("spectrum.window"));
    let good = write_scenario(dir.path(), "good.toml", SWEEP);
    assert_eq!(qvdp(&["run", &good, "--mode", "3"]).status.code(), Some(1));
    assert_eq!(qvdp(&["run", &good, "--workers", "0", "--out", dir.path().to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(qvdp(&["run", "no-such-scenario"]).status.code(), Some(1));
}

#[test]
fn failed_points_exit_with_two_and_keep_the_rest() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_scenario(dir.path(), "degenerate.toml", DEGENERATE);
    let out_dir = dir.path().join("out");
    let out = qvdp(&["run", &file, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let m = manifest(&out_dir);
    assert_eq!(m.points_failed, 1);
    assert!(m.points[0].ok && !m.points[1].ok);
    assert!(out_dir.join("wigner_mode1_loss_1.dat").exists());
}

fn data_checksums(dir: &Path) -> Vec<(String, String)> {
    let m = manifest(dir);
    for o in &m.outputs {
        assert_eq!(sha256_hex(&fs::read(dir.join(&o.path)).unwrap()), o.sha256, "{}", o.path);
    }
    m.outputs.into_iter().map(|o| (o.path, o.sha256)).collect()
}

#[test]
fn parallel_and_repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_scenario(dir.path(), "sweep.toml", SWEEP);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(qvdp(&["run", &file, "--out", a.to_str().unwrap(), "--plot"]).status.success());
    let first = data_checksums(&a);
    assert!(first.iter().any(|(p, _)| p.ends_with(".svg")));
    assert!(qvdp(&["run", &file, "--out", b.to_str().unwrap(), "--plot", "--workers", "3"]).status.success());
    assert_eq!(first, data_checksums(&b));
    assert!(qvdp(&["run", &file, "--out", a.to_str().unwrap(), "--plot"]).status.success());
    assert_eq!(first, data_checksums(&a));
}

#[test]
fn rerun_without_plots_removes_stale_previews() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_scenario(dir.path(), "sweep.toml", SWEEP);
    let out = dir.path().join("out");
    assert!(qvdp(&["run", &file, "--out", out.to_str().unwrap(), "--plot"]).status.success());
    assert!(qvdp(&["run", &file, "--out", out.to_str().unwrap()]).status.success());
    let svgs = fs::read_dir(&out).unwrap().filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "svg"));
    assert_eq!(svgs.count(), 0);
}

#[test]
fn environment_sets_the_default_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_scenario(dir.path(), "degenerate.toml", &DEGENERATE.replace("values = [1.0, 0.0]", "values = [1.0]"));
    let target = dir.path().join("from-env");
    let out = Command::new(env!("CARGO_BIN_EXE_qvdp"))
        .args(["run", &file])
        .env(OUTPUT_DIR_ENV, &target)
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(target.join(MANIFEST_FILE).exists());
}

#[test]
fn overrides_are_recorded_in_the_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_scenario(dir.path(), "sweep.toml", SWEEP);
    let out = dir.path().join("out");
    let status = qvdp(&["run", &file, "--out", out.to_str().unwrap(), "--truncation", "4", "--mode", "2"]).status;
    assert!(status.success());
    let m = manifest(&out);
    assert_eq!(m.scenario.system.truncation.dims(), &[4, 4]);
    assert!(m.outputs.iter().any(|o| o.path.starts_with("spectrum_mode2")));
}
