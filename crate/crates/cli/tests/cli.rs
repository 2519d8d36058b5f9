use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_bergkern");

fn example(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../specs").join(name)
}

fn bergkern(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args);
    if let Some(n) = threads {
        cmd.env("RAYON_NUM_THREADS", n);
    }
    cmd.output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write_spec(dir: &tempfile::TempDir, text: &str) -> PathBuf {
    let path = dir.path().join("domain.spec");
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn disk_classification_passes() {
    let dir = tempfile::tempdir().unwrap();
    let tsv = dir.path().join("out.tsv");
    let spec = example("unit_disk.spec");
    let out = bergkern(
        &["classify", "--spec", spec.to_str().unwrap(), "--out", tsv.to_str().unwrap()],
        None,
    );
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let rows = std::fs::read_to_string(&tsv).unwrap();
    let mut lines = rows.lines();
    assert_eq!(lines.next().unwrap(), "check\tinputs\tvalue\treference\tprovenance\ttol\tstatus");
    let verdict = lines.find(|l| l.starts_with("classify_verdict")).unwrap();
    assert!(verdict.contains("DiskMinusPolar"));
    assert!(verdict.ends_with("\tpass"));
    assert!(stdout(&out).ends_with("2 checks, 0 failed\n"));
}

#[test]
fn annulus_is_not_minimal() {
    let spec = example("annulus.spec");
    let out = bergkern(&["classify", "--spec", spec.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("PASS classify_verdict"));
    assert!(stdout(&out).contains("NotMinimal"));
}

#[test]
fn reinhardt_runs_without_a_spec() {
    let out = bergkern(&["reinhardt"], None);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    for check in [
        "reinhardt_volume",
        "reinhardt_min_hessian_eigenvalue",
        "obstruction_root_circle",
        "obstruction_root_axis",
        "circle_certificate_flat",
        "reinhardt_verdict",
    ] {
        assert!(text.contains(&format!("PASS {check} ")), "missing {check}:\n{text}");
    }
}

#[test]
fn zero_tolerance_fails_with_exit_one() {
    let spec = example("unit_disk.spec");
    let out = bergkern(&["area", "--spec", spec.to_str().unwrap(), "--tol-scale", "0"], None);
    assert_eq!(out.status.code(), Some(1), "{}", stdout(&out));
    assert!(stdout(&out).contains("FAIL area"));
}

#[test]
fn malformed_spec_reports_line_and_field() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(&dir, "# disk\nkind = disk\nradius = -1\n");
    let out = bergkern(&["area", "--spec", spec.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3, field `radius`"), "{err}");

    let spec = write_spec(&dir, "kind = disk\nradius = 1\nwobble = 3\n");
    let out = bergkern(&["area", "--spec", spec.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3, field `wobble`"));
}

#[test]
fn points_outside_the_domain_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(&dir, "kind = annulus\ncenter = 0\ninner = 0.5\nouter = 1\npoints = 0.1, 0.7\n");
    let out = bergkern(&["bergman", "--spec", spec.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unsupported_command_for_kind_is_invalid_input() {
    let spec = example("plane.spec");
    let out = bergkern(&["bergman", "--spec", spec.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(2));
    let out = bergkern(&["classify", "--spec", spec.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("InfiniteVolumeCase"));
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let spec = example("punctured_disk.spec");
    let mut reports = Vec::new();
    for threads in ["1", "4"] {
        let tsv = dir.path().join(format!("run{threads}.tsv"));
        let out = bergkern(
            &["all", "--spec", spec.to_str().unwrap(), "--out", tsv.to_str().unwrap()],
            Some(threads),
        );
        assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
        reports.push(std::fs::read(&tsv).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
}
