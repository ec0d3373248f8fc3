use std::path::PathBuf;
use std::process::Command;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn qjudge(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_qjudge"))
        .args(args)
        .current_dir(root())
        .env_remove("QJUDGE_BANK")
        .output()
        .unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn evaluate_reference_prints_golden_report() {
    let (code, stdout, _) = qjudge(&["evaluate", "QPC001-A4", "problems/QPC001-A4/reference.qasm"]);
    assert_eq!(code, 0);
    assert_eq!(
        stdout,
        "{ \"runtime_error\": false, \"gate_violation\": false, \"depth_violation\": false, \"state_match\": true }\n"
    );
}

#[test]
fn evaluate_failure_exits_one() {
    let (code, stdout, stderr) = qjudge(&[
        "evaluate",
        "BELL-PHI-PLUS",
        "problems/BELL-PHI-PLUS/fixtures/dle_redundant_cx.qasm",
    ]);
    assert_eq!(code, 1);
    assert!(stdout.contains("\"depth_violation\": true"));
    assert!(stderr.contains("verdict: DLE"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(qjudge(&[]).0, 2);
    assert_eq!(qjudge(&["evaluate", "QPC001-A4"]).0, 2);
    assert_eq!(
        qjudge(&["evaluate", "NO-SUCH", "problems/QPC001-A4/reference.qasm"]).0,
        2
    );
    let (code, _, stderr) = qjudge(&[
        "refine",
        "QPC001-A4",
        "--generator",
        "scripted:x",
        "--max-rounds",
        "16",
    ]);
    assert_eq!(code, 2);
    assert!(stderr.contains("Usage"));
    assert_eq!(
        qjudge(&["refine", "QPC001-A4", "--generator", "telepathy"]).0,
        2
    );
}

#[test]
fn refine_then_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let log_dir = dir.path().to_str().unwrap();
    let (code, stdout, stderr) = qjudge(&[
        "refine",
        "QPC001-A4",
        "--generator",
        "scripted:replays/case-study",
        "--max-rounds",
        "3",
        "--log-dir",
        log_dir,
    ]);
    assert_eq!(code, 0, "{stderr}");
    assert!(
        stdout.contains("round 1: UGE\nround 2: WA\nround 3: AC\n"),
        "{stdout}"
    );
    let logs: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(logs.len(), 1);

    let (code, stdout, _) = qjudge(&["metrics", log_dir]);
    assert_eq!(code, 0);
    assert!(
        stdout.contains("success_by_iteration: [0.00%, 0.00%, 100.00%]"),
        "{stdout}"
    );
    let (_, json, _) = qjudge(&["metrics", log_dir, "--json", "--round", "2"]);
    let table: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(table["wrong_output"], 100.0);
}

#[test]
fn command_generator_from_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let log_dir = dir.path().to_str().unwrap();
    let script = dir.path().join("gen.sh");
    std::fs::write(
        &script,
        "cat > /dev/null\nprintf 'OPENQASM 2.0;\\nqreg q[1];\\ny q[0];\\n'\n",
    )
    .unwrap();
    let generator = format!("command:sh {}", script.display());
    let (code, stdout, stderr) = qjudge(&[
        "refine",
        "PREP-I1",
        "--generator",
        &generator,
        "--log-dir",
        log_dir,
    ]);
    assert_eq!(code, 0, "{stderr}");
    assert!(stdout.contains("round 1: AC"));
}
