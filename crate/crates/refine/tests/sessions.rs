use std::path::PathBuf;

use qjudge_core::bank::{Bank, ProblemSpec};
use qjudge_core::Verdict;
use qjudge_refine::generator::{GeneratorError, Scripted};
use qjudge_refine::log::{load_sessions, read_session, write_session, SessionLog};
use qjudge_refine::session::refinement_prompt;
use qjudge_refine::{run_session, run_session_with, success_curve, Outcome, SessionEvent};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn problem(id: &str) -> ProblemSpec {
    Bank::load(root().join("problems"))
        .unwrap()
        .problem(id)
        .unwrap()
        .clone()
}

fn case_study() -> Scripted {
    Scripted::from_path(&root().join("replays/case-study")).unwrap()
}

#[test]
fn case_study_replay() {
    let p = problem("QPC001-A4");
    let session = run_session(&p, &mut case_study(), 3);
    assert_eq!(session.verdicts(), [Verdict::UGE, Verdict::WA, Verdict::AC]);
    assert_eq!(session.outcome, Outcome::Solved);
    assert_eq!(success_curve(&[session], 3), [0.0, 0.0, 100.0]);
}

#[test]
fn feedback_embeds_previous_source_verbatim() {
    let p = problem("QPC001-A4");
    let session = run_session(&p, &mut case_study(), 3);
    let baseline = p.render_prompt();
    assert_eq!(session.attempts[0].prompt, baseline);
    for pair in session.attempts.windows(2) {
        let (prev, next) = (&pair[0], &pair[1]);
        assert!(next.prompt.starts_with(&baseline));
        assert!(next.prompt.contains(&format!(
            "Your answer was\n```qasm\n{}",
            prev.source.trim_end()
        )));
        assert_eq!(next.prompt, refinement_prompt(&baseline, prev));
    }
    assert!(session.attempts[1]
        .prompt
        .ends_with("An unauthorized quantum gate has been used. Try again."));
    assert!(session.attempts[2]
        .prompt
        .ends_with("This is wrong. Try again."));
    // Only the latest feedback is carried forward.
    assert!(!session.attempts[2]
        .prompt
        .contains("unauthorized quantum gate"));
}

#[test]
fn reference_generator_solves_in_one_round() {
    let bank = Bank::load(root().join("problems")).unwrap();
    for entry in bank.entries() {
        let mut g = Scripted::constant(entry.reference_source().unwrap());
        let session = run_session(&entry.spec, &mut g, 3);
        assert_eq!(session.verdicts(), [Verdict::AC], "{}", entry.spec.id);
    }
}

#[test]
fn unparseable_output_exhausts_the_budget() {
    let session = run_session(
        &problem("BELL-PHI-PLUS"),
        &mut Scripted::constant("not a program"),
        3,
    );
    assert_eq!(session.verdicts(), [Verdict::RE; 3]);
    assert_eq!(session.outcome, Outcome::Exhausted);
    assert!(session.attempts[1]
        .prompt
        .contains("The occurring error is: line 1"));
}

#[test]
fn generator_is_not_called_after_acceptance() {
    let p = problem("PREP-I1");
    let mut calls = 0;
    let mut g = |_: &str| -> Result<String, GeneratorError> {
        calls += 1;
        Ok("OPENQASM 2.0;\nqreg q[1];\ny q[0];\n".to_string())
    };
    let session = run_session(&p, &mut g, 15);
    assert_eq!(session.attempts.len(), 1);
    assert_eq!(calls, 1);
}

#[test]
fn generator_failure_keeps_earlier_attempts() {
    let p = problem("QPC001-A4");
    let mut g = Scripted::new(vec!["garbage".into()]);
    let session = run_session(&p, &mut g, 3);
    assert_eq!(session.outcome, Outcome::GeneratorFailed);
    assert_eq!(session.verdicts(), [Verdict::RE]);
    assert!(session.generator_error.unwrap().contains("no source left"));
}

#[test]
fn attempts_never_exceed_the_budget() {
    let p = problem("GHZ-3");
    for rounds in [1, 2, 5, 15] {
        let session = run_session(
            &p,
            &mut Scripted::constant("OPENQASM 2.0; qreg q[3]; h q[0];"),
            rounds,
        );
        assert_eq!(session.attempts.len(), rounds);
        assert_eq!(session.attempts.last().unwrap().round, rounds);
    }
}

#[test]
fn observer_sees_events_in_order() {
    let p = problem("QPC001-A4");
    let mut events = Vec::new();
    let session = run_session_with(
        &p,
        &mut case_study(),
        3,
        |s| qjudge_core::evaluate(&qjudge_core::qasm::SourceProgram::native(s), &p),
        |e| events.push(e.clone()),
    );
    assert_eq!(events.len(), 2 + session.attempts.len());
    assert!(matches!(
        events[0],
        SessionEvent::Started { max_rounds: 3, .. }
    ));
    assert!(matches!(
        events.last(),
        Some(SessionEvent::Finished {
            outcome: Outcome::Solved,
            ..
        })
    ));
}

#[test]
fn logs_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let p = problem("QPC001-A4");
    let session = run_session(&p, &mut case_study(), 3);
    let path = write_session(dir.path(), &session).unwrap();
    let mut back = read_session(&path).unwrap();
    assert_eq!(back.verdicts(), session.verdicts());
    for a in back.attempts.iter_mut() {
        a.report.sim_wall_time = Default::default();
    }
    let mut expected = session.clone();
    for a in expected.attempts.iter_mut() {
        a.report.sim_wall_time = Default::default();
    }
    assert_eq!(back, expected);

    let second = write_session(dir.path(), &session).unwrap();
    assert_ne!(path, second);
    assert_eq!(load_sessions(dir.path()).unwrap().len(), 2);
}

#[test]
fn streaming_log_matches_the_session() {
    let dir = tempfile::tempdir().unwrap();
    let p = problem("QPC001-A4");
    let mut log = SessionLog::create_in(dir.path(), &p.id).unwrap();
    let session = run_session_with(
        &p,
        &mut case_study(),
        3,
        |s| qjudge_core::evaluate(&qjudge_core::qasm::SourceProgram::native(s), &p),
        |e| log.append(e).unwrap(),
    );
    let text = std::fs::read_to_string(log.path()).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(text.lines().all(|l| l.contains("\"timestamp_ms\"")));
    assert_eq!(
        read_session(log.path()).unwrap().verdicts(),
        session.verdicts()
    );
}
