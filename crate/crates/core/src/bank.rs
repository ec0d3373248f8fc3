//! Problem definitions and the on-disk problem bank.
//!
//! A bank is a directory with one subdirectory per problem:
//!
//! ```text
//! problems/<id>/spec.toml        problem definition
//! problems/<id>/reference.qasm   accepted solution
//! problems/<id>/fixtures/*.qasm  extra submissions, named <verdict>_<what>.qasm
//! ```
//!
//! `docs/problem-format.md` documents the `spec.toml` schema.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::judge::{Criterion, JudgeSpec, PhaseMode, DEFAULT_TOLERANCE};
use crate::sim::{basis_index, basis_label, StateVector, MAX_QUBITS};
use crate::transpile::{AllowedGates, GateSetPolicy, PolicyMode};

pub const SPEC_FILE: &str = "spec.toml";
pub const REFERENCE_FILE: &str = "reference.qasm";
pub const FIXTURE_DIR: &str = "fixtures";

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub id: String,
    pub statement: String,
    pub n_qubits: usize,
    pub gate_policy: GateSetPolicy,
    pub depth_limit: Option<usize>,
    pub judge: JudgeSpec,
    pub code_template: String,
}

#[derive(Debug, thiserror::Error)]
pub enum BankError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}: field `{field}`: {message}")]
    Schema {
        file: PathBuf,
        field: String,
        message: String,
    },
    #[error("duplicate problem id `{id}` in {first} and {second}")]
    DuplicateId {
        id: String,
        first: PathBuf,
        second: PathBuf,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemFile {
    id: String,
    n_qubits: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    depth_limit: Option<usize>,
    statement: String,
    code_template: String,
    gate_policy: GateSetPolicy,
    judge: JudgeFile,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum JudgeFile {
    ExactState {
        phase_mode: PhaseMode,
        reference: Vec<AmplitudeEntry>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tolerance: Option<f64>,
    },
    SupportPredicate {
        required_nonzero: Vec<String>,
        required_zero: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tolerance: Option<f64>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AmplitudeEntry {
    basis: String,
    re: f64,
    #[serde(default)]
    im: f64,
}

fn schema(file: &Path, field: impl Into<String>, message: impl Into<String>) -> BankError {
    BankError::Schema {
        file: file.to_path_buf(),
        field: field.into(),
        message: message.into(),
    }
}

/// Pulls the key name out of serde's "missing field `x`" style messages.
fn field_from_toml_error(message: &str) -> String {
    for marker in ["missing field `", "unknown field `", "unknown variant `"] {
        if let Some(start) = message.find(marker) {
            let rest = &message[start + marker.len()..];
            if let Some(end) = rest.find('`') {
                return rest[..end].to_string();
            }
        }
    }
    "<document>".to_string()
}

fn labels_to_indices(
    file: &Path,
    field: &str,
    labels: &[String],
    n: usize,
) -> Result<Vec<usize>, BankError> {
    labels
        .iter()
        .enumerate()
        .map(|(i, label)| {
            basis_index(label, n).ok_or_else(|| {
                schema(
                    file,
                    format!("{field}[{i}]"),
                    format!("`{label}` is not a {n}-qubit basis label"),
                )
            })
        })
        .collect()
}

impl ProblemSpec {
    /// Parses and validates a `spec.toml` document. `file` is only used
    /// for error messages.
    pub fn from_toml(text: &str, file: &Path) -> Result<Self, BankError> {
        let raw: ProblemFile = toml::from_str(text).map_err(|e| {
            let message = e.message().to_string();
            schema(file, field_from_toml_error(&message), message)
        })?;
        Self::from_file(raw, file)
    }

    fn from_file(raw: ProblemFile, file: &Path) -> Result<Self, BankError> {
        if raw.id.is_empty()
            || !raw
                .id
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
        {
            return Err(schema(
                file,
                "id",
                "must be non-empty and use only letters, digits, `-` and `_`",
            ));
        }
        let n = raw.n_qubits;
        if n == 0 || n > MAX_QUBITS {
            return Err(schema(
                file,
                "n_qubits",
                format!("must be between 1 and {MAX_QUBITS}"),
            ));
        }
        if raw.depth_limit == Some(0) {
            return Err(schema(file, "depth_limit", "must be positive"));
        }
        if raw.statement.trim().is_empty() {
            return Err(schema(file, "statement", "must not be empty"));
        }
        let (mut judge, tolerance) = match raw.judge {
            JudgeFile::ExactState {
                phase_mode,
                reference,
                tolerance,
            } => {
                let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
                let mut seen = vec![false; 1 << n];
                for (i, entry) in reference.iter().enumerate() {
                    let field = format!("judge.reference[{i}]");
                    let index = basis_index(&entry.basis, n).ok_or_else(|| {
                        schema(
                            file,
                            format!("{field}.basis"),
                            format!("`{}` is not a {n}-qubit basis label", entry.basis),
                        )
                    })?;
                    if seen[index] {
                        return Err(schema(
                            file,
                            format!("{field}.basis"),
                            format!("`{}` listed twice", entry.basis),
                        ));
                    }
                    if !entry.re.is_finite() || !entry.im.is_finite() {
                        return Err(schema(file, field, "amplitude must be finite"));
                    }
                    seen[index] = true;
                    amps[index] = Complex64::new(entry.re, entry.im);
                }
                let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
                if norm == 0.0 {
                    return Err(schema(
                        file,
                        "judge.reference",
                        "reference state has zero norm",
                    ));
                }
                // Already-normalized input is kept bit-for-bit so that
                // serialize/load is an exact round trip.
                if (norm - 1.0).abs() > 1e-12 {
                    amps.iter_mut().for_each(|a| *a /= norm);
                }
                let state = StateVector::from_amplitudes(n, amps)
                    .map_err(|e| schema(file, "judge.reference", e.to_string()))?;
                let spec = JudgeSpec::exact(state, phase_mode)
                    .map_err(|e| schema(file, "judge.reference", e.to_string()))?;
                (spec, tolerance)
            }
            JudgeFile::SupportPredicate {
                required_nonzero,
                required_zero,
                tolerance,
            } => {
                let nonzero =
                    labels_to_indices(file, "judge.required_nonzero", &required_nonzero, n)?;
                let zero = labels_to_indices(file, "judge.required_zero", &required_zero, n)?;
                let spec = JudgeSpec::support(n, nonzero, zero)
                    .map_err(|e| schema(file, "judge.required_zero", e.to_string()))?;
                (spec, tolerance)
            }
        };
        if let Some(t) = tolerance {
            judge = judge
                .with_tolerance(t)
                .map_err(|e| schema(file, "judge.tolerance", e.to_string()))?;
        }
        Ok(ProblemSpec {
            id: raw.id,
            statement: raw.statement,
            n_qubits: n,
            gate_policy: raw.gate_policy,
            depth_limit: raw.depth_limit,
            judge,
            code_template: raw.code_template,
        })
    }

    /// Serializes back to the `spec.toml` schema.
    pub fn to_toml(&self) -> String {
        let n = self.n_qubits;
        let tolerance = (self.judge.tolerance != DEFAULT_TOLERANCE).then_some(self.judge.tolerance);
        let judge = match &self.judge.criterion {
            Criterion::ExactState {
                reference,
                phase_mode,
            } => JudgeFile::ExactState {
                phase_mode: *phase_mode,
                reference: reference
                    .amplitudes()
                    .iter()
                    .enumerate()
                    .filter(|(_, a)| a.re != 0.0 || a.im != 0.0)
                    .map(|(i, a)| AmplitudeEntry {
                        basis: basis_label(i, n),
                        re: a.re,
                        im: a.im,
                    })
                    .collect(),
                tolerance,
            },
            Criterion::SupportPredicate {
                required_nonzero,
                required_zero,
                ..
            } => JudgeFile::SupportPredicate {
                required_nonzero: required_nonzero
                    .iter()
                    .map(|&i| basis_label(i, n))
                    .collect(),
                required_zero: required_zero.iter().map(|&i| basis_label(i, n)).collect(),
                tolerance,
            },
        };
        let file = ProblemFile {
            id: self.id.clone(),
            n_qubits: n,
            depth_limit: self.depth_limit,
            statement: self.statement.clone(),
            code_template: self.code_template.clone(),
            gate_policy: self.gate_policy.clone(),
            judge,
        };
        toml::to_string(&file).expect("problem spec always serializes")
    }

    /// One line per active constraint, in prompt order.
    pub fn constraint_lines(&self) -> Vec<String> {
        let mut lines = Vec::new();
        if let AllowedGates::Only(_) = &self.gate_policy.allowed {
            lines.push(format!(
                "Only the following quantum gates may be used: {}.",
                self.gate_policy.allowed
            ));
            if self.gate_policy.mode == PolicyMode::Lenient {
                lines.push(
                    "Other gates are accepted only if they decompose into the allowed gates."
                        .into(),
                );
            }
        }
        if let Some(limit) = self.depth_limit {
            lines.push(format!("The circuit depth must not exceed {limit}."));
        }
        lines.push(
            match self.judge.phase_mode() {
                Some(PhaseMode::Sensitive) => {
                    "States with different global phases will be considered incorrect."
                }
                Some(PhaseMode::Ignored) | None => "Global phase is ignored in judge.",
            }
            .to_string(),
        );
        lines
    }

    /// Baseline generation prompt: statement, constraints and code template.
    pub fn render_prompt(&self) -> String {
        let mut out = String::new();
        writeln!(out, "Problem").unwrap();
        writeln!(out, "{}", self.statement.trim_end()).unwrap();
        writeln!(out).unwrap();
        writeln!(out, "Constraints").unwrap();
        for line in self.constraint_lines() {
            writeln!(out, "{line}").unwrap();
        }
        writeln!(out, "Use the following code format:").unwrap();
        writeln!(out).unwrap();
        writeln!(out, "{}", self.code_template.trim_end()).unwrap();
        writeln!(out).unwrap();
        write!(
            out,
            "Generate only the function body, with no additional imports or code outside the template."
        )
        .unwrap();
        out
    }
}

/// Free-function form of [`ProblemSpec::render_prompt`].
pub fn render_prompt(problem: &ProblemSpec) -> String {
    problem.render_prompt()
}

/// A loaded problem together with the directory holding its assets.
#[derive(Debug, Clone)]
pub struct BankEntry {
    pub spec: ProblemSpec,
    pub dir: PathBuf,
}

impl BankEntry {
    pub fn reference_path(&self) -> PathBuf {
        self.dir.join(REFERENCE_FILE)
    }

    pub fn reference_source(&self) -> Result<String, BankError> {
        let path = self.reference_path();
        fs::read_to_string(&path).map_err(|source| BankError::Io { path, source })
    }

    /// Fixture submissions sorted by file name.
    pub fn fixtures(&self) -> Result<Vec<PathBuf>, BankError> {
        let dir = self.dir.join(FIXTURE_DIR);
        if !dir.is_dir() {
            return Ok(Vec::new());
        }
        let mut out: Vec<PathBuf> = fs::read_dir(&dir)
            .map_err(|source| BankError::Io {
                path: dir.clone(),
                source,
            })?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "qasm"))
            .collect();
        out.sort();
        Ok(out)
    }
}

/// Immutable set of problems keyed by id.
#[derive(Debug, Clone, Default)]
pub struct Bank {
    entries: BTreeMap<String, BankEntry>,
}

impl Bank {
    /// Loads every `<dir>/*/spec.toml`.
    pub fn load(dir: impl AsRef<Path>) -> Result<Self, BankError> {
        let dir = dir.as_ref();
        let mut subdirs: Vec<PathBuf> = fs::read_dir(dir)
            .map_err(|source| BankError::Io {
                path: dir.to_path_buf(),
                source,
            })?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.join(SPEC_FILE).is_file())
            .collect();
        subdirs.sort();
        let mut entries: BTreeMap<String, BankEntry> = BTreeMap::new();
        for sub in subdirs {
            let file = sub.join(SPEC_FILE);
            let text = fs::read_to_string(&file).map_err(|source| BankError::Io {
                path: file.clone(),
                source,
            })?;
            let spec = ProblemSpec::from_toml(&text, &file)?;
            if let Some(existing) = entries.get(&spec.id) {
                return Err(BankError::DuplicateId {
                    id: spec.id,
                    first: existing.dir.join(SPEC_FILE),
                    second: file,
                });
            }
            entries.insert(spec.id.clone(), BankEntry { spec, dir: sub });
        }
        Ok(Bank { entries })
    }

    pub fn get(&self, id: &str) -> Option<&BankEntry> {
        self.entries.get(id)
    }

    pub fn problem(&self, id: &str) -> Option<&ProblemSpec> {
        self.entries.get(id).map(|e| &e.spec)
    }

    /// Entries ordered by id.
    pub fn entries(&self) -> impl Iterator<Item = &BankEntry> {
        self.entries.values()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Loads a bank directory and returns its problems ordered by id.
pub fn load_bank(dir: impl AsRef<Path>) -> Result<Vec<ProblemSpec>, BankError> {
    Ok(Bank::load(dir)?.entries().map(|e| e.spec.clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::GateKind;

    const PHASE_PROBLEM: &str = r#"
id = "PREP-I1"
n_qubits = 1
statement = "Prepare i|1> from |0>."
code_template = """
from qiskit import QuantumCircuit

def solve() -> QuantumCircuit:
    qc = QuantumCircuit(1)
    # Write your code here:

    return qc
"""

[gate_policy]
allowed = "all"

[judge]
kind = "exact_state"
phase_mode = "sensitive"
reference = [{ basis = "1", re = 0.0, im = 1.0 }]
"#;

    const SUPPORT_PROBLEM: &str = r#"
id = "QPC001-A4"
n_qubits = 2
depth_limit = 5
statement = "Spread |00> over |00>, |10> and |01>."
code_template = "def solve(): ..."

[gate_policy]
allowed = ["h", "cx", "ch"]
mode = "lenient"

[judge]
kind = "support_predicate"
required_nonzero = ["00", "10", "01"]
required_zero = ["11"]
"#;

    fn load(text: &str) -> Result<ProblemSpec, BankError> {
        ProblemSpec::from_toml(text, Path::new("test/spec.toml"))
    }

    #[test]
    fn phase_problem() {
        let p = load(PHASE_PROBLEM).unwrap();
        assert_eq!(p.n_qubits, 1);
        match &p.judge.criterion {
            Criterion::ExactState {
                reference,
                phase_mode,
            } => {
                assert_eq!(*phase_mode, PhaseMode::Sensitive);
                assert_eq!(
                    reference.amplitudes(),
                    &[Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0)]
                );
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn support_problem() {
        let p = load(SUPPORT_PROBLEM).unwrap();
        assert_eq!(p.depth_limit, Some(5));
        assert_eq!(
            p.gate_policy,
            GateSetPolicy::lenient([GateKind::H, GateKind::Cx, GateKind::Ch])
        );
        match &p.judge.criterion {
            Criterion::SupportPredicate {
                required_zero,
                required_nonzero,
                ..
            } => {
                assert_eq!(required_zero.iter().copied().collect::<Vec<_>>(), vec![3]);
                assert_eq!(required_nonzero.len(), 3);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(p.judge.phase_mode(), None);
    }

    #[test]
    fn zero_depth_limit_rejected() {
        let text = SUPPORT_PROBLEM.replace("depth_limit = 5", "depth_limit = 0");
        match load(&text).unwrap_err() {
            BankError::Schema { field, .. } => assert_eq!(field, "depth_limit"),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn schema_errors_name_the_field() {
        let cases = [
            (SUPPORT_PROBLEM.replace("n_qubits = 2\n", ""), "n_qubits"),
            (
                SUPPORT_PROBLEM.replace("\"11\"", "\"111\""),
                "judge.required_zero[0]",
            ),
            (
                SUPPORT_PROBLEM.replace("required_zero = [\"11\"]", "required_zero = [\"00\"]"),
                "judge.required_zero",
            ),
            (
                SUPPORT_PROBLEM.replace("n_qubits = 2", "n_qubits = 2\ncolour = 1"),
                "colour",
            ),
            (
                PHASE_PROBLEM.replace("im = 1.0", "im = 0.0"),
                "judge.reference",
            ),
            (
                PHASE_PROBLEM.replace("basis = \"1\"", "basis = \"x\""),
                "judge.reference[0].basis",
            ),
            (PHASE_PROBLEM.replace("PREP-I1", "bad id"), "id"),
            (
                PHASE_PROBLEM.replace("n_qubits = 1", "n_qubits = 0"),
                "n_qubits",
            ),
        ];
        for (text, expected) in cases {
            match load(&text) {
                Err(BankError::Schema { field, file, .. }) => {
                    assert_eq!(field, expected);
                    assert_eq!(file, Path::new("test/spec.toml"));
                }
                other => panic!("expected schema error for {expected}, got {other:?}"),
            }
        }
    }

    #[test]
    fn unnormalized_reference_is_normalized() {
        let text = PHASE_PROBLEM.replace(
            "reference = [{ basis = \"1\", re = 0.0, im = 1.0 }]",
            "reference = [{ basis = \"0\", re = 1.0 }, { basis = \"1\", re = 1.0 }]",
        );
        let p = load(&text).unwrap();
        if let Criterion::ExactState { reference, .. } = &p.judge.criterion {
            assert!((reference.norm() - 1.0).abs() < 1e-15);
            assert!((reference.amplitude(0).re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        }
    }

    #[test]
    fn serialize_round_trip() {
        for text in [PHASE_PROBLEM, SUPPORT_PROBLEM] {
            let p = load(text).unwrap();
            assert_eq!(load(&p.to_toml()).unwrap(), p);
        }
        let custom =
            load(&PHASE_PROBLEM.replace("im = 1.0 }]", "im = 1.0 }]\ntolerance = 1e-4")).unwrap();
        assert_eq!(custom.judge.tolerance, 1e-4);
        assert_eq!(load(&custom.to_toml()).unwrap(), custom);
    }

    #[test]
    fn prompt_contents() {
        let p = load(PHASE_PROBLEM).unwrap();
        let prompt = p.render_prompt();
        assert!(
            prompt.contains("States with different global phases will be considered incorrect.")
        );
        assert!(prompt.contains("def solve() -> QuantumCircuit:"));
        assert!(prompt.contains("Generate only the function body"));
        assert!(!prompt.contains("Only the following quantum gates"));
        assert!(!prompt.contains("depth"));

        let p = load(SUPPORT_PROBLEM).unwrap();
        let prompt = render_prompt(&p);
        assert!(prompt.contains("The circuit depth must not exceed 5."));
        assert!(prompt.contains("Only the following quantum gates may be used: h, cx, ch."));
        assert!(prompt.contains("Global phase is ignored in judge."));
    }

    #[test]
    fn duplicate_ids_rejected() {
        let dir = tempfile::tempdir().unwrap();
        for sub in ["a", "b"] {
            fs::create_dir(dir.path().join(sub)).unwrap();
            fs::write(dir.path().join(sub).join(SPEC_FILE), PHASE_PROBLEM).unwrap();
        }
        assert!(matches!(
            Bank::load(dir.path()),
            Err(BankError::DuplicateId { .. })
        ));
    }

    #[test]
    fn load_directory() {
        let dir = tempfile::tempdir().unwrap();
        for (sub, text) in [("b", PHASE_PROBLEM), ("a", SUPPORT_PROBLEM)] {
            fs::create_dir(dir.path().join(sub)).unwrap();
            fs::write(dir.path().join(sub).join(SPEC_FILE), text).unwrap();
        }
        fs::create_dir(dir.path().join("not-a-problem")).unwrap();
        let specs = load_bank(dir.path()).unwrap();
        let ids: Vec<&str> = specs.iter().map(|s| s.id.as_str()).collect();
        assert_eq!(ids, vec!["PREP-I1", "QPC001-A4"]);
        let bank = Bank::load(dir.path()).unwrap();
        assert!(bank.get("PREP-I1").unwrap().fixtures().unwrap().is_empty());
    }
}
