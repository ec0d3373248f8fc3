//! Hardware-constraint analysis: allowed-gate checks, decomposition into
//! a basis gate set, and circuit depth.

mod decompose;
mod depth;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, GateKind};

pub use decompose::{decompose, decompose_gate, expand_once, rule_kinds, DecomposeError};
pub use depth::{check_depth, circuit_depth, DependencyDag, DepthReport};

/// Either every gate kind, or an explicit non-empty set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AllowedGates {
    All,
    Only(BTreeSet<GateKind>),
}

impl AllowedGates {
    pub fn only(kinds: impl IntoIterator<Item = GateKind>) -> Self {
        AllowedGates::Only(kinds.into_iter().collect())
    }

    pub fn contains(&self, kind: GateKind) -> bool {
        match self {
            AllowedGates::All => true,
            AllowedGates::Only(set) => set.contains(&kind),
        }
    }
}

impl fmt::Display for AllowedGates {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AllowedGates::All => f.write_str("all"),
            AllowedGates::Only(set) => {
                let names: Vec<&str> = set.iter().map(|k| k.name()).collect();
                f.write_str(&names.join(", "))
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum AllowedRepr {
    Keyword(String),
    List(Vec<GateKind>),
}

impl Serialize for AllowedGates {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            AllowedGates::All => AllowedRepr::Keyword("all".into()),
            AllowedGates::Only(set) => AllowedRepr::List(set.iter().copied().collect()),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for AllowedGates {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        match AllowedRepr::deserialize(deserializer)? {
            AllowedRepr::Keyword(k) if k == "all" => Ok(AllowedGates::All),
            AllowedRepr::Keyword(k) => Err(D::Error::custom(format!(
                "expected \"all\" or a list of gate names, got \"{k}\""
            ))),
            AllowedRepr::List(kinds) if kinds.is_empty() => {
                Err(D::Error::custom("allowed gate list must not be empty"))
            }
            AllowedRepr::List(kinds) => Ok(AllowedGates::only(kinds)),
        }
    }
}

/// Whether the gate set is checked on the raw circuit or after decomposing
/// disallowed gates into the allowed ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyMode {
    #[default]
    Strict,
    Lenient,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateSetPolicy {
    pub allowed: AllowedGates,
    #[serde(default)]
    pub mode: PolicyMode,
}

impl GateSetPolicy {
    pub fn all() -> Self {
        GateSetPolicy {
            allowed: AllowedGates::All,
            mode: PolicyMode::Strict,
        }
    }

    pub fn strict(kinds: impl IntoIterator<Item = GateKind>) -> Self {
        GateSetPolicy {
            allowed: AllowedGates::only(kinds),
            mode: PolicyMode::Strict,
        }
    }

    pub fn lenient(kinds: impl IntoIterator<Item = GateKind>) -> Self {
        GateSetPolicy {
            allowed: AllowedGates::only(kinds),
            mode: PolicyMode::Lenient,
        }
    }

    /// The circuit on which constraints are measured: the raw circuit in
    /// strict mode, the decomposed one in lenient mode when that succeeds.
    pub fn lowered(&self, circuit: &Circuit) -> Circuit {
        match (&self.allowed, self.mode) {
            (AllowedGates::Only(set), PolicyMode::Lenient) => {
                decompose(circuit, set).unwrap_or_else(|_| circuit.clone())
            }
            _ => circuit.clone(),
        }
    }
}

/// Positions of gates not permitted by `policy`. In lenient mode a gate is
/// permitted when it decomposes entirely into allowed kinds.
pub fn check_gates(circuit: &Circuit, policy: &GateSetPolicy) -> Vec<usize> {
    let set = match &policy.allowed {
        AllowedGates::All => return Vec::new(),
        AllowedGates::Only(set) => set,
    };
    circuit
        .gates
        .iter()
        .enumerate()
        .filter(|(_, gate)| match policy.mode {
            PolicyMode::Strict => !set.contains(&gate.kind),
            PolicyMode::Lenient => decompose_gate(gate, set).is_err(),
        })
        .map(|(position, _)| position)
        .collect()
}

/// Depth under `policy`, compared against an inclusive limit.
pub fn check_depth_with_policy(
    circuit: &Circuit,
    policy: &GateSetPolicy,
    limit: Option<usize>,
) -> DepthReport {
    depth::depth_report(circuit_depth(&policy.lowered(circuit)), limit)
}
