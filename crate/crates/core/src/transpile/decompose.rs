//! Rewriting gates into a basis gate set.
//!
//! Each rule expands one gate kind into a short template over other kinds;
//! expansion recurses until every gate is in the basis. `ry`, `rz` and
//! `cx` have no rule and must be in the basis whenever they are reached.
//! Single-qubit rules may introduce a global phase; controlled-gate rules
//! are exact on the controlled block.

use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::circuit::{Circuit, GateInstance, GateKind};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecomposeError {
    #[error("gate {position} (`{kind}`): no decomposition of `{missing}` into the basis")]
    NoRule {
        position: usize,
        kind: GateKind,
        missing: GateKind,
    },
}

#[derive(Debug, Clone, Copy)]
enum Angle {
    None,
    Fixed(f64),
    /// `factor · params[index]` of the gate being expanded.
    Scaled(usize, f64),
}

#[derive(Debug, Clone, Copy)]
struct Step {
    kind: GateKind,
    operands: &'static [usize],
    angle: Angle,
}

const fn step(kind: GateKind, operands: &'static [usize], angle: Angle) -> Step {
    Step {
        kind,
        operands,
        angle,
    }
}

use Angle::{Fixed, Scaled};
use GateKind::*;

const A: &[usize] = &[0];
const B: &[usize] = &[1];
const C: &[usize] = &[2];
const AB: &[usize] = &[0, 1];
const BA: &[usize] = &[1, 0];
const AC: &[usize] = &[0, 2];
const BC: &[usize] = &[1, 2];

const N: Angle = Angle::None;

/// The registered templates, keyed by the gate they expand.
const RULES: &[(GateKind, &[Step])] = &[
    (H, &[step(Rz, A, Fixed(PI)), step(Ry, A, Fixed(FRAC_PI_2))]),
    (X, &[step(Rz, A, Fixed(PI)), step(Ry, A, Fixed(PI))]),
    (Y, &[step(Z, A, N), step(X, A, N)]),
    (Z, &[step(Rz, A, Fixed(PI))]),
    (S, &[step(Rz, A, Fixed(FRAC_PI_2))]),
    (Sdg, &[step(Rz, A, Fixed(-FRAC_PI_2))]),
    (T, &[step(Rz, A, Fixed(FRAC_PI_4))]),
    (Tdg, &[step(Rz, A, Fixed(-FRAC_PI_4))]),
    (P, &[step(Rz, A, Scaled(0, 1.0))]),
    (
        Rx,
        &[
            step(Rz, A, Fixed(FRAC_PI_2)),
            step(Ry, A, Scaled(0, 1.0)),
            step(Rz, A, Fixed(-FRAC_PI_2)),
        ],
    ),
    (
        U,
        &[
            step(Rz, A, Scaled(2, 1.0)),
            step(Ry, A, Scaled(0, 1.0)),
            step(Rz, A, Scaled(1, 1.0)),
        ],
    ),
    (Cz, &[step(H, B, N), step(Cx, AB, N), step(H, B, N)]),
    (
        Ch,
        &[
            step(Ry, B, Fixed(FRAC_PI_4)),
            step(Cx, AB, N),
            step(Ry, B, Fixed(-FRAC_PI_4)),
        ],
    ),
    (
        Cry,
        &[
            step(Ry, B, Scaled(0, 0.5)),
            step(Cx, AB, N),
            step(Ry, B, Scaled(0, -0.5)),
            step(Cx, AB, N),
        ],
    ),
    (
        Crz,
        &[
            step(Rz, B, Scaled(0, 0.5)),
            step(Cx, AB, N),
            step(Rz, B, Scaled(0, -0.5)),
            step(Cx, AB, N),
        ],
    ),
    (
        Cp,
        &[
            step(P, A, Scaled(0, 0.5)),
            step(Cx, AB, N),
            step(P, B, Scaled(0, -0.5)),
            step(Cx, AB, N),
            step(P, B, Scaled(0, 0.5)),
        ],
    ),
    (Swap, &[step(Cx, AB, N), step(Cx, BA, N), step(Cx, AB, N)]),
    (
        Ccx,
        &[
            step(H, C, N),
            step(Cx, BC, N),
            step(Tdg, C, N),
            step(Cx, AC, N),
            step(T, C, N),
            step(Cx, BC, N),
            step(Tdg, C, N),
            step(Cx, AC, N),
            step(T, B, N),
            step(T, C, N),
            step(H, C, N),
            step(Cx, AB, N),
            step(T, A, N),
            step(Tdg, B, N),
            step(Cx, AB, N),
        ],
    ),
];

/// Gate kinds that have a registered decomposition rule.
pub fn rule_kinds() -> impl Iterator<Item = GateKind> {
    RULES.iter().map(|(k, _)| *k)
}

fn rule_for(kind: GateKind) -> Option<&'static [Step]> {
    RULES
        .iter()
        .find(|(k, _)| *k == kind)
        .map(|(_, steps)| *steps)
}

/// Applies the rule for `gate.kind` once, without recursing.
pub fn expand_once(gate: &GateInstance) -> Option<Vec<GateInstance>> {
    let steps = rule_for(gate.kind)?;
    Some(
        steps
            .iter()
            .map(|s| {
                let qubits = s
                    .operands
                    .iter()
                    .map(|&i| gate.qubits[i])
                    .collect::<Vec<_>>();
                let params = match s.angle {
                    Angle::None => vec![],
                    Fixed(v) => vec![v],
                    Scaled(i, f) => vec![f * gate.params[i]],
                };
                GateInstance::new(s.kind, qubits, params)
            })
            .collect(),
    )
}

fn expand_into(
    gate: &GateInstance,
    basis: &BTreeSet<GateKind>,
    out: &mut Vec<GateInstance>,
) -> Result<(), GateKind> {
    if basis.contains(&gate.kind) {
        out.push(gate.clone());
        return Ok(());
    }
    let parts = expand_once(gate).ok_or(gate.kind)?;
    for part in &parts {
        expand_into(part, basis, out)?;
    }
    Ok(())
}

/// Expands a single gate into `basis`.
pub fn decompose_gate(
    gate: &GateInstance,
    basis: &BTreeSet<GateKind>,
) -> Result<Vec<GateInstance>, GateKind> {
    let mut out = Vec::new();
    expand_into(gate, basis, &mut out)?;
    Ok(out)
}

/// Rewrites `circuit` to use only `basis` gates. The result equals the
/// input up to a global phase.
pub fn decompose(circuit: &Circuit, basis: &BTreeSet<GateKind>) -> Result<Circuit, DecomposeError> {
    let mut gates = Vec::with_capacity(circuit.gates.len());
    for (position, gate) in circuit.gates.iter().enumerate() {
        expand_into(gate, basis, &mut gates).map_err(|missing| DecomposeError::NoRule {
            position,
            kind: gate.kind,
            missing,
        })?;
    }
    Ok(Circuit::with_gates(circuit.n_qubits, gates))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis(kinds: &[GateKind]) -> BTreeSet<GateKind> {
        kinds.iter().copied().collect()
    }

    #[test]
    fn already_in_basis_is_unchanged() {
        let mut c = Circuit::new(1);
        c.h(0);
        assert_eq!(decompose(&c, &basis(&[H, Cx, Ry, Rz, X])).unwrap(), c);
    }

    #[test]
    fn ch_goes_to_ry_cx() {
        let mut c = Circuit::new(2);
        c.ch(0, 1);
        let d = decompose(&c, &basis(&[H, Cx, Ry, Rz, X])).unwrap();
        let kinds: Vec<GateKind> = d.gates.iter().map(|g| g.kind).collect();
        assert_eq!(kinds, vec![Ry, Cx, Ry]);
        assert_eq!(d.gates[0].qubits, vec![1]);
        assert_eq!(d.gates[1].qubits, vec![0, 1]);
    }

    #[test]
    fn ccx_uses_six_cx() {
        let mut c = Circuit::new(3);
        c.ccx(0, 1, 2);
        let d = decompose(&c, &basis(&[H, Cx, Ry, Rz, X])).unwrap();
        assert_eq!(d.gates.iter().filter(|g| g.kind == Cx).count(), 6);
        assert!(d.gates.iter().all(|g| [H, Cx, Rz].contains(&g.kind)));
    }

    #[test]
    fn missing_atom_is_an_error() {
        let mut c = Circuit::new(2);
        c.h(0).cz(0, 1);
        let err = decompose(&c, &basis(&[H, Ry, Rz])).unwrap_err();
        assert_eq!(
            err,
            DecomposeError::NoRule {
                position: 1,
                kind: Cz,
                missing: Cx
            }
        );
    }

    #[test]
    fn every_kind_but_atoms_has_a_rule() {
        for kind in GateKind::ALL {
            let atom = matches!(kind, Ry | Rz | Cx);
            assert_eq!(rule_for(kind).is_some(), !atom, "{kind}");
        }
    }

    #[test]
    fn templates_fit_their_gate() {
        for (kind, steps) in RULES {
            for s in steps.iter() {
                assert_eq!(s.operands.len(), s.kind.arity(), "{kind}");
                assert!(s.operands.iter().all(|&i| i < kind.arity()), "{kind}");
                let has_angle = !matches!(s.angle, Angle::None);
                assert_eq!(has_angle, s.kind.param_count() == 1, "{kind}");
                if let Scaled(i, _) = s.angle {
                    assert!(i < kind.param_count(), "{kind}");
                }
            }
        }
    }
}
