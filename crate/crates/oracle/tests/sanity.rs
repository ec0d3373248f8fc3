use num_complex::Complex64;
use qjudge_core::{Circuit, GateKind};
use qjudge_oracle::{circuit_unitary, embed, final_state, gate_unitary, phase_invariant_overlap};

#[test]
fn textbook_unitaries_are_unitary() {
    for kind in GateKind::ALL {
        let u = gate_unitary(kind, &[0.3, -1.1, 2.0][..kind.param_count()]);
        let dim = 1usize << kind.arity();
        let product = u.adjoint() * &u;
        for i in 0..dim {
            for j in 0..dim {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (product[(i, j)] - Complex64::new(expected, 0.0)).norm() < 1e-12,
                    "{kind}"
                );
            }
        }
    }
}

#[test]
fn bell_state() {
    let mut c = Circuit::new(2);
    c.h(0).cx(0, 1);
    let s = final_state(&c);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    assert!((s[0].re - r).abs() < 1e-12 && (s[3].re - r).abs() < 1e-12);
    assert!(s[1].norm() < 1e-12 && s[2].norm() < 1e-12);
}

#[test]
fn embedding_respects_operand_order() {
    // cx with control 1 and target 0 on two qubits maps |01> to |11>.
    let u = embed(&gate_unitary(GateKind::Cx, &[]), &[1, 0], 2);
    assert!((u[(3, 1)] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    let mut swap = Circuit::new(2);
    swap.swap(0, 1);
    let mut three = Circuit::new(2);
    three.cx(0, 1).cx(1, 0).cx(0, 1);
    assert!(
        (phase_invariant_overlap(&circuit_unitary(&swap), &circuit_unitary(&three)) - 1.0).abs()
            < 1e-12
    );
}
