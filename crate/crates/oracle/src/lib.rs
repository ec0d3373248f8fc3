//! Reference computations for cross-checking the simulator.
//!
//! Everything here goes through full `2^n × 2^n` matrices: gates are
//! written out from their textbook definitions, widened with a Kronecker
//! product against the identity, and moved onto their operands with a
//! basis permutation. Nothing calls into the simulator or the engine's own
//! gate table, so agreement between the two is meaningful.

use nalgebra::DMatrix;
use num_complex::Complex64;
use qjudge_core::{Circuit, GateKind};

pub type CMatrix = DMatrix<Complex64>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn m2(a: Complex64, b: Complex64, cc: Complex64, d: Complex64) -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[a, b, cc, d])
}

fn controlled(u: &CMatrix) -> CMatrix {
    let d = u.nrows();
    let mut out = CMatrix::identity(2 * d, 2 * d);
    out.view_mut((d, d), (d, d)).copy_from(u);
    out
}

/// Textbook unitary for `kind`; operand 0 is the most significant local bit.
pub fn gate_unitary(kind: GateKind, params: &[f64]) -> CMatrix {
    let s2 = std::f64::consts::FRAC_1_SQRT_2;
    let zero = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let ry = |t: f64| {
        m2(
            c((t / 2.0).cos(), 0.0),
            c(-(t / 2.0).sin(), 0.0),
            c((t / 2.0).sin(), 0.0),
            c((t / 2.0).cos(), 0.0),
        )
    };
    let rz = |t: f64| {
        m2(
            Complex64::cis(-t / 2.0),
            zero,
            zero,
            Complex64::cis(t / 2.0),
        )
    };
    let p = |l: f64| m2(one, zero, zero, Complex64::cis(l));
    let h = m2(c(s2, 0.0), c(s2, 0.0), c(s2, 0.0), c(-s2, 0.0));
    let x = m2(zero, one, one, zero);
    match kind {
        GateKind::H => h,
        GateKind::X => x,
        GateKind::Y => m2(zero, c(0.0, -1.0), c(0.0, 1.0), zero),
        GateKind::Z => m2(one, zero, zero, -one),
        GateKind::S => p(std::f64::consts::FRAC_PI_2),
        GateKind::Sdg => p(-std::f64::consts::FRAC_PI_2),
        GateKind::T => p(std::f64::consts::FRAC_PI_4),
        GateKind::Tdg => p(-std::f64::consts::FRAC_PI_4),
        GateKind::Rx => {
            let t = params[0] / 2.0;
            m2(
                c(t.cos(), 0.0),
                c(0.0, -t.sin()),
                c(0.0, -t.sin()),
                c(t.cos(), 0.0),
            )
        }
        GateKind::Ry => ry(params[0]),
        GateKind::Rz => rz(params[0]),
        GateKind::P => p(params[0]),
        GateKind::U => {
            // Rz(φ)·Ry(θ)·Rz(λ) carries a global phase e^{-i(φ+λ)/2}
            // relative to the standard U; undo it explicitly.
            let (theta, phi, lambda) = (params[0], params[1], params[2]);
            (rz(phi) * ry(theta) * rz(lambda)) * Complex64::cis((phi + lambda) / 2.0)
        }
        GateKind::Cx => controlled(&x),
        GateKind::Cz => controlled(&m2(one, zero, zero, -one)),
        GateKind::Ch => controlled(&h),
        GateKind::Cry => controlled(&ry(params[0])),
        GateKind::Crz => controlled(&rz(params[0])),
        GateKind::Cp => controlled(&p(params[0])),
        GateKind::Ccx => controlled(&controlled(&x)),
        GateKind::Swap => {
            let mut m = CMatrix::zeros(4, 4);
            m[(0, 0)] = one;
            m[(1, 2)] = one;
            m[(2, 1)] = one;
            m[(3, 3)] = one;
            m
        }
    }
}

/// Permutation matrix sending basis states of the register to the order
/// `[operands..., remaining qubits ascending]`.
fn permutation(operands: &[usize], n: usize) -> CMatrix {
    let mut order: Vec<usize> = operands.to_vec();
    order.extend((0..n).filter(|q| !operands.contains(q)));
    let dim = 1usize << n;
    let mut perm = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        let bit = |q: usize| (i >> (n - 1 - q)) & 1;
        let j = order.iter().fold(0usize, |acc, &q| (acc << 1) | bit(q));
        perm[(j, i)] = c(1.0, 0.0);
    }
    perm
}

/// Widens a local unitary acting on `operands` to the full register.
pub fn embed(local: &CMatrix, operands: &[usize], n: usize) -> CMatrix {
    let rest = n - operands.len();
    let wide = local.kronecker(&CMatrix::identity(1 << rest, 1 << rest));
    let perm = permutation(operands, n);
    perm.adjoint() * wide * perm
}

/// Product of all embedded gate unitaries, latest gate leftmost.
pub fn circuit_unitary(circuit: &Circuit) -> CMatrix {
    let dim = 1usize << circuit.n_qubits;
    circuit
        .gates
        .iter()
        .fold(CMatrix::identity(dim, dim), |acc, g| {
            embed(
                &gate_unitary(g.kind, &g.params),
                &g.qubits,
                circuit.n_qubits,
            ) * acc
        })
}

/// `circuit_unitary(c) · |0…0⟩`.
pub fn final_state(circuit: &Circuit) -> Vec<Complex64> {
    let u = circuit_unitary(circuit);
    u.column(0).iter().copied().collect()
}

/// `|tr(A†B)| / dim`.
pub fn phase_invariant_overlap(a: &CMatrix, b: &CMatrix) -> f64 {
    (a.adjoint() * b).trace().norm() / a.nrows() as f64
}
