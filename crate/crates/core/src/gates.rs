//! Unitary definitions for every [`GateKind`].

use std::f64::consts::FRAC_1_SQRT_2;
use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex64;

use crate::circuit::GateKind;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("gate `{kind}` expects {expected} parameter(s), got {found}")]
pub struct DefinitionError {
    pub kind: GateKind,
    pub expected: usize,
    pub found: usize,
}

/// Square, row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        Matrix {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Matrix::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from rows. Panics if the rows are not square.
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "matrix must be square");
        Matrix {
            dim,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Matrix::zeros(self.dim);
        for r in 0..self.dim {
            for c in 0..self.dim {
                out[(c, r)] = self[(r, c)].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `|tr(A†B)| / dim`; equals 1 exactly when the two unitaries agree up
    /// to a global phase.
    pub fn phase_invariant_overlap(&self, other: &Matrix) -> f64 {
        (self.adjoint() * other).trace().norm() / self.dim as f64
    }

    /// Block-diagonal `I ⊕ U` for a singly-controlled `U`.
    fn controlled(base: &Matrix) -> Self {
        let half = base.dim;
        let mut m = Matrix::identity(2 * half);
        for r in 0..half {
            for c in 0..half {
                m[(half + r, half + c)] = base[(r, c)];
            }
        }
        m
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Complex64;

    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.dim + c]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.dim + c]
    }
}

impl Mul<&Matrix> for &Matrix {
    type Output = Matrix;

    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = Matrix::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self[(r, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..n {
                    out[(r, c)] += a * rhs[(k, c)];
                }
            }
        }
        out
    }
}

impl Mul<&Matrix> for Matrix {
    type Output = Matrix;

    fn mul(self, rhs: &Matrix) -> Matrix {
        &self * rhs
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn diag2(a: Complex64, b: Complex64) -> Matrix {
    Matrix::from_rows(vec![vec![a, c(0.0, 0.0)], vec![c(0.0, 0.0), b]])
}

fn ry(theta: f64) -> Matrix {
    let (s, co) = (theta / 2.0).sin_cos();
    Matrix::from_rows(vec![
        vec![c(co, 0.0), c(-s, 0.0)],
        vec![c(s, 0.0), c(co, 0.0)],
    ])
}

fn rz(theta: f64) -> Matrix {
    diag2(
        Complex64::from_polar(1.0, -theta / 2.0),
        Complex64::from_polar(1.0, theta / 2.0),
    )
}

fn phase(lambda: f64) -> Matrix {
    diag2(c(1.0, 0.0), Complex64::from_polar(1.0, lambda))
}

fn hadamard() -> Matrix {
    let h = FRAC_1_SQRT_2;
    Matrix::from_rows(vec![
        vec![c(h, 0.0), c(h, 0.0)],
        vec![c(h, 0.0), c(-h, 0.0)],
    ])
}

fn pauli_x() -> Matrix {
    Matrix::from_rows(vec![
        vec![c(0.0, 0.0), c(1.0, 0.0)],
        vec![c(1.0, 0.0), c(0.0, 0.0)],
    ])
}

/// The unitary of `kind` with the given angles (radians). The local basis
/// orders operands as they appear in the gate, first operand most
/// significant, so controlled gates are `I ⊕ U`.
pub fn gate_matrix(kind: GateKind, params: &[f64]) -> Result<Matrix, DefinitionError> {
    if params.len() != kind.param_count() {
        return Err(DefinitionError {
            kind,
            expected: kind.param_count(),
            found: params.len(),
        });
    }
    let m = match kind {
        GateKind::H => hadamard(),
        GateKind::X => pauli_x(),
        GateKind::Y => Matrix::from_rows(vec![
            vec![c(0.0, 0.0), c(0.0, -1.0)],
            vec![c(0.0, 1.0), c(0.0, 0.0)],
        ]),
        GateKind::Z => diag2(c(1.0, 0.0), c(-1.0, 0.0)),
        GateKind::S => diag2(c(1.0, 0.0), c(0.0, 1.0)),
        GateKind::Sdg => diag2(c(1.0, 0.0), c(0.0, -1.0)),
        GateKind::T => phase(std::f64::consts::FRAC_PI_4),
        GateKind::Tdg => phase(-std::f64::consts::FRAC_PI_4),
        GateKind::Rx => {
            let (s, co) = (params[0] / 2.0).sin_cos();
            Matrix::from_rows(vec![
                vec![c(co, 0.0), c(0.0, -s)],
                vec![c(0.0, -s), c(co, 0.0)],
            ])
        }
        GateKind::Ry => ry(params[0]),
        GateKind::Rz => rz(params[0]),
        GateKind::P => phase(params[0]),
        GateKind::U => {
            let (theta, phi, lambda) = (params[0], params[1], params[2]);
            let (s, co) = (theta / 2.0).sin_cos();
            Matrix::from_rows(vec![
                vec![c(co, 0.0), -Complex64::from_polar(s, lambda)],
                vec![
                    Complex64::from_polar(s, phi),
                    Complex64::from_polar(co, phi + lambda),
                ],
            ])
        }
        GateKind::Cx => Matrix::controlled(&pauli_x()),
        GateKind::Cz => Matrix::controlled(&diag2(c(1.0, 0.0), c(-1.0, 0.0))),
        GateKind::Ch => Matrix::controlled(&hadamard()),
        GateKind::Cry => Matrix::controlled(&ry(params[0])),
        GateKind::Crz => Matrix::controlled(&rz(params[0])),
        GateKind::Cp => Matrix::controlled(&phase(params[0])),
        GateKind::Ccx => Matrix::controlled(&Matrix::controlled(&pauli_x())),
        GateKind::Swap => {
            let mut m = Matrix::zeros(4);
            m[(0, 0)] = c(1.0, 0.0);
            m[(1, 2)] = c(1.0, 0.0);
            m[(2, 1)] = c(1.0, 0.0);
            m[(3, 3)] = c(1.0, 0.0);
            m
        }
    };
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn apply(m: &Matrix, v: &[Complex64]) -> Vec<Complex64> {
        (0..m.dim())
            .map(|r| (0..m.dim()).map(|k| m[(r, k)] * v[k]).sum())
            .collect()
    }

    #[test]
    fn pauli_x_definition() {
        let x = gate_matrix(GateKind::X, &[]).unwrap();
        assert_eq!(x, pauli_x());
        assert_eq!(x[(0, 1)], c(1.0, 0.0));
        assert_eq!(x[(0, 0)], c(0.0, 0.0));
    }

    #[test]
    fn s_on_one_gives_i() {
        let s = gate_matrix(GateKind::S, &[]).unwrap();
        let out = apply(&s, &[c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(out, vec![c(0.0, 0.0), c(0.0, 1.0)]);
    }

    #[test]
    fn ry_prepares_one_third_state() {
        let theta = 2.0 * (1.0 / 3f64.sqrt()).asin();
        let m = gate_matrix(GateKind::Ry, &[theta]).unwrap();
        let out = apply(&m, &[c(1.0, 0.0), c(0.0, 0.0)]);
        assert!((out[0] - c((2.0f64 / 3.0).sqrt(), 0.0)).norm() < 1e-12);
        assert!((out[1] - c(1.0 / 3f64.sqrt(), 0.0)).norm() < 1e-12);
    }

    #[test]
    fn wrong_param_count() {
        let err = gate_matrix(GateKind::Rz, &[]).unwrap_err();
        assert_eq!(
            err,
            DefinitionError {
                kind: GateKind::Rz,
                expected: 1,
                found: 0
            }
        );
        assert!(gate_matrix(GateKind::H, &[0.1]).is_err());
    }

    #[test]
    fn dimensions_follow_arity() {
        for kind in GateKind::ALL {
            let params = vec![0.3; kind.param_count()];
            let m = gate_matrix(kind, &params).unwrap();
            assert_eq!(m.dim(), 1 << kind.arity(), "{kind}");
        }
    }

    #[test]
    fn ch_blocks() {
        let ch = gate_matrix(GateKind::Ch, &[]).unwrap();
        let h = hadamard();
        for r in 0..2 {
            for col in 0..2 {
                let id = if r == col { 1.0 } else { 0.0 };
                assert!((ch[(r, col)] - c(id, 0.0)).norm() < 1e-12);
                assert!((ch[(2 + r, 2 + col)] - h[(r, col)]).norm() < 1e-12);
                assert!(ch[(r, 2 + col)].norm() < 1e-12);
                assert!(ch[(2 + r, col)].norm() < 1e-12);
            }
        }
    }

    proptest! {
        #[test]
        fn every_gate_is_unitary(angles in proptest::collection::vec(-10.0f64..10.0, 3)) {
            for kind in GateKind::ALL {
                let m = gate_matrix(kind, &angles[..kind.param_count()]).unwrap();
                let prod = m.adjoint() * &m;
                prop_assert!(prod.max_abs_diff(&Matrix::identity(m.dim())) < 1e-12, "{}", kind);
            }
        }

        #[test]
        fn u_specializations(theta in -7.0f64..7.0, lambda in -7.0f64..7.0) {
            let u = gate_matrix(GateKind::U, &[theta, 0.0, 0.0]).unwrap();
            let ry = gate_matrix(GateKind::Ry, &[theta]).unwrap();
            prop_assert!((u.phase_invariant_overlap(&ry) - 1.0).abs() < 1e-9);
            let u = gate_matrix(GateKind::U, &[0.0, 0.0, lambda]).unwrap();
            let p = gate_matrix(GateKind::P, &[lambda]).unwrap();
            prop_assert!((u.phase_invariant_overlap(&p) - 1.0).abs() < 1e-9);
        }
    }
}
