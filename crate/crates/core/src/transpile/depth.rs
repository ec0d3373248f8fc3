use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;

/// Gate dependency graph: gate `j` depends on gate `i < j` when `i` is the
/// most recent earlier gate touching one of `j`'s qubits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyDag {
    predecessors: Vec<Vec<usize>>,
}

impl DependencyDag {
    pub fn build(circuit: &Circuit) -> Self {
        let mut last_on_qubit: Vec<Option<usize>> = vec![None; circuit.n_qubits];
        let mut predecessors = Vec::with_capacity(circuit.gates.len());
        for (index, gate) in circuit.gates.iter().enumerate() {
            let mut preds: Vec<usize> = gate
                .qubits
                .iter()
                .filter_map(|&q| last_on_qubit.get(q).copied().flatten())
                .collect();
            preds.sort_unstable();
            preds.dedup();
            predecessors.push(preds);
            for &q in &gate.qubits {
                if let Some(slot) = last_on_qubit.get_mut(q) {
                    *slot = Some(index);
                }
            }
        }
        DependencyDag { predecessors }
    }

    pub fn predecessors(&self, gate: usize) -> &[usize] {
        &self.predecessors[gate]
    }

    /// Number of gates on the longest dependency chain ending at each gate.
    /// Gate order is already a topological order.
    pub fn chain_lengths(&self) -> Vec<usize> {
        let mut lengths = vec![0usize; self.predecessors.len()];
        for gate in 0..self.predecessors.len() {
            lengths[gate] = 1 + self.predecessors[gate]
                .iter()
                .map(|&p| lengths[p])
                .max()
                .unwrap_or(0);
        }
        lengths
    }

    pub fn longest_chain(&self) -> usize {
        self.chain_lengths().into_iter().max().unwrap_or(0)
    }
}

/// Number of layers of parallel gates; every gate counts as one layer
/// element regardless of arity.
pub fn circuit_depth(circuit: &Circuit) -> usize {
    DependencyDag::build(circuit).longest_chain()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepthReport {
    pub depth: usize,
    pub limit: Option<usize>,
    pub violated: bool,
}

/// Compares the depth against an inclusive limit.
pub fn check_depth(circuit: &Circuit, limit: Option<usize>) -> DepthReport {
    depth_report(circuit_depth(circuit), limit)
}

pub(crate) fn depth_report(depth: usize, limit: Option<usize>) -> DepthReport {
    DepthReport {
        depth,
        limit,
        violated: limit.is_some_and(|l| depth > l),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parallel_layer() {
        let mut c = Circuit::new(2);
        c.h(0).h(1);
        assert_eq!(circuit_depth(&c), 1);
    }

    #[test]
    fn sequential_chain() {
        let mut c = Circuit::new(2);
        c.h(0).cx(0, 1).h(1);
        assert_eq!(circuit_depth(&c), 3);
    }

    #[test]
    fn reference_solution_depth() {
        let mut c = Circuit::new(2);
        c.h(0).ch(0, 1).cx(1, 0);
        let dag = DependencyDag::build(&c);
        assert_eq!(dag.predecessors(0), &[] as &[usize]);
        assert_eq!(dag.predecessors(1), &[0]);
        assert_eq!(dag.predecessors(2), &[1]);
        assert_eq!(circuit_depth(&c), 3);
    }

    #[test]
    fn empty_circuit() {
        assert_eq!(circuit_depth(&Circuit::new(3)), 0);
    }

    #[test]
    fn limits() {
        let mut c = Circuit::new(2);
        c.h(0).cx(0, 1).h(1);
        assert_eq!(
            check_depth(&c, Some(3)),
            DepthReport {
                depth: 3,
                limit: Some(3),
                violated: false
            }
        );
        assert_eq!(
            check_depth(&c, Some(2)),
            DepthReport {
                depth: 3,
                limit: Some(2),
                violated: true
            }
        );
        assert!(!check_depth(&c, None).violated);
    }

    fn arb_circuit(n: usize) -> impl Strategy<Value = Circuit> {
        proptest::collection::vec((0..n, 0..n, any::<bool>()), 0..25).prop_map(move |ops| {
            let mut c = Circuit::new(n);
            for (a, b, two) in ops {
                if two && a != b {
                    c.cx(a, b);
                } else {
                    c.h(a);
                }
            }
            c
        })
    }

    proptest! {
        #[test]
        fn depth_bounded_by_gate_count(c in arb_circuit(4)) {
            prop_assert!(circuit_depth(&c) <= c.len());
        }

        #[test]
        fn concatenation_is_subadditive(a in arb_circuit(4), b in arb_circuit(4)) {
            let mut joined = a.clone();
            joined.gates.extend(b.gates.iter().cloned());
            prop_assert!(circuit_depth(&joined) <= circuit_depth(&a) + circuit_depth(&b));
        }

        #[test]
        fn disjoint_neighbours_commute(c in arb_circuit(4), at in 0usize..24) {
            let mut swapped = c.clone();
            if at + 1 < swapped.len() {
                let (g1, g2) = (&swapped.gates[at], &swapped.gates[at + 1]);
                if g1.qubits.iter().all(|q| !g2.qubits.contains(q)) {
                    swapped.gates.swap(at, at + 1);
                }
            }
            prop_assert_eq!(circuit_depth(&swapped), circuit_depth(&c));
        }
    }
}
