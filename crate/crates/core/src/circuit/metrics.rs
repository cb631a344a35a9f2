use serde::Serialize;

use super::{Circuit, GateKind};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CircuitMetrics {
    pub n_qubits: usize,
    pub cnot_count: usize,
    pub single_qubit_count: usize,
    pub total_gates: usize,
    /// Greedy-layered depth over all non-global-phase gates.
    pub depth: usize,
}

/// Gate statistics. Meant for basis circuits; composite gates count as one.
pub fn metrics(circuit: &Circuit) -> CircuitMetrics {
    let mut level = vec![0usize; circuit.n_qubits()];
    let mut m = CircuitMetrics {
        n_qubits: circuit.n_qubits(),
        ..Default::default()
    };
    for g in circuit.gates() {
        if matches!(g.kind, GateKind::GlobalPhase(_)) && g.controls.is_empty() {
            continue;
        }
        m.total_gates += 1;
        if g.is_cnot() {
            m.cnot_count += 1;
        } else if g.controls.is_empty() && g.targets.len() == 1 {
            m.single_qubit_count += 1;
        }
        let qs = g.qubits();
        let layer = qs.iter().map(|&q| level[q]).max().unwrap_or(0) + 1;
        qs.iter().for_each(|&q| level[q] = layer);
        m.depth = m.depth.max(layer);
    }
    m
}
