//! Lowering to CNOT plus single-qubit gates.
//!
//! Output gates are: uncontrolled single-qubit kinds (including 2×2 `Unitary`),
//! `X` with one positive control, and uncontrolled `GlobalPhase`. Multi-controlled
//! X gates may borrow one extra qubit, appended at index `n_qubits`, which is
//! returned to its initial state.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use super::builders::mcx::mcx_gates;
use super::{Circuit, Control, Gate, GateKind};
use crate::{Error, Result};

struct Lowering {
    borrowed: Option<usize>,
    borrowed_used: bool,
    out: Vec<Gate>,
}

pub fn transpile_to_basis(circuit: &Circuit, ancilla_budget: usize) -> Result<Circuit> {
    circuit.validate()?;
    let n = circuit.n_qubits();
    let mut low = Lowering {
        borrowed: (ancilla_budget > 0).then_some(n),
        borrowed_used: false,
        out: Vec::new(),
    };
    for g in circuit.gates() {
        low.gate(g, &[])?;
    }
    let n_out = n + usize::from(low.borrowed_used);
    let mut out = Circuit::new(n_out);
    for g in cancel_adjacent(low.out, n_out) {
        out.push(g);
    }
    Ok(out)
}

pub fn is_basis_circuit(circuit: &Circuit) -> bool {
    circuit.gates().iter().all(|g| match g.kind {
        GateKind::Block(_) | GateKind::Conjugated { .. } | GateKind::Rzz(_) => false,
        GateKind::GlobalPhase(_) => g.controls.is_empty(),
        GateKind::Unitary(ref m) => m.nrows() == 2 && g.controls.is_empty(),
        GateKind::X => g.controls.is_empty() || g.is_cnot(),
        _ => g.controls.is_empty(),
    })
}

impl Lowering {
    fn emit(&mut self, g: Gate) {
        self.out.push(g);
    }

    fn rot(&mut self, kind: GateKind, q: usize) {
        if kind.angle().is_some_and(|a| a == 0.0) {
            return;
        }
        self.emit(Gate::new(kind, vec![q]));
    }

    fn gate(&mut self, g: &Gate, extra: &[Control]) -> Result<()> {
        let mut ctrls: Vec<Control> = extra.to_vec();
        ctrls.extend_from_slice(&g.controls);
        let open: Vec<usize> = ctrls.iter().filter(|c| !c.on_one).map(|c| c.qubit).collect();
        if !open.is_empty() {
            open.iter().for_each(|&q| self.emit(Gate::x(q)));
            let pos: Vec<Control> = ctrls.iter().map(|c| Control::pos(c.qubit)).collect();
            let bare = Gate::new(g.kind.clone(), g.targets.clone());
            self.gate(&bare, &pos)?;
            open.iter().for_each(|&q| self.emit(Gate::x(q)));
            return Ok(());
        }
        match &g.kind {
            GateKind::Block(c) => {
                for h in c.gates() {
                    self.gate(h, &ctrls)?;
                }
            }
            GateKind::Conjugated { outer, inner } => {
                for h in outer.gates() {
                    self.gate(h, &[])?;
                }
                for h in inner.gates() {
                    self.gate(h, &ctrls)?;
                }
                for h in outer.inverse().gates() {
                    self.gate(h, &[])?;
                }
            }
            kind => {
                let pos: Vec<usize> = ctrls.iter().map(|c| c.qubit).collect();
                self.leaf(kind, &g.targets, &pos)?;
            }
        }
        Ok(())
    }

    fn mcx(&mut self, ctrls: &[usize], t: usize) {
        if ctrls.len() >= 3 && self.borrowed.is_some() {
            self.borrowed_used = true;
        }
        for g in mcx_gates(ctrls, t, self.borrowed) {
            self.emit(g);
        }
    }

    fn leaf(&mut self, kind: &GateKind, targets: &[usize], ctrls: &[usize]) -> Result<()> {
        match *kind {
            GateKind::GlobalPhase(phi) => match ctrls.split_last() {
                None => self.emit(Gate::global_phase(phi)),
                Some((&last, rest)) => self.leaf(&GateKind::Phase(phi), &[last], rest)?,
            },
            GateKind::Rzz(theta) => {
                let (a, b) = (targets[0], targets[1]);
                self.emit(Gate::cx(a, b));
                self.leaf(&GateKind::Rz(theta), &[b], ctrls)?;
                self.emit(Gate::cx(a, b));
            }
            GateKind::Unitary(ref m) if m.nrows() > 2 => {
                return Err(Error::Undecomposable(format!("dense {}-qubit unitary", targets.len())));
            }
            _ => self.one_qubit(kind, targets[0], ctrls),
        }
        Ok(())
    }

    fn one_qubit(&mut self, kind: &GateKind, t: usize, ctrls: &[usize]) {
        if ctrls.is_empty() {
            self.emit(Gate::new(kind.clone(), vec![t]));
            return;
        }
        let k = ctrls.len();
        match *kind {
            GateKind::X => self.mcx(ctrls, t),
            GateKind::Z => {
                self.emit(Gate::h(t));
                self.mcx(ctrls, t);
                self.emit(Gate::h(t));
            }
            GateKind::Y => {
                self.emit(Gate::sdg(t));
                self.mcx(ctrls, t);
                self.emit(Gate::s(t));
            }
            GateKind::S => self.one_qubit(&GateKind::Phase(FRAC_PI_2), t, ctrls),
            GateKind::Sdg => self.one_qubit(&GateKind::Phase(-FRAC_PI_2), t, ctrls),
            GateKind::T => self.one_qubit(&GateKind::Phase(FRAC_PI_4), t, ctrls),
            GateKind::Tdg => self.one_qubit(&GateKind::Phase(-FRAC_PI_4), t, ctrls),
            GateKind::Phase(phi) if k == 1 => {
                let c = ctrls[0];
                self.rot(GateKind::Phase(phi / 2.0), c);
                self.emit(Gate::cx(c, t));
                self.rot(GateKind::Phase(-phi / 2.0), t);
                self.emit(Gate::cx(c, t));
                self.rot(GateKind::Phase(phi / 2.0), t);
            }
            GateKind::Phase(phi) => {
                self.one_qubit(&GateKind::Rz(phi), t, ctrls);
                self.one_qubit(&GateKind::Phase(phi / 2.0), ctrls[k - 1], &ctrls[..k - 1]);
            }
            GateKind::Rz(theta) => {
                self.rot(GateKind::Rz(theta / 2.0), t);
                self.mcx(ctrls, t);
                self.rot(GateKind::Rz(-theta / 2.0), t);
                self.mcx(ctrls, t);
            }
            GateKind::Ry(theta) => {
                self.rot(GateKind::Ry(theta / 2.0), t);
                self.mcx(ctrls, t);
                self.rot(GateKind::Ry(-theta / 2.0), t);
                self.mcx(ctrls, t);
            }
            GateKind::Rx(theta) => {
                self.emit(Gate::h(t));
                self.one_qubit(&GateKind::Rz(theta), t, ctrls);
                self.emit(Gate::h(t));
            }
            _ => {
                let m = kind.matrix_1q().expect("single-qubit kind");
                let (alpha, beta, gamma, delta) = zyz(&m);
                self.rot(GateKind::Rz((delta - beta) / 2.0), t);
                self.mcx(ctrls, t);
                self.rot(GateKind::Rz(-(delta + beta) / 2.0), t);
                self.rot(GateKind::Ry(-gamma / 2.0), t);
                self.mcx(ctrls, t);
                self.rot(GateKind::Ry(gamma / 2.0), t);
                self.rot(GateKind::Rz(beta), t);
                if alpha != 0.0 {
                    self.one_qubit(&GateKind::Phase(alpha), ctrls[k - 1], &ctrls[..k - 1]);
                }
            }
        }
    }
}

/// `U = e^{iα} Rz(β) Ry(γ) Rz(δ)`.
pub(crate) fn zyz(u: &[[num_complex::Complex64; 2]; 2]) -> (f64, f64, f64, f64) {
    let det = u[0][0] * u[1][1] - u[0][1] * u[1][0];
    let alpha = det.arg() / 2.0;
    let phase = num_complex::Complex64::from_polar(1.0, -alpha);
    let a = u[0][0] * phase;
    let b = u[1][0] * phase;
    let gamma = 2.0 * b.norm().atan2(a.norm());
    let arg_a = if a.norm() > 1e-14 { a.arg() } else { 0.0 };
    let arg_b = if b.norm() > 1e-14 { b.arg() } else { 0.0 };
    let (beta, delta) = if a.norm() <= 1e-14 {
        (2.0 * arg_b, 0.0)
    } else if b.norm() <= 1e-14 {
        (-2.0 * arg_a, 0.0)
    } else {
        (arg_b - arg_a, -arg_a - arg_b)
    };
    (alpha, beta, gamma, delta)
}

fn self_inverse_pair(a: &Gate, b: &Gate) -> bool {
    if a.targets != b.targets || a.controls != b.controls {
        return false;
    }
    if a.is_cnot() {
        return b.is_cnot();
    }
    if !a.controls.is_empty() {
        return false;
    }
    matches!(
        (&a.kind, &b.kind),
        (GateKind::X, GateKind::X)
            | (GateKind::Y, GateKind::Y)
            | (GateKind::Z, GateKind::Z)
            | (GateKind::H, GateKind::H)
            | (GateKind::S, GateKind::Sdg)
            | (GateKind::Sdg, GateKind::S)
            | (GateKind::T, GateKind::Tdg)
            | (GateKind::Tdg, GateKind::T)
            | (GateKind::W, GateKind::Wdg)
            | (GateKind::Wdg, GateKind::W)
    )
}

/// Sum of two adjacent uncontrolled rotations about the same axis.
fn merged_rotation(a: &Gate, b: &Gate) -> Option<GateKind> {
    if a.targets != b.targets || !a.controls.is_empty() || !b.controls.is_empty() {
        return None;
    }
    match (&a.kind, &b.kind) {
        (GateKind::Rx(x), GateKind::Rx(y)) => Some(GateKind::Rx(x + y)),
        (GateKind::Ry(x), GateKind::Ry(y)) => Some(GateKind::Ry(x + y)),
        (GateKind::Rz(x), GateKind::Rz(y)) => Some(GateKind::Rz(x + y)),
        (GateKind::Phase(x), GateKind::Phase(y)) => Some(GateKind::Phase(x + y)),
        _ => None,
    }
}

/// Removes adjacent gate pairs that multiply to the identity and merges
/// adjacent rotations, cascading.
fn cancel_adjacent(gates: Vec<Gate>, n_qubits: usize) -> Vec<Gate> {
    let mut live: Vec<Option<Gate>> = Vec::with_capacity(gates.len());
    let mut stacks: Vec<Vec<usize>> = vec![Vec::new(); n_qubits];
    for g in gates {
        let qs = g.qubits();
        if !qs.is_empty() {
            let top = stacks[qs[0]].last().copied();
            let all_same = top.is_some() && qs.iter().all(|&q| stacks[q].last().copied() == top);
            if all_same {
                let j = top.unwrap();
                let prev = live[j].as_ref().unwrap();
                if prev.qubits() == qs && self_inverse_pair(prev, &g) {
                    live[j] = None;
                    qs.iter().for_each(|&q| {
                        stacks[q].pop();
                    });
                    continue;
                }
                if let Some(kind) = merged_rotation(prev, &g) {
                    if kind.angle() == Some(0.0) {
                        live[j] = None;
                        stacks[qs[0]].pop();
                    } else {
                        live[j].as_mut().unwrap().kind = kind;
                    }
                    continue;
                }
            }
        }
        let idx = live.len();
        qs.iter().for_each(|&q| stacks[q].push(idx));
        live.push(Some(g));
    }
    live.into_iter().flatten().collect()
}
