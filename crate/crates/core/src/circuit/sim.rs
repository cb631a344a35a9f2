//! In-place statevector kernels.

use num_complex::Complex64;

use super::{Control, Gate, GateKind};
use crate::linalg::cis;

pub(crate) fn apply_gates(amps: &mut [Complex64], gates: &[Gate], extra: &[Control]) {
    for g in gates {
        apply_gate(amps, g, extra);
    }
}

fn control_mask(controls: &[Control]) -> (usize, usize) {
    let mut mask = 0;
    let mut value = 0;
    for c in controls {
        mask |= 1 << c.qubit;
        if c.on_one {
            value |= 1 << c.qubit;
        }
    }
    (mask, value)
}

pub(crate) fn apply_gate(amps: &mut [Complex64], gate: &Gate, extra: &[Control]) {
    let mut controls: Vec<Control> = extra.to_vec();
    controls.extend_from_slice(&gate.controls);
    match &gate.kind {
        GateKind::Block(c) => apply_gates(amps, &c.gates, &controls),
        GateKind::Conjugated { outer, inner } => {
            apply_gates(amps, &outer.gates, &[]);
            apply_gates(amps, &inner.gates, &controls);
            let undo = outer.inverse();
            apply_gates(amps, &undo.gates, &[]);
        }
        GateKind::GlobalPhase(phi) => {
            let (mask, value) = control_mask(&controls);
            let f = cis(*phi);
            for (i, a) in amps.iter_mut().enumerate() {
                if i & mask == value {
                    *a *= f;
                }
            }
        }
        GateKind::Rzz(theta) => {
            let (mask, value) = control_mask(&controls);
            let (a, b) = (gate.targets[0], gate.targets[1]);
            let even = cis(-theta / 2.0);
            let odd = cis(theta / 2.0);
            for (i, amp) in amps.iter_mut().enumerate() {
                if i & mask == value {
                    let parity = ((i >> a) ^ (i >> b)) & 1;
                    *amp *= if parity == 0 { even } else { odd };
                }
            }
        }
        GateKind::Unitary(m) if gate.targets.len() > 1 => {
            let (mask, value) = control_mask(&controls);
            let k = gate.targets.len();
            let local = 1usize << k;
            let tmask: usize = gate.targets.iter().map(|&t| 1usize << t).sum();
            let offsets: Vec<usize> = (0..local)
                .map(|j| {
                    gate.targets
                        .iter()
                        .enumerate()
                        .filter(|(bit, _)| j >> bit & 1 == 1)
                        .map(|(_, &t)| 1usize << t)
                        .sum()
                })
                .collect();
            let mut buf = vec![Complex64::new(0.0, 0.0); local];
            for base in 0..amps.len() {
                if base & tmask != 0 || base & mask != value {
                    continue;
                }
                for (j, off) in offsets.iter().enumerate() {
                    buf[j] = amps[base | off];
                }
                for (r, off) in offsets.iter().enumerate() {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (c, b) in buf.iter().enumerate() {
                        acc += m[(r, c)] * b;
                    }
                    amps[base | off] = acc;
                }
            }
        }
        kind => {
            let u = kind.matrix_1q().expect("single-qubit gate kind without a matrix");
            let (mask, value) = control_mask(&controls);
            let bit = 1usize << gate.targets[0];
            if matches!(kind, GateKind::X) {
                for i in 0..amps.len() {
                    if i & bit == 0 && i & mask == value {
                        amps.swap(i, i | bit);
                    }
                }
                return;
            }
            let diagonal = u[0][1] == Complex64::new(0.0, 0.0) && u[1][0] == Complex64::new(0.0, 0.0);
            for i in 0..amps.len() {
                if i & bit != 0 || i & mask != value {
                    continue;
                }
                let (a0, a1) = (amps[i], amps[i | bit]);
                if diagonal {
                    amps[i] = u[0][0] * a0;
                    amps[i | bit] = u[1][1] * a1;
                } else {
                    amps[i] = u[0][0] * a0 + u[0][1] * a1;
                    amps[i | bit] = u[1][0] * a0 + u[1][1] * a1;
                }
            }
        }
    }
}
